"""Command-line front end.

Subcommands::

    constants   derived constants as JSON
    ftcheck     decay of the Gamma-product transform error
    kernel      dump of the Fourier kernel
    derive      normalized 2n-th derivative curves
    converge    convergence report against cos(z + theta)
    zeros       zero spacings of the derivative curves

Exit codes: 0 ok, 2 configuration error, 3 numerical nonconvergence,
4 acceptance property violated.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from .deriv_engine import (WnConvergenceError, convergence_report, derivative_zeros,
                           normalized_derivative, scaling_sequence, xi_canonical)
from .gamma_ft import GammaProductSpec, ft_product_poly_asymptotic, ft_quadrature_oracle
from .kernel import ASYMPTOTIC, NUMERIC_SERIES, ZETA_THETA, KernelError, KernelSpec, kernel_dump_rows
from .quadrature import QuadratureError
from .selberg_core import (BUILTINS, InsufficientCoefficientsError, SelbergData, ValidationError,
                           builtin, constants_to_dict, data_from_dict, data_to_dict, derive_constants)

log = logging.getLogger("selbergxi")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_PROPERTY = 0, 2, 3, 4

KERNELS = {"asym": ASYMPTOTIC, "theta": ZETA_THETA, "series": NUMERIC_SERIES}
COMMANDS = ("constants", "ftcheck", "kernel", "derive", "converge", "zeros")

SLOPE_WINDOW = (-2.6, -1.4)
SPACING_TOL = 0.10
NOISE_FLOOR = 1e-12

# per-command defaults; anything not listed falls back to RunConfig's own
DEFAULTS = {
    "derive": {"n": [50], "zmin": -math.pi, "zmax": math.pi, "grid": 129},
    "converge": {"n": [25, 50, 100, 200, 400], "zmin": -math.pi, "zmax": math.pi, "grid": 65},
    "zeros": {"n": [100, 400], "zmin": 0.0, "zmax": 3 * math.pi, "grid": 65},
    "kernel": {"zmin": 0.0, "zmax": 6.0, "grid": 61},
    "ftcheck": {"tol": 1e-13},
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Everything that determines a run's output (the output path excluded)."""

    command: str = "constants"
    lfunction: dict = field(default_factory=lambda: {"builtin": "zeta"})
    n: list[int] = field(default_factory=lambda: [50])
    zmin: float = -math.pi
    zmax: float = math.pi
    grid: int = 65
    kernel: str = "asym"
    tol: float = 1e-12
    workers: int = 1
    # ftcheck only
    lambdas: list[float] = field(default_factory=lambda: [0.5, 0.5])
    alphas: list[list[float]] = field(default_factory=lambda: [[0.75, 0.0], [1.0, 0.0]])
    m: int = 0
    T: list[float] = field(default_factory=lambda: [8.0, 10.0, 12.0])

    def check(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"command: unknown command {self.command!r}")
        if self.kernel not in KERNELS:
            raise ConfigError(f"kernel: expected one of {sorted(KERNELS)}, got {self.kernel!r}")
        if not (isinstance(self.tol, (int, float)) and self.tol > 0):
            raise ConfigError(f"tol: must be positive, got {self.tol!r}")
        if self.command in ("derive", "converge", "zeros"):
            if not self.n:
                raise ConfigError("n: the list of n values is empty")
            if any(not isinstance(v, int) or isinstance(v, bool) or v < 0 for v in self.n):
                raise ConfigError(f"n: expected nonnegative integers, got {self.n!r}")
            if self.command != "derive" and any(v < 1 for v in self.n):
                raise ConfigError("n: values must be positive for this command")
            if self.command == "converge" and any(b <= a for a, b in zip(self.n, self.n[1:])):
                raise ConfigError("n: values must be strictly increasing")
        if not self.zmax > self.zmin:
            raise ConfigError(f"zmin/zmax: empty range [{self.zmin}, {self.zmax}]")
        if not isinstance(self.grid, int) or self.grid < 2:
            raise ConfigError(f"grid: need at least 2 points, got {self.grid!r}")
        if self.workers < 1:
            raise ConfigError("workers: must be >= 1")
        if self.command == "ftcheck":
            if len(self.lambdas) != len(self.alphas) or not self.lambdas:
                raise ConfigError("lambdas/alphas: need equal, nonzero lengths")
            if len(self.T) < 2:
                raise ConfigError("T: need at least two values")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, obj: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        extra = set(obj) - known
        if extra:
            raise ConfigError(f"{sorted(extra)[0]}: unknown config field")
        cfg = cls(**obj)
        return cfg


# ---------------------------------------------------------------------------
# parsing helpers
# ---------------------------------------------------------------------------

def _int_list(text: str) -> list[int]:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(p) for p in text.replace(" ", "").split(",") if p]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _complex_list(text: str) -> list[list[float]]:
    try:
        vals = [complex(p) for p in text.replace(" ", "").split(",") if p]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated complex numbers, got {text!r}") from None
    return [[v.real, v.imag] for v in vals]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="selbergxi", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    src = common.add_mutually_exclusive_group()
    src.add_argument("--builtin", choices=sorted(BUILTINS), help="built-in L-function")
    src.add_argument("--config", type=Path, help="L-function JSON or a dumped run config")
    common.add_argument("--out", type=Path, help="output path (default: stdout)")
    common.add_argument("--dump-config", type=Path, metavar="PATH",
                        help="write the resolved run config to PATH before running")
    common.add_argument("--tol", type=float)
    common.add_argument("--kernel", choices=sorted(KERNELS))

    zopts = argparse.ArgumentParser(add_help=False)
    zopts.add_argument("--n", type=_int_list, help="comma-separated n values")
    zopts.add_argument("--zmin", type=float)
    zopts.add_argument("--zmax", type=float)
    zopts.add_argument("--grid", type=int)
    zopts.add_argument("--workers", type=int)

    sub.add_parser("constants", parents=[common], help="derived constants as JSON")
    ft = sub.add_parser("ftcheck", parents=[common], help="Gamma-product transform decay check")
    ft.add_argument("--lambdas", type=_float_list)
    ft.add_argument("--alphas", type=_complex_list)
    ft.add_argument("--m", type=int)
    ft.add_argument("--T", type=_float_list)
    kp = sub.add_parser("kernel", parents=[common], help="kernel dump (x from --zmin to --zmax)")
    kp.add_argument("--zmin", type=float)
    kp.add_argument("--zmax", type=float)
    kp.add_argument("--grid", type=int)
    sub.add_parser("derive", parents=[common, zopts], help="curves of the normalized derivative")
    sub.add_parser("converge", parents=[common, zopts], help="convergence report")
    sub.add_parser("zeros", parents=[common, zopts], help="zero spacings on [zmin, zmax]")
    return p


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Built-in defaults, then the config file, then explicit flags."""
    base = asdict(RunConfig())
    base.update(DEFAULTS.get(args.command, {}))
    if args.config is not None:
        try:
            obj = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError(f"config: cannot read {args.config}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON ({exc})") from None
        if not isinstance(obj, dict):
            raise ConfigError("config: expected a JSON object")
        if "lfunction" in obj or "command" in obj:
            obj = dict(obj)
            obj.pop("command", None)
            unknown = set(obj) - set(base)
            if unknown:
                raise ConfigError(f"{sorted(unknown)[0]}: unknown config field")
            base.update(obj)
        else:
            base["lfunction"] = obj
    if args.builtin is not None:
        base["lfunction"] = {"builtin": args.builtin}
    for key in ("n", "zmin", "zmax", "grid", "kernel", "tol", "workers", "lambdas", "alphas", "m", "T"):
        val = getattr(args, key, None)
        if val is not None:
            base[key] = val
    base["command"] = args.command
    cfg = RunConfig.from_dict(base)
    cfg.check()
    return cfg


def load_lfunction(spec: dict) -> SelbergData:
    if not isinstance(spec, dict):
        raise ConfigError("lfunction: expected an object")
    if set(spec) == {"builtin"}:
        name = spec["builtin"]
        if name not in BUILTINS:
            raise ConfigError(f"lfunction.builtin: unknown built-in {name!r}")
        return builtin(name)
    return data_from_dict(spec)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, str):
        return v
    return format(float(v), ".16e")


def csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)


def per_n_path(out: Path | None, n: int, many: bool) -> Path | None:
    if out is None or not many:
        return out
    return out.with_name(f"{out.stem}_n{n}{out.suffix or '.csv'}")


def _kernel_spec(cfg: RunConfig, data: SelbergData, constants) -> KernelSpec:
    return KernelSpec(KERNELS[cfg.kernel], constants, data, series_tol=max(cfg.tol, 1e-14))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_constants(cfg: RunConfig, out: Path | None) -> int:
    data = load_lfunction(cfg.lfunction)
    c = derive_constants(data)
    obj = {"lfunction": data_to_dict(data), "constants": constants_to_dict(c)}
    _emit(json.dumps(obj, indent=2, sort_keys=True) + "\n", out)
    return EXIT_OK


def decay_law_holds(Ts: Sequence[float], errors: Sequence[float], Lambda: float, factor: float = 3.0) -> bool:
    """Consecutive error ratios within ``factor`` of ``exp(-dT/Lambda)``; errors at
    the rounding floor count as an exact transform."""
    if all(e <= NOISE_FLOOR for e in errors):
        return True
    for (t0, e0), (t1, e1) in zip(zip(Ts, errors), zip(Ts[1:], errors[1:])):
        if e0 <= 0 or e1 <= 0:
            return False
        expected = math.exp(-(t1 - t0) / Lambda)
        if not (expected / factor <= e1 / e0 <= expected * factor):
            return False
    return True


def cmd_ftcheck(cfg: RunConfig, out: Path | None) -> int:
    try:
        spec = GammaProductSpec.of(cfg.lambdas, [complex(*a) for a in cfg.alphas], cfg.m)
    except ValueError as exc:
        raise ConfigError(f"lambdas/alphas: {exc}") from None
    rows, errs = [], []
    for T in cfg.T:
        orc = ft_quadrature_oracle(spec, T, cfg.tol)
        asy = ft_product_poly_asymptotic(spec, T)
        e = orc.rel_error(asy)
        errs.append(e)
        rows.append((T, orc.log_abs, orc.phase, asy.log_abs, asy.phase, e))
    _emit(csv_text(("T", "oracle_log_abs", "oracle_phase", "asym_log_abs", "asym_phase", "rel_error"), rows), out)
    ok = decay_law_holds(cfg.T, errs, spec.Lambda)
    log.info("decay law %s", "holds" if ok else "VIOLATED")
    return EXIT_OK if ok else EXIT_PROPERTY


def cmd_kernel(cfg: RunConfig, out: Path | None) -> int:
    data = load_lfunction(cfg.lfunction)
    spec = _kernel_spec(cfg, data, derive_constants(data))
    xs = np.linspace(cfg.zmin, cfg.zmax, cfg.grid)
    _emit(csv_text(("x", "log_abs", "phase", "variant"), kernel_dump_rows(spec, xs)), out)
    return EXIT_OK


def derive_curve(spec: KernelSpec, n: int, zs: np.ndarray) -> np.ndarray:
    if n == 0:
        return xi_canonical(spec, zs)
    return normalized_derivative(spec, n, zs)


def _exact_kernel_for_n0(cfg: RunConfig, data: SelbergData, constants) -> KernelSpec:
    # the leading-order kernel is wrong near x = 0, where the n = 0 transform lives
    if cfg.kernel == "asym":
        if data.name == "zeta" and data.coefficients.builtin == "zeta":
            return KernelSpec(ZETA_THETA, constants, data)
        log.warning("n=0 with the asymptotic kernel only approximates the Xi curve")
    return _kernel_spec(cfg, data, constants)


def cmd_derive(cfg: RunConfig, out: Path | None) -> int:
    data = load_lfunction(cfg.lfunction)
    c = derive_constants(data)
    spec = _kernel_spec(cfg, data, c)
    zs = np.linspace(cfg.zmin, cfg.zmax, cfg.grid)
    cos = np.cos(zs + c.theta)
    many = len(cfg.n) > 1
    for n in cfg.n:
        s = _exact_kernel_for_n0(cfg, data, c) if n == 0 else spec
        D = derive_curve(s, n, zs)
        text = csv_text(("z", "D_n", "cos_z_theta"), zip(zs, D, cos))
        if out is None and many:
            sys.stdout.write(f"# n={n}\n")
        _emit(text, per_n_path(out, n, many))
        log.info("n=%d max|D_n - cos(z+theta)| = %.6e", n, float(np.max(np.abs(D - cos))))
    return EXIT_OK


def cmd_converge(cfg: RunConfig, out: Path | None) -> int:
    data = load_lfunction(cfg.lfunction)
    c = derive_constants(data)
    spec = _kernel_spec(cfg, data, c)
    grid = np.linspace(cfg.zmin, cfg.zmax, cfg.grid)
    rep = convergence_report(spec, cfg.n, grid, workers=cfg.workers)
    rows = []
    for n, w, sup, at0 in rep.entries:
        seq = scaling_sequence(c, n)
        rows.append((n, w, seq.C_n, seq.A_n.log10_abs, sup, at0))
    _emit(csv_text(("n", "w_n", "C_n", "log10_abs_An", "sup_error", "err_at_0"), rows), out)
    sups = [e[2] for e in rep.entries]
    decreasing = all(b < a for a, b in zip(sups, sups[1:]))
    slope = rep.fitted_slope
    log.info("fitted slope %s", "undefined" if slope is None else f"{slope:.4f}")
    sys.stderr.write(f"fitted_slope={'nan' if slope is None else format(slope, '.6f')}\n")
    ok = decreasing and (slope is None or SLOPE_WINDOW[0] <= slope <= SLOPE_WINDOW[1])
    return EXIT_OK if ok else EXIT_PROPERTY


def cmd_zeros(cfg: RunConfig, out: Path | None) -> int:
    data = load_lfunction(cfg.lfunction)
    c = derive_constants(data)
    spec = _kernel_spec(cfg, data, c)
    rows, last_dev, last_count = [], math.inf, 0
    for n in cfg.n:
        zs = derivative_zeros(spec, n, (cfg.zmin, cfg.zmax))
        gaps = [b - a for a, b in zip(zs, zs[1:])]
        for i, z in enumerate(zs):
            gap = gaps[i - 1] if i > 0 else math.nan
            rows.append((n, i, z, gap, abs(gap - math.pi) / math.pi if i > 0 else math.nan))
        last_dev = max((abs(g - math.pi) / math.pi for g in gaps), default=math.inf)
        last_count = len(zs)
        log.info("n=%d: %d zeros, max spacing deviation %.4f", n, len(zs), last_dev)
    _emit(csv_text(("n", "index", "zero", "spacing", "rel_dev_from_pi"), rows), out)
    return EXIT_OK if last_count >= 2 and last_dev <= SPACING_TOL else EXIT_PROPERTY


HANDLERS = {
    "constants": cmd_constants, "ftcheck": cmd_ftcheck, "kernel": cmd_kernel,
    "derive": cmd_derive, "converge": cmd_converge, "zeros": cmd_zeros,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = resolve_config(args)
        if args.dump_config is not None:
            args.dump_config.write_text(cfg.to_json())
        return HANDLERS[cfg.command](cfg, args.out)
    except ValidationError as exc:
        sys.stderr.write("invalid L-function data:\n" + "".join(f"  {r}\n" for r in exc.report))
        return EXIT_CONFIG
    except (ConfigError, KernelError, ValueError, TypeError) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except (QuadratureError, WnConvergenceError, InsufficientCoefficientsError, ArithmeticError) as exc:
        sys.stderr.write(f"numerical nonconvergence: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
