"""L-function data, axiom checks and the derived constants of the Xi-function.

An element of the (extended) Selberg class enters this package only through its
functional-equation data: the pole order ``m``, root number ``epsilon``,
conductor-like ``Q``, Gamma factors ``Gamma(lambda_j s + mu_j)`` and the leading
Dirichlet coefficients.  From these we derive the constants that describe the
Fourier transform of ``Xi_F(z) = xi_F(1/2 + iz)``:

* ``a``, ``b``  -- the double-exponential kernel ``exp(-a e^x + b x)``;
* ``B``         -- its complex amplitude, with ``theta = arg B``;
* ``a_hat``, ``b_hat``, ``B_hat`` -- the same in the unscaled transform variable.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path
from typing import Sequence

from .lognum import LogComplex, wrap_phase

EPS_UNIT_TOL = 1e-12
BUILTIN_RULES = ("zeta", "chi4")
DELTA_TERMS = 50


class ValidationError(ValueError):
    """Raised when L-function data violates the axioms; ``report`` lists every violation."""

    def __init__(self, report: Sequence[str]):
        self.report = list(report)
        super().__init__("invalid L-function data: " + "; ".join(self.report))


class InsufficientCoefficientsError(LookupError):
    def __init__(self, required: int, available: int):
        self.required = required
        self.available = available
        super().__init__(
            f"insufficient coefficients: need at least N={required}, only {available} supplied"
        )


@dataclass(frozen=True)
class GammaFactor:
    """One factor ``Gamma(lam * s + mu)`` of the completed L-function."""

    lam: float
    mu: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "mu", complex(self.mu))


@dataclass(frozen=True)
class DirichletCoefficients:
    """Source of a_n: either a named rule (unbounded) or an explicit list a_1..a_N."""

    builtin: str | None = None
    values: tuple[complex, ...] = ()

    def __post_init__(self):
        if self.builtin is not None and self.builtin not in BUILTIN_RULES:
            raise ValueError(f"unknown coefficient rule {self.builtin!r}")
        object.__setattr__(self, "values", tuple(complex(v) for v in self.values))

    @property
    def available(self) -> int | None:
        """Number of coefficients on hand; ``None`` means unlimited."""
        return None if self.builtin is not None else len(self.values)

    def __getitem__(self, n: int) -> complex:
        """The coefficient a_n (1-based)."""
        if n < 1:
            raise IndexError("Dirichlet coefficients are indexed from 1")
        if self.builtin == "zeta":
            return 1 + 0j
        if self.builtin == "chi4":
            return (0j, 1 + 0j, 0j, -1 + 0j)[n % 4]
        if n > len(self.values):
            raise InsufficientCoefficientsError(n, len(self.values))
        return self.values[n - 1]

    def is_real(self) -> bool:
        if self.builtin is not None:
            return True
        return all(v.imag == 0 for v in self.values)


@dataclass(frozen=True)
class SelbergData:
    """Functional-equation data ``Phi(s) = eps Q^s F(s) prod Gamma(lam_j s + mu_j)``."""

    m: int
    epsilon: complex
    Q: float
    factors: tuple[GammaFactor, ...]
    coefficients: DirichletCoefficients = field(default_factory=lambda: DirichletCoefficients(values=(1,)))
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "epsilon", complex(self.epsilon))
        object.__setattr__(self, "Q", float(self.Q))
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def k(self) -> int:
        return len(self.factors)


@dataclass(frozen=True)
class DerivedConstants:
    """Everything the transform and derivative machinery needs about one L-function."""

    Lambda: float
    Mcomplex: complex
    Mprime: float
    a_hat: float
    b_hat: complex
    B_hat: complex
    a: float
    b: float
    B: complex
    theta: float
    k: int
    log_B_hat: LogComplex
    log_B: LogComplex

    @property
    def abs_B(self) -> float:
        return abs(self.B)


# ---------------------------------------------------------------------------
# built-in L-functions
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def ramanujan_tau(N: int) -> tuple[int, ...]:
    """tau(1..N) from q * prod (1 - q^n)^24, exact integers."""
    poly = [0] * N
    poly[0] = 1  # coefficient of q^0 in prod (1 - q^n)^24, truncated at q^(N-1)
    for n in range(1, N):
        for _ in range(24):
            for i in range(N - 1, n - 1, -1):
                poly[i] -= poly[i - n]
    return tuple(poly)


def delta_coefficients(N: int = DELTA_TERMS) -> tuple[float, ...]:
    """Normalized coefficients tau(n) / n^(11/2) of the discriminant form."""
    return tuple(t / n ** 5.5 for n, t in enumerate(ramanujan_tau(N), start=1))


def zeta_data() -> SelbergData:
    return SelbergData(
        m=1, epsilon=1, Q=math.pi ** -0.5, factors=(GammaFactor(0.5, 0),),
        coefficients=DirichletCoefficients(builtin="zeta"), name="zeta",
    )


def chi4_data() -> SelbergData:
    return SelbergData(
        m=0, epsilon=1, Q=math.sqrt(4.0 / math.pi), factors=(GammaFactor(0.5, 0.5),),
        coefficients=DirichletCoefficients(builtin="chi4"), name="chi4",
    )


def delta_data() -> SelbergData:
    return SelbergData(
        m=0, epsilon=1, Q=1.0 / (2.0 * math.pi), factors=(GammaFactor(1.0, 5.5),),
        coefficients=DirichletCoefficients(values=delta_coefficients()), name="delta",
    )


BUILTINS = {"zeta": zeta_data, "chi4": chi4_data, "delta": delta_data}


def builtin(name: str) -> SelbergData:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise ValueError(f"unknown builtin L-function {name!r}; choose from {sorted(BUILTINS)}") from None


# ---------------------------------------------------------------------------
# validation and constants
# ---------------------------------------------------------------------------

def validate(data: SelbergData) -> list[str]:
    """Every violated constraint, one message per violation; empty when valid."""
    report = []
    if not isinstance(data.m, int) or isinstance(data.m, bool) or data.m < 0:
        report.append(f"m: pole order must be a nonnegative integer (got {data.m!r})")
    eps = complex(data.epsilon)
    if not cmath.isfinite(eps) or abs(abs(eps) - 1.0) > EPS_UNIT_TOL:
        report.append(f"epsilon: |epsilon| must equal 1 (got |epsilon| = {abs(eps)!r})")
    if not (math.isfinite(data.Q) and data.Q > 0):
        report.append(f"Q: Q must be positive (got {data.Q!r})")
    if not data.factors:
        report.append("factors: at least one Gamma factor is required")
    for j, g in enumerate(data.factors):
        if not (math.isfinite(g.lam) and g.lam > 0):
            report.append(f"factors[{j}].lambda: lambda must be positive (got {g.lam!r})")
        if not cmath.isfinite(g.mu) or g.mu.real < 0:
            report.append(f"factors[{j}].mu: Re(mu) must be nonnegative (got {g.mu!r})")
    try:
        a1 = data.coefficients[1]
    except InsufficientCoefficientsError:
        report.append("coefficients: a_1 must equal 1 (no coefficients supplied)")
    else:
        if abs(a1 - 1) > 1e-12:
            report.append(f"coefficients: a_1 must equal 1 (got {a1!r})")
    return report


def _normalized_epsilon(eps: complex) -> complex:
    return eps / abs(eps)


def derive_constants(data: SelbergData) -> DerivedConstants:
    """Constants of the kernel exp(-a e^x + b x) and of its amplitude B.

    Raises
    ------
    ValidationError
        If ``validate(data)`` reports anything.
    """
    report = validate(data)
    if report:
        raise ValidationError(report)

    k = data.k
    m = data.m
    lams = [g.lam for g in data.factors]
    mus = [g.mu for g in data.factors]
    Lam = math.fsum(lams)
    sum_mu = complex(math.fsum(u.real for u in mus), math.fsum(u.imag for u in mus))
    M = sum_mu - 0.5 * (k - 1)
    Mprime = math.fsum(u.imag for u in mus)
    lnQ = math.log(data.Q)
    eps = _normalized_epsilon(data.epsilon)

    log_prod = -math.fsum(l * math.log(l) for l in lams) / Lam
    a_hat = math.exp(math.log(Lam) - lnQ / Lam + log_prod)
    b_hat = (2 * m + M + 0.5 * Lam) / Lam

    # Amplitude of the n = 1 term.  The polynomial factor (1/4 + z^2)^m contributes
    # (-1)^m prod lambda_j^(-2m lambda_j / Lambda) and no power of Lambda.
    log_B_hat = (
        complex(0.0, math.pi * m)
        + cmath.log(eps)
        - (M + 2 * m) / Lam * lnQ
        + 0.5 * (k + 1) * math.log(2 * math.pi)
        - 0.5 * math.log(Lam)
        + sum((-0.5 + mu - l * (M + 2 * m) / Lam) * math.log(l) for l, mu in zip(lams, mus))
    )
    log_B = log_B_hat + math.log(Lam) - math.log(2 * math.pi)
    lc_B_hat = LogComplex.from_log(log_B_hat)
    lc_B = LogComplex.from_log(log_B)

    b = 2 * m + 0.5 * Lam - 0.5 * (k - 1) + math.fsum(u.real for u in mus)
    return DerivedConstants(
        Lambda=Lam, Mcomplex=M, Mprime=Mprime,
        a_hat=a_hat, b_hat=b_hat, B_hat=lc_B_hat.to_complex(),
        a=a_hat, b=b, B=lc_B.to_complex(), theta=wrap_phase(lc_B.phase), k=k,
        log_B_hat=lc_B_hat, log_B=lc_B,
    )


def duplicate_gamma_factor(data: SelbergData, j: int) -> SelbergData:
    """Split factor ``j`` (0-based) with the duplication formula.

    ``Gamma(lam s + mu)`` becomes ``Gamma(lam s/2 + mu/2) Gamma(lam s/2 + mu/2 + 1/2)``;
    the ``2^(lam s)`` growth is absorbed into ``Q`` and the constant
    ``2^(mu-1)/sqrt(pi)`` is dropped.
    """
    if not -len(data.factors) <= j < len(data.factors):
        raise IndexError(f"factor index {j} out of range for {len(data.factors)} factors")
    j %= len(data.factors)
    g = data.factors[j]
    pair = (GammaFactor(g.lam / 2, g.mu / 2), GammaFactor(g.lam / 2, g.mu / 2 + 0.5))
    factors = data.factors[:j] + pair + data.factors[j + 1:]
    return replace(data, factors=factors, Q=data.Q * 2.0 ** g.lam)


# ---------------------------------------------------------------------------
# JSON schema
# ---------------------------------------------------------------------------

def _parse_complex(value, what: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        return complex(value[0], value[1])
    raise ValueError(f"{what}: expected a number or [re, im], got {value!r}")


def _complex_json(z: complex) -> list[float]:
    return [z.real, z.imag]


def data_from_dict(obj: dict) -> SelbergData:
    """Parse the JSON form; raises ``ValueError`` naming the offending field."""
    if not isinstance(obj, dict):
        raise ValueError("L-function config must be a JSON object")
    for key in ("m", "epsilon", "Q", "factors", "coefficients"):
        if key not in obj:
            raise ValueError(f"{key}: missing required field")
    m = obj["m"]
    if not isinstance(m, int) or isinstance(m, bool):
        raise ValueError(f"m: expected an integer, got {m!r}")
    eps = _parse_complex(obj["epsilon"], "epsilon")
    Q = obj["Q"]
    if not isinstance(Q, (int, float)) or isinstance(Q, bool):
        raise ValueError(f"Q: expected a number, got {Q!r}")
    if not isinstance(obj["factors"], list):
        raise ValueError("factors: expected a list")
    factors = []
    for j, f in enumerate(obj["factors"]):
        if not isinstance(f, dict) or "lambda" not in f:
            raise ValueError(f"factors[{j}]: expected an object with 'lambda' and 'mu'")
        lam = f["lambda"]
        if not isinstance(lam, (int, float)) or isinstance(lam, bool):
            raise ValueError(f"factors[{j}].lambda: expected a number, got {lam!r}")
        factors.append(GammaFactor(lam, _parse_complex(f.get("mu", 0), f"factors[{j}].mu")))
    c = obj["coefficients"]
    if not isinstance(c, dict):
        raise ValueError("coefficients: expected an object with 'builtin' or 'list'")
    if "builtin" in c:
        name = c["builtin"]
        if name == "delta":
            coeffs = DirichletCoefficients(values=delta_coefficients())
        elif name in BUILTIN_RULES:
            coeffs = DirichletCoefficients(builtin=name)
        else:
            raise ValueError(f"coefficients.builtin: unknown rule {name!r}")
    elif "list" in c:
        if not isinstance(c["list"], list):
            raise ValueError("coefficients.list: expected a list")
        coeffs = DirichletCoefficients(
            values=tuple(_parse_complex(v, f"coefficients.list[{i}]") for i, v in enumerate(c["list"]))
        )
    else:
        raise ValueError("coefficients: expected key 'builtin' or 'list'")
    return SelbergData(m=m, epsilon=eps, Q=float(Q), factors=tuple(factors),
                       coefficients=coeffs, name=str(obj.get("name", "")))


def data_to_dict(data: SelbergData) -> dict:
    c = data.coefficients
    if c.builtin is not None:
        coeffs = {"builtin": c.builtin}
    else:
        coeffs = {"list": [v.real if v.imag == 0 else _complex_json(v) for v in c.values]}
    return {
        "name": data.name,
        "m": data.m,
        "epsilon": _complex_json(data.epsilon),
        "Q": data.Q,
        "factors": [{"lambda": g.lam, "mu": _complex_json(g.mu)} for g in data.factors],
        "coefficients": coeffs,
    }


def load_data(path: str | Path) -> SelbergData:
    with open(path) as fh:
        return data_from_dict(json.load(fh))


def constants_to_dict(c: DerivedConstants) -> dict:
    """JSON-ready view with magnitudes in linear and log form."""

    def cplx(z: complex, lc: LogComplex | None = None) -> dict:
        lc = lc or LogComplex.from_complex(z)
        return {"re": z.real, "im": z.imag, "abs": abs(z), "log_abs": lc.log_abs, "arg": lc.phase}

    return {
        "k": c.k,
        "Lambda": c.Lambda,
        "M": {"re": c.Mcomplex.real, "im": c.Mcomplex.imag},
        "Mprime": c.Mprime,
        "a_hat": c.a_hat,
        "log_a_hat": math.log(c.a_hat),
        "b_hat": {"re": c.b_hat.real, "im": c.b_hat.imag},
        "B_hat": cplx(c.B_hat, c.log_B_hat),
        "a": c.a,
        "log_a": math.log(c.a),
        "b": c.b,
        "B": cplx(c.B, c.log_B),
        "theta": c.theta,
    }
