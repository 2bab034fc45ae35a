"""High derivatives of the Xi-function through its Fourier kernel.

With the kernel ``kappa`` of :mod:`selbergxi.kernel`,

    Xi_F((z - M')/Lambda) = int_0^inf kappa(x) (B e^{ixz} + conj(B) e^{-ixz}) dx,

so the 2n-th derivative is an integral of ``kappa(x) x^{2n}``.  After the change
of variables ``x -> w_n x`` (``a w e^w = b w + 2n``) the integrand peaks at
``x = 1``, and

    A_n Xi_F^{(2n)}(C_n z - M'/Lambda) = Re(B K_n(z)) / |B|,
    K_n(z) = int_0^inf v_n kappa(w_n x) x^{2n} e^{ixz} dx,

which tends to ``cos(z + arg B)``.  ``A_n`` and ``v_n`` are astronomically large,
so they are kept as :class:`SignedLogReal` and the normalized quantity is
computed directly with the peak value divided out.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import bisect, brentq, minimize_scalar

from .kernel import ASYMPTOTIC, KernelSpec, log_kernel
from .lognum import SignedLogReal
from .quadrature import panel_rule
from .selberg_core import DerivedConstants

log = logging.getLogger(__name__)

WINDOW_NATS = 45.0
NODES_PER_PANEL = 32


class WnConvergenceError(ArithmeticError):
    def __init__(self, message: str, history: Sequence[float]):
        self.history = list(history)
        super().__init__(f"{message}; iterates {self.history[-5:]!r}")


# ---------------------------------------------------------------------------
# scaling sequences
# ---------------------------------------------------------------------------

def wn_initial_guess(a: float, n: int) -> float:
    L = math.log(2 * n / a)
    if L <= math.e:
        return max(1.0, L)
    return max(1.0, L - math.log(L))


def solve_wn(a: float, b: float, n: int, max_iter: int = 100) -> float:
    """Positive root of ``a w e^w = b w + 2n`` by Newton's method."""
    if not a > 0:
        raise ValueError("a must be positive")
    if n < 1:
        raise ValueError("n must be a positive integer")
    target = 2.0 * n
    w = wn_initial_guess(a, n)
    history = [w]
    for _ in range(max_iter):
        ew = math.exp(w)
        g = a * w * ew - b * w - target
        dg = a * ew * (1 + w) - b
        if dg <= 0:
            # left of the turning point: step right until g is increasing
            w = w + 1.0
            history.append(w)
            continue
        step = g / dg
        w_new = w - step
        if w_new <= 0:
            w_new = 0.5 * w
        w = w_new
        history.append(w)
        if abs(step) <= 4e-16 * max(1.0, w):
            break
    g = a * w * math.exp(w) - b * w - target
    if not abs(g) < 1e-12 * target:
        # Newton has hit rounding; polish with a bracketing solver
        try:
            w = brentq(lambda v: a * v * math.exp(v) - b * v - target, 0.5 * w, 2.0 * w + 1,
                       xtol=1e-15, rtol=4.5e-16)
        except ValueError:
            raise WnConvergenceError("w_n iteration did not converge", history) from None
        g = a * w * math.exp(w) - b * w - target
        if not abs(g) < 1e-10 * target:
            raise WnConvergenceError("w_n iteration did not converge", history)
    return w


@dataclass(frozen=True)
class ScalingSequence:
    n: int
    w_n: float
    A_n: SignedLogReal
    C_n: float
    v_n: SignedLogReal
    residual: float


def scaling_sequence(constants: DerivedConstants, n: int) -> ScalingSequence:
    a, b, Lam = constants.a, constants.b, constants.Lambda
    w = solve_wn(a, b, n)
    ew_a = a * math.exp(w)
    log_v = ew_a - b * w + 0.5 * math.log(n * w / math.pi)
    log_A = (ew_a - b * w + 0.5 * math.log(n) - math.log(2) - math.log(constants.abs_B)
             - 2 * n * math.log(Lam) - (2 * n + 0.5) * math.log(w) - 0.5 * math.log(math.pi))
    return ScalingSequence(
        n=n, w_n=w,
        A_n=SignedLogReal(log_A, -1 if n % 2 else 1),
        C_n=1.0 / (Lam * w),
        v_n=SignedLogReal(log_v, 1),
        residual=a * w * math.exp(w) - b * w - 2 * n,
    )


def log_An_asymptotic(constants: DerivedConstants, n: int) -> float:
    """``2n(1 - log Lambda - log w) - a e^w (w - 1) + log(n)/2 - log(w)/2`` (the O(1) dropped)."""
    w = solve_wn(constants.a, constants.b, n)
    return (2 * n * (1 - math.log(constants.Lambda) - math.log(w))
            - constants.a * math.exp(w) * (w - 1) + 0.5 * math.log(n) - 0.5 * math.log(w))


# ---------------------------------------------------------------------------
# the scaled integral
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Window:
    x_peak: float
    log_peak: float
    x_lo: float
    x_hi: float
    width: float  # Gaussian width of the bump


def _log_integrand(spec: KernelSpec, n: int, w: float, log_v: float, x: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return log_v + log_kernel(spec, w * x) + 2 * n * np.log(x)


def _window(spec: KernelSpec, n: int, w: float, log_v: float, nats: float) -> _Window:
    def E(x):
        return float(_log_integrand(spec, n, w, log_v, np.array([x]))[0].real)

    if spec.variant == ASYMPTOTIC:
        x_peak = 1.0
    else:
        res = minimize_scalar(lambda x: -E(x), bounds=(0.5, 1.5), method="bounded",
                              options={"xatol": 1e-10})
        x_peak = float(res.x)
    peak = E(x_peak)
    target = peak - nats

    lo = x_peak
    while E(lo) > target:
        lo *= 0.5
    x_lo = brentq(lambda x: E(x) - target, lo, x_peak, xtol=1e-12)
    hi = x_peak
    while E(hi) > target:
        hi = hi + (hi - x_peak) + 0.05
    x_hi = brentq(lambda x: E(x) - target, x_peak, hi, xtol=1e-12)
    h = 1e-4
    curv = -(E(x_peak + h) - 2 * peak + E(x_peak - h)) / (h * h)
    width = 1.0 / math.sqrt(curv) if curv > 0 else (x_hi - x_lo)
    return _Window(x_peak, peak, x_lo, x_hi, width)


def _panel_count(win: _Window, zr: float) -> int:
    length = win.x_hi - win.x_lo
    by_bump = math.ceil(length / (2.0 * win.width))
    # oscillation advances by less than pi/2 per panel
    by_phase = math.ceil(length * abs(zr) / (0.5 * math.pi))
    return max(4, by_bump, by_phase)


def ki_integral(spec: KernelSpec, n: int, z, window: float = WINDOW_NATS):
    """``K_n(z) = int_0^inf v_n kappa(w_n x) x^{2n} e^{ixz} dx`` for scalar or array ``z``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    c = spec.constants
    seq = scaling_sequence(c, n)
    log_v = seq.v_n.log_abs
    win = _window(spec, n, seq.w_n, log_v, window)

    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty(zs.shape, dtype=complex)
    counts = np.array([_panel_count(win, float(v.real)) for v in zs.ravel()])
    for count in np.unique(counts):
        sel = np.nonzero(counts == count)[0]
        xs, ws = panel_rule(win.x_lo, win.x_hi, int(count), NODES_PER_PANEL)
        E = _log_integrand(spec, n, seq.w_n, log_v, xs) - win.log_peak
        weights = ws * np.exp(E)
        osc = np.exp(1j * np.outer(zs.ravel()[sel], xs))
        # row-wise sums do not depend on which other z share the batch
        out.ravel()[sel] = (osc * weights).sum(axis=1)
    out *= math.exp(win.log_peak)
    return complex(out[0]) if np.ndim(z) == 0 else out.reshape(np.shape(z))


def peak_location(spec: KernelSpec, n: int) -> float:
    """Maximizer of the scaled log-integrand; equals 1 for the asymptotic kernel."""
    seq = scaling_sequence(spec.constants, n)

    def negE(x):
        return -float(_log_integrand(spec, n, seq.w_n, seq.v_n.log_abs, np.array([x]))[0].real)

    res = minimize_scalar(negE, bounds=(0.5, 1.5), method="bounded", options={"xatol": 1e-12})
    return float(res.x)


def normalized_derivative(spec: KernelSpec, n: int, z, window: float = WINDOW_NATS):
    """``D_n(z) = Re(B K_n(z)) / |B|``, i.e. ``A_n Xi_F^{(2n)}(C_n z - M'/Lambda)``."""
    K = ki_integral(spec, n, z, window)
    rot = np.exp(1j * spec.constants.theta)
    return np.real(rot * K) if np.ndim(z) else float((rot * K).real)


def xi_canonical(spec: KernelSpec, z, window: float = WINDOW_NATS):
    """``Xi_F((z - M')/Lambda)`` for real ``z`` via ``int_0^inf kappa (B e^{ixz} + conj(B) e^{-ixz})``.

    This is the unnormalized n = 0 curve; only meaningful with an exact kernel
    near ``x = 0``.
    """
    c = spec.constants
    zs = np.atleast_1d(np.asarray(z, dtype=float))

    def E(x):
        return float(log_kernel(spec, np.array([x]))[0].real)

    # kernel is maximal near the origin for the exact kernels; find where it is negligible
    top = max(E(0.0), E(min(1.0, math.log(max(c.b, 1e-300) / c.a)) if c.b > c.a else 0.0))
    x_hi = 1.0
    while E(x_hi) > top - window:
        x_hi *= 1.5
    zmax = float(np.max(np.abs(zs))) if zs.size else 0.0
    panels = max(8, math.ceil(x_hi / 0.25), math.ceil(x_hi * zmax / (0.5 * math.pi)))
    xs, ws = panel_rule(0.0, x_hi, panels, NODES_PER_PANEL)
    kap = ws * np.exp(log_kernel(spec, xs))
    f = (np.exp(1j * np.outer(zs, xs)) * kap).sum(axis=1)
    vals = 2.0 * np.real(c.B * f)
    return float(vals[0]) if np.ndim(z) == 0 else vals


# ---------------------------------------------------------------------------
# convergence and zeros
# ---------------------------------------------------------------------------

@dataclass
class ConvergenceReport:
    entries: list[tuple[int, float, float, float]] = field(default_factory=list)
    fitted_slope: float | None = None
    spacing_stats: list[tuple[int, float]] = field(default_factory=list)


def default_z_grid(points: int = 65) -> np.ndarray:
    return np.linspace(-math.pi, math.pi, points)


def _errors_for(spec: KernelSpec, n: int, grid: np.ndarray) -> tuple[float, float]:
    theta = spec.constants.theta
    D = normalized_derivative(spec, n, grid)
    sup = float(np.max(np.abs(D - np.cos(grid + theta))))
    at0 = abs(normalized_derivative(spec, n, 0.0) - math.cos(theta))
    return sup, at0


def convergence_report(
    spec: KernelSpec,
    ns: Sequence[int],
    z_grid=None,
    spacing_interval: tuple[float, float] | None = None,
    workers: int = 1,
) -> ConvergenceReport:
    """Sup-error of ``D_n`` against ``cos(z + theta)`` per n, and the slope of
    ``log sup_error`` against ``log w_n``."""
    ns = list(ns)
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("ns must be strictly increasing")
    grid = default_z_grid() if z_grid is None else np.asarray(z_grid, dtype=float)

    def one(n):
        sup, at0 = _errors_for(spec, n, grid)
        return n, solve_wn(spec.constants.a, spec.constants.b, n), sup, at0

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(one, ns))
    else:
        entries = [one(n) for n in ns]
    report = ConvergenceReport(entries=entries)
    if len(entries) >= 2:
        lw = np.log([e[1] for e in entries])
        le = np.log([e[2] for e in entries])
        report.fitted_slope = float(np.polyfit(lw, le, 1)[0])
    if spacing_interval is not None:
        for n in ns:
            sp = zero_spacings(spec, n, spacing_interval)
            dev = max((abs(s - math.pi) / math.pi for s in sp), default=math.nan)
            report.spacing_stats.append((n, dev))
    return report


def find_zeros(f, lo: float, hi: float, step: float = 0.05, xtol: float = 1e-10) -> list[float]:
    """Zeros of a real function on [lo, hi]: sign changes on a grid, then bisection."""
    if not hi > lo:
        return []
    count = max(1, math.ceil((hi - lo) / step))
    grid = np.linspace(lo, hi, count + 1)
    vals = np.asarray(f(grid), dtype=float)
    zeros = []
    for i in range(count):
        fa, fb = vals[i], vals[i + 1]
        if fa == 0:
            if not zeros or abs(zeros[-1] - grid[i]) > xtol:
                zeros.append(float(grid[i]))
            continue
        if fa * fb < 0:
            zeros.append(bisect(lambda t: float(np.asarray(f(t))), grid[i], grid[i + 1], xtol=xtol))
    if vals[-1] == 0 and (not zeros or abs(zeros[-1] - grid[-1]) > xtol):
        zeros.append(float(grid[-1]))
    return zeros


def derivative_zeros(spec: KernelSpec, n: int, interval: tuple[float, float],
                     step: float = 0.05, xtol: float = 1e-10) -> list[float]:
    if n == 0:
        return find_zeros(lambda z: xi_canonical(spec, z), *interval, step=step, xtol=xtol)
    return find_zeros(lambda z: normalized_derivative(spec, n, z), *interval, step=step, xtol=xtol)


def zero_spacings(spec: KernelSpec, n: int, interval: tuple[float, float],
                  step: float = 0.05, xtol: float = 1e-10) -> list[float]:
    """Gaps between consecutive zeros of ``D_n`` on ``interval``; empty if fewer than two."""
    zs = derivative_zeros(spec, n, interval, step, xtol)
    return [b - a for a, b in zip(zs, zs[1:])]
