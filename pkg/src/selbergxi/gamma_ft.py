"""Complex Gamma function and Fourier transforms of products of Gamma functions.

Conventions: the transform is ``F(T) = int f(z) exp(-i T z) dz`` over the real
line.  For ``f(z) = (1/4 + z^2)^m prod_j Gamma(alpha_j + i lambda_j z)`` the
leading behaviour for large ``T`` is

    C_{k,m} exp(-Lambda e^{T/Lambda} prod lambda_j^{-lambda_j/Lambda}
                + T (2m + A - (k-1)/2) / Lambda)

with ``Lambda = sum lambda_j`` and ``A = sum alpha_j``.  All transform values
are returned as :class:`LogComplex` because they under/overflow doubles for
moderate ``T``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import mpmath
import numpy as np
from scipy.optimize import brentq
from scipy.special import digamma, polygamma

from .lognum import LogComplex
from .quadrature import QuadratureError, adaptive_panels

LOG_2PI = math.log(2 * math.pi)


class GammaPoleError(ZeroDivisionError):
    pass


# ---------------------------------------------------------------------------
# Gamma
# ---------------------------------------------------------------------------

_LANCZOS_G = 7
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _is_pole(z: complex) -> bool:
    return z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real)


def _lanczos_log(z: complex) -> complex:
    # log Gamma(z) for Re z >= 1/2, modulo 2*pi*i
    z -= 1
    x = _LANCZOS_COEF[0]
    for i in range(1, _LANCZOS_G + 2):
        x += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return 0.5 * LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def complex_gamma(z: complex) -> complex:
    """Gamma(z) by the Lanczos approximation (g=7, 9 terms), reflected for Re z < 1/2."""
    z = complex(z)
    if _is_pole(z):
        raise GammaPoleError(f"Gamma has a pole at {z}")
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * complex_gamma(1 - z))
    return cmath.exp(_lanczos_log(z))


# Bernoulli numbers B_2 .. B_20 for the Stirling series
_STIRLING = tuple(
    b / (2 * k * (2 * k - 1))
    for k, b in enumerate(
        (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510, 43867 / 798, -174611 / 330),
        start=1,
    )
)
_STIRLING_MIN = 15.0


def _stirling_tail(w: np.ndarray) -> np.ndarray:
    inv = 1.0 / w
    inv2 = inv * inv
    acc = np.zeros_like(w)
    for coef in reversed(_STIRLING):
        acc = acc * inv2 + coef
    return acc * inv


def _log1p_complex(u: np.ndarray) -> np.ndarray:
    x, y = u.real, u.imag
    small = np.abs(u) < 0.5
    out = np.log(1 + u)
    re = 0.5 * np.log1p(2 * x + x * x + y * y)
    im = np.arctan2(y, 1 + x)
    return np.where(small, re + 1j * im, out)


def _log_sin_pi(z: np.ndarray) -> np.ndarray:
    # log sin(pi z) without overflow for large |Im z|, modulo 2*pi*i
    upper = z.imag >= 0
    zu = np.where(upper, z, -z)
    # sin(pi z) = e^{-i pi z} (1 - e^{2 i pi z}) * i/2   for Im z >= 0
    val = -1j * np.pi * zu + np.log1p(-np.exp(2j * np.pi * zu) + 0j) + np.log(0.5j)
    # sin is odd: log sin(-pi z) = log sin(pi z) + i pi
    return np.where(upper, val, val + 1j * np.pi)


def complex_loggamma(z) -> np.ndarray | complex:
    """log Gamma(z), vectorized.

    On ``Re z >= 1/2`` this is the principal branch; left of that line the
    reflection formula is used and the result is only correct modulo ``2 pi i``
    (which is all ``exp`` needs).
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty_like(z)
    left = z.real < 0.5
    if np.any(left):
        zl = z[left]
        out[left] = np.log(np.pi) - _log_sin_pi(zl) - _loggamma_right(1 - zl)
    if np.any(~left):
        out[~left] = _loggamma_right(z[~left])
    return complex(out[0]) if scalar else out


def _loggamma_right(z: np.ndarray) -> np.ndarray:
    shift = np.maximum(0, np.ceil(_STIRLING_MIN - z.real)).astype(int)
    acc = np.zeros_like(z)
    for j in range(int(shift.max(initial=0))):
        mask = shift > j
        acc[mask] += np.log(z[mask] + j)
    w = z + shift
    return (w - 0.5) * np.log(w) - w + 0.5 * LOG_2PI + _stirling_tail(w) - acc


def _xlogx_minus(u: np.ndarray) -> np.ndarray:
    # (1+u) log(1+u) - u, series near 0 where the two terms cancel
    u = np.asarray(u, dtype=complex)
    small = np.abs(u) < 0.2
    out = np.empty_like(u)
    if np.any(~small):
        ub = u[~small]
        out[~small] = (1 + ub) * _log1p_complex(ub) - ub
    if np.any(small):
        us = u[small]
        acc = np.zeros_like(us)
        for k in range(28, 1, -1):
            acc = acc * us + (-1) ** k / (k * (k - 1))
        out[small] = acc * us * us
    return out


def _loggamma_curvature(sigma: complex, tau: np.ndarray) -> np.ndarray:
    """``log Gamma(sigma + i tau) - log Gamma(sigma) - i tau log(sigma)`` (mod 2 pi i).

    For large ``|sigma|`` the Stirling form is rearranged as
    ``sigma * [(1+u) log(1+u) - u] - log(1+u)/2 + tail`` with ``u = i tau / sigma``,
    so nothing of size ``tau`` or ``sigma log sigma`` cancels numerically.
    """
    tau = np.asarray(tau, dtype=float)
    sigma = complex(sigma)
    if abs(sigma) >= _STIRLING_MIN and sigma.real > 0:
        u = 1j * tau / sigma
        z = sigma + 1j * tau
        return (sigma * _xlogx_minus(u) - 0.5 * _log1p_complex(u)
                + _stirling_tail(z) - _stirling_tail(np.full(tau.shape, sigma)))
    return complex_loggamma(sigma + 1j * tau) - complex_loggamma(sigma) - 1j * tau * cmath.log(sigma)


def loggamma_shift_diff(sigma: complex, tau: np.ndarray) -> np.ndarray:
    """``log Gamma(sigma + i tau) - log Gamma(sigma)`` (mod 2 pi i), accurate for huge sigma."""
    tau = np.asarray(tau, dtype=float)
    return _loggamma_curvature(sigma, tau) + 1j * tau * cmath.log(complex(sigma))


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GammaProductSpec:
    """``(1/4 + z^2)^m prod_j Gamma(alpha_j + i lambda_j z)``."""

    factors: tuple[tuple[float, complex], ...]
    m: int = 0

    def __post_init__(self):
        factors = tuple((float(l), complex(a)) for l, a in self.factors)
        if not factors:
            raise ValueError("at least one Gamma factor is required")
        for l, a in factors:
            if not l > 0:
                raise ValueError(f"lambda must be positive, got {l}")
            if not a.real > 0:
                raise ValueError(f"Re(alpha) must be positive, got {a}")
        if not isinstance(self.m, int) or self.m < 0:
            raise ValueError(f"m must be a nonnegative integer, got {self.m!r}")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def of(cls, lambdas: Sequence[float], alphas: Sequence[complex], m: int = 0) -> "GammaProductSpec":
        if len(lambdas) != len(alphas):
            raise ValueError("lambdas and alphas differ in length")
        return cls(tuple(zip(lambdas, alphas)), m)

    @property
    def k(self) -> int:
        return len(self.factors)

    @property
    def Lambda(self) -> float:
        return math.fsum(l for l, _ in self.factors)

    @property
    def A(self) -> complex:
        return sum((a for _, a in self.factors), 0j)

    def log_lambda_product(self) -> float:
        """log of prod lambda_j^(-lambda_j / Lambda)."""
        return -math.fsum(l * math.log(l) for l, _ in self.factors) / self.Lambda


def ft_single_gamma(lam: float, alpha: complex, T: float) -> LogComplex:
    """Exact transform of Gamma(alpha + i lam z): (2 pi/lam) exp(-e^{T/lam} + T alpha/lam)."""
    if not lam > 0 or not complex(alpha).real > 0:
        raise ValueError("need lam > 0 and Re(alpha) > 0")
    alpha = complex(alpha)
    with mpmath.workdps(30):
        dominant = float(mpmath.exp(mpmath.mpf(T) / mpmath.mpf(lam)))
    return LogComplex.from_log(LOG_2PI - math.log(lam) - dominant + T * alpha / lam)


def _log_prefactor(spec: GammaProductSpec, m: int) -> complex:
    k, Lam, A = spec.k, spec.Lambda, spec.A
    out = complex(0.0, math.pi * m) + 0.5 * (k + 1) * LOG_2PI - 0.5 * math.log(Lam)
    for l, a in spec.factors:
        out += (-0.5 + a + l * (0.5 * (k - 1) - A - 2 * m) / Lam) * math.log(l)
    return out


def prefactor_Ck(spec: GammaProductSpec) -> LogComplex:
    """C_k = (2pi)^{(k+1)/2} Lambda^{-1/2} prod lambda_j^{-1/2 + alpha_j + lambda_j((k-1)/2 - A)/Lambda}."""
    return LogComplex.from_log(_log_prefactor(spec, 0))


def prefactor_Ckm(spec: GammaProductSpec) -> LogComplex:
    """C_{k,m}: C_k times (-1)^m prod lambda_j^{-2 m lambda_j / Lambda}."""
    return LogComplex.from_log(_log_prefactor(spec, spec.m))


def _log_exponent(spec: GammaProductSpec, T: float, m: int) -> complex:
    Lam = spec.Lambda
    # e^{T/Lambda} is huge for large T; evaluate it in extended precision so the
    # rounding of T/Lambda is not amplified
    with mpmath.workdps(30):
        dominant = float(mpmath.exp(mpmath.mpf(T) / mpmath.mpf(Lam)
                                    + mpmath.log(Lam) + spec.log_lambda_product()))
    return -dominant + T * (2 * m + spec.A - 0.5 * (spec.k - 1)) / Lam


def ft_product_asymptotic(spec: GammaProductSpec, T: float) -> LogComplex:
    """Leading term of the transform of a plain Gamma product (``spec.m`` must be 0)."""
    if spec.m != 0:
        raise ValueError("ft_product_asymptotic takes m = 0; use ft_product_poly_asymptotic")
    return LogComplex.from_log(_log_prefactor(spec, 0) + _log_exponent(spec, T, 0))


def ft_product_poly_asymptotic(spec: GammaProductSpec, T: float) -> LogComplex:
    """Leading term of the transform including the (1/4 + z^2)^m factor."""
    return LogComplex.from_log(_log_prefactor(spec, spec.m) + _log_exponent(spec, T, spec.m))


# ---------------------------------------------------------------------------
# quadrature oracle
# ---------------------------------------------------------------------------

def contour_shift(spec: GammaProductSpec, T: float) -> float:
    """Depth c of the line Im z = -c through the saddle of prod Gamma(alpha_j + lambda_j c) e^{-T c}.

    Moving the contour down crosses no poles (they sit at Im z > 0); ``c`` is
    kept at least half-way away from the nearest pole in the other direction.
    """
    re_alpha = [(l, a.real) for l, a in spec.factors]
    c_min = -0.5 * min(ar / l for l, ar in re_alpha)

    def h(c):
        return math.fsum(l * float(digamma(ar + l * c)) for l, ar in re_alpha) - T

    if h(c_min) >= 0:
        c = c_min
    else:
        hi = 1.0
        while h(hi) < 0:
            hi *= 2.0
        c = brentq(h, c_min, hi, xtol=1e-14, rtol=1e-15, maxiter=500)
    if spec.m and abs(c - 0.5) < 0.05:
        # keep the zero of (1/4 + z^2) off the contour
        c = 0.55
    return c


def ft_quadrature_oracle(
    spec: GammaProductSpec,
    T: float,
    tol: float = 1e-12,
    max_doublings: int = 10,
) -> LogComplex:
    """Direct numerical transform of ``(1/4+z^2)^m prod Gamma(alpha_j + i lambda_j z)`` at ``T``.

    The integral is taken along ``z = t - i c`` with ``c`` from :func:`contour_shift`
    so that the integrand has no cancellation, then by Gauss-Legendre panels
    doubled until successive estimates agree to ``tol``.  Every term of size
    ``sigma log sigma`` (and the linear phase) is gathered into scalars that are
    evaluated in extended precision; the integrand itself only carries O(1)
    quantities.

    Raises
    ------
    QuadratureError
        Refinement did not converge, or the integrand failed to decay.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    T = float(T)
    c = contour_shift(spec, T)
    m = spec.m
    with mpmath.workdps(40):
        mc = mpmath.mpf(c)
        msig = [mpmath.mpc(a.real, a.imag) + mpmath.mpf(l) * mc for l, a in spec.factors]
        # t-coefficient of the phase: sum lambda_j log sigma_j - T
        slope = complex(sum((mpmath.mpf(l) * mpmath.log(s) for (l, _), s in zip(spec.factors, msig)),
                            mpmath.mpc(0)) - mpmath.mpf(T))
        base = -mpmath.mpf(T) * mc + sum((mpmath.loggamma(s) for s in msig), mpmath.mpc(0))
        if m:
            p0 = mpmath.mpf(0.25) - mc * mc
            base += m * mpmath.log(mpmath.mpc(p0))
    sigmas = [(l, complex(s)) for (l, _), s in zip(spec.factors, msig)]
    p0f = 0.25 - c * c

    def G(t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = 1j * slope * t
        for l, s in sigmas:
            out = out + _loggamma_curvature(s, l * t)
        if m:
            # log(1/4 + (t - ic)^2) - log(1/4 - c^2)
            out = out + m * _log1p_complex((t * t - 2j * c * t) / p0f + 0j)
        return out

    # width of the central bump along the contour
    curv = math.fsum(l * l * float(polygamma(1, max(s.real, 1e-3))) for l, s in sigmas)
    s_width = 1.0 / math.sqrt(curv)
    grid = s_width * np.geomspace(1e-2, 1e7, 400)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        g_pos = np.nan_to_num(G(grid).real, nan=-np.inf)
        g_neg = np.nan_to_num(G(-grid).real, nan=-np.inf)
    ref = max(0.0, float(np.max(g_pos)), float(np.max(g_neg)))
    drop = math.log(1.0 / tol) + 30.0

    def edge(vals):
        above = np.nonzero(vals > ref - drop)[0]
        if len(above) == 0:
            return grid[0]
        last = above[-1]
        if last + 1 >= len(grid):
            raise QuadratureError("integrand does not decay along the contour", ())
        return grid[last + 1]

    t_lo, t_hi = -edge(g_neg), edge(g_pos)
    panels = int(min(4096, max(8, math.ceil((t_hi - t_lo) / s_width))))

    def integrand(t):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            v = np.exp(G(t) - ref)
        return np.nan_to_num(v)

    integral = adaptive_panels(integrand, t_lo, t_hi, tol, initial_panels=panels,
                               max_doublings=max_doublings)
    if integral == 0:
        raise QuadratureError("integral vanished to working precision", (integral,))
    with mpmath.workdps(40):
        total = base + ref + mpmath.log(mpmath.mpc(integral.real, integral.imag))
        phase = float(mpmath.fmod(mpmath.im(total), 2 * mpmath.pi))
        return LogComplex.from_log(complex(float(mpmath.re(total)), phase))


def ft_relative_error(spec: GammaProductSpec, T: float, tol: float = 1e-13) -> float:
    """``|oracle/asymptotic - 1|`` at ``T`` (the polynomial factor included when m > 0)."""
    return ft_quadrature_oracle(spec, T, tol).rel_error(ft_product_poly_asymptotic(spec, T))


__all__ = [
    "GammaPoleError", "GammaProductSpec", "QuadratureError", "complex_gamma", "complex_loggamma",
    "loggamma_shift_diff", "ft_single_gamma", "prefactor_Ck", "prefactor_Ckm", "ft_product_asymptotic",
    "ft_product_poly_asymptotic", "ft_quadrature_oracle", "contour_shift", "ft_relative_error",
]
