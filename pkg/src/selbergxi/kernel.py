"""Fourier kernels of the Xi-function in canonical coordinates.

The kernel ``kappa`` is fixed by

    Xi_F((z - M') / Lambda) = B * int kappa(x) e^{ixz} dx,
    kappa(x) * exp(a e^x - b x) -> 1   as x -> +inf,

with ``a, b, B, M', Lambda`` from :func:`derive_constants`.  Three constructions
are offered:

``asymptotic``
    the leading term ``exp(-a e^x + b x)``; needs no coefficient data.
``zeta_theta``
    the exact theta series of the Riemann Xi-function (zeta only).
``numeric_series``
    the exact transform summed over Dirichlet coefficients, each term being a
    Gamma-product transform computed by quadrature.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .gamma_ft import GammaProductSpec, ft_product_poly_asymptotic, ft_quadrature_oracle
from .lognum import LogComplex, SignedLogReal, logsumexp_complex, wrap_phase
from .selberg_core import DerivedConstants, InsufficientCoefficientsError, SelbergData

ASYMPTOTIC = "asymptotic"
ZETA_THETA = "zeta_theta"
NUMERIC_SERIES = "numeric_series"
VARIANTS = (ASYMPTOTIC, ZETA_THETA, NUMERIC_SERIES)


class KernelError(ValueError):
    pass


@dataclass(frozen=True)
class KernelSpec:
    variant: str
    constants: DerivedConstants
    data: SelbergData | None = None
    series_tol: float = 1e-12

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise KernelError(f"unknown kernel variant {self.variant!r}")
        if self.variant == ZETA_THETA and (self.data is None or self.data.name != "zeta"
                                          or self.data.coefficients.builtin != "zeta"):
            raise KernelError("the theta-series kernel exists only for the built-in zeta data")
        if self.variant == NUMERIC_SERIES and self.data is None:
            raise KernelError("the numeric-series kernel needs the L-function data")
        if not self.series_tol > 0:
            raise KernelError("series_tol must be positive")


# ---------------------------------------------------------------------------
# asymptotic kernel
# ---------------------------------------------------------------------------

def asym_kernel(constants: DerivedConstants, x: float) -> SignedLogReal:
    """``exp(-a e^x + b x)`` as a :class:`SignedLogReal`."""
    return SignedLogReal(-constants.a * math.exp(x) + constants.b * x, 1)


# ---------------------------------------------------------------------------
# theta series for zeta
# ---------------------------------------------------------------------------

def _log_theta_nonneg(u: np.ndarray, tol: float) -> np.ndarray:
    # phi(u) = sum_n 2 pi n^2 e^{5u/2} (2 n^2 q - 3) e^{-n^2 q},  q = pi e^{2u};
    # every term is positive for u >= 0.
    q = np.pi * np.exp(2 * u)
    log_pref = math.log(2 * math.pi) + 2.5 * u
    logs = [log_pref + np.log(2 * q - 3) - q]
    lead = logs[0]
    n = 1
    while True:
        n += 1
        ln = log_pref + 2 * math.log(n) + np.log(2 * n * n * q - 3) - n * n * q
        logs.append(ln)
        # first neglected term, with a factor 2 margin, below tol of the sum
        nxt = n + 1
        bound = log_pref + 2 * math.log(nxt) + np.log(2 * nxt * nxt * q) - nxt * nxt * q + math.log(2)
        if np.all(bound < lead + math.log(tol)):
            break
    stack = np.vstack(logs)
    top = stack.max(axis=0)
    return top + np.log(np.exp(stack - top).sum(axis=0))


def _theta_direct(u: float, tol: float) -> float:
    # plain summation, valid for negative u too (terms change sign there)
    q = math.pi * math.exp(2 * u)
    total = 0.0
    n = 0
    while True:
        n += 1
        t = 2 * math.pi * n * n * math.exp(2.5 * u) * (2 * n * n * q - 3) * math.exp(-n * n * q)
        total += t
        if 2 * n * n * q > 3 + 5 and abs(t) * 2 < tol * abs(total):
            return total
        if n > 100000:
            raise KernelError(f"theta series did not converge at u={u}")


def zeta_theta_kernel(x: float, tol: float = 1e-15, direct: bool = False) -> float:
    """Theta-series kernel ``phi(x) = 2 sum (2 n^4 pi^2 e^{9x/2} - 3 n^2 pi e^{5x/2}) e^{-n^2 pi e^{2x}}``.

    Negative ``x`` goes through ``phi(x) = phi(-x)`` unless ``direct`` is set.
    """
    if direct:
        return _theta_direct(float(x), tol)
    u = abs(float(x))
    return math.exp(float(_log_theta_nonneg(np.array([u]), tol)[0]))


def log_zeta_theta(x, tol: float = 1e-15) -> np.ndarray:
    """``log phi(x)`` for an array of ``x`` (symmetric in x)."""
    return _log_theta_nonneg(np.abs(np.asarray(x, dtype=float)), tol)


# ---------------------------------------------------------------------------
# numeric series from the Dirichlet coefficients
# ---------------------------------------------------------------------------

def _product_spec(data: SelbergData) -> GammaProductSpec:
    return GammaProductSpec(tuple((g.lam, g.mu + 0.5 * g.lam) for g in data.factors), data.m)


def xihat_series(data: SelbergData, x: float, tol: float = 1e-12, quad_tol: float = 1e-13) -> LogComplex:
    """Fourier transform ``int Xi_F(z) e^{-ixz} dz`` summed term by term over a_n.

    Term n is ``eps Q^{1/2} a_n n^{-1/2}`` times the transform of
    ``(1/4+z^2)^m prod Gamma(i lambda_j z + mu_j + lambda_j/2)`` at
    ``T_n = x + log n - log Q``.  Summation stops once the coefficient-free term
    size times ``n`` (covering ``|a_n| <= n``) has started to decrease and falls
    below ``tol`` of the running sum.

    Raises
    ------
    InsufficientCoefficientsError
        The explicit coefficient list ran out first; ``required`` estimates
        the length needed.
    """
    spec = _product_spec(data)
    eps = data.epsilon / abs(data.epsilon)
    prefix = cmath.log(eps) + 0.5 * math.log(data.Q)
    lnQ = math.log(data.Q)
    logs = []
    prev_size = math.inf
    n = 0
    while True:
        n += 1
        T = x + math.log(n) - lnQ
        try:
            a_n = data.coefficients[n]
        except InsufficientCoefficientsError:
            raise InsufficientCoefficientsError(
                _required_terms(spec, x, lnQ, n, logsumexp_complex(logs).real, tol),
                n - 1) from None
        I = ft_quadrature_oracle(spec, T, quad_tol)
        size = I.log_abs - 0.5 * math.log(n) + math.log(n)
        if a_n != 0:
            logs.append(prefix + cmath.log(a_n) - 0.5 * math.log(n) + I.log)
        total = logsumexp_complex(logs)
        if n >= 2 and size < prev_size and size + prefix.real < total.real + math.log(tol):
            return LogComplex.from_log(total)
        prev_size = size


def _required_terms(spec, x, lnQ, n, log_total, tol) -> int:
    # continue with the cheap leading-order sizes to estimate the cutoff
    prev = math.inf
    while n < 10 ** 7:
        size = ft_product_poly_asymptotic(spec, x + math.log(n) - lnQ).log_abs + 0.5 * math.log(n)
        if size < prev and size < log_total + math.log(tol):
            return n
        prev = size
        n += 1
    return n


# ---------------------------------------------------------------------------
# canonical kernel
# ---------------------------------------------------------------------------

def _series_log_kernel(spec: KernelSpec, x: float) -> complex:
    c = spec.constants
    if x < 0:
        # B kappa(x) = conj(B) kappa(-x)
        return _series_log_kernel(spec, -x) + 2j * c.theta
    xh = xihat_series(spec.data, c.Lambda * x, spec.series_tol)
    return xh.log + math.log(c.Lambda) - 1j * x * c.Mprime - math.log(2 * math.pi) - c.log_B.log


def log_kernel(spec: KernelSpec, x) -> np.ndarray:
    """Complex ``log kappa(x)`` for an array of ``x`` (imaginary part is the phase)."""
    x = np.asarray(x, dtype=float)
    c = spec.constants
    if spec.variant == ASYMPTOTIC:
        return (-c.a * np.exp(x) + c.b * x).astype(complex)
    if spec.variant == ZETA_THETA:
        # Xi_F(2z) = -2 Xi_classical(2z) = -int phi(x/2) e^{ixz} dx
        return log_zeta_theta(0.5 * x) + 1j * math.pi - c.log_B.log
    flat = np.array([_series_log_kernel(spec, float(v)) for v in x.ravel()], dtype=complex)
    return flat.reshape(x.shape)


def canonical_kernel(spec: KernelSpec, x: float) -> LogComplex:
    """``kappa(x)`` in canonical coordinates, normalized so ``kappa e^{a e^x - b x} -> 1``."""
    return LogComplex.from_log(complex(log_kernel(spec, np.array([float(x)]))[0]))


def kernel_dump_rows(spec: KernelSpec, xs) -> list[tuple[float, float, float, str]]:
    """Rows ``(x, log_abs, phase, variant)`` for the kernel dump CSV."""
    logs = log_kernel(spec, np.asarray(xs, dtype=float))
    return [(float(x), float(l.real), wrap_phase(float(l.imag)), spec.variant) for x, l in zip(xs, logs)]
