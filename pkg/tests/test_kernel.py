import math

import mpmath
import numpy as np
import pytest

from selbergxi.deriv_engine import xi_canonical
from selbergxi.gamma_ft import GammaProductSpec, ft_quadrature_oracle
from selbergxi.kernel import (KernelError, KernelSpec, asym_kernel, canonical_kernel, kernel_dump_rows,
                              log_kernel, xihat_series, zeta_theta_kernel)
from selbergxi.lognum import LogComplex
from selbergxi.selberg_core import (DirichletCoefficients, GammaFactor, InsufficientCoefficientsError,
                                    SelbergData, builtin, derive_constants)

ZETA = builtin("zeta")
CZ = derive_constants(ZETA)


def theta_spec():
    return KernelSpec("zeta_theta", CZ, ZETA)


def test_asym_kernel_values():
    assert asym_kernel(CZ, 0.0).log_abs == pytest.approx(-math.pi, rel=1e-15)
    v = asym_kernel(CZ, 2.0)
    assert (v.log_abs, v.sign) == (pytest.approx(-math.pi * math.e ** 2 + 4.5, rel=1e-15), 1)


@pytest.mark.parametrize("name", ["zeta", "chi4", "delta"])
def test_asym_kernel_argmax(name):
    c = derive_constants(builtin(name))
    xs = np.linspace(-3, 4, 70001)
    vals = [asym_kernel(c, x).log_abs for x in xs]
    peak = xs[int(np.argmax(vals))]
    # stationary point a e^x = b; on x >= 0 the kernel is monotone exactly when b <= a
    assert peak == pytest.approx(math.log(c.b / c.a), abs=2e-4)
    pos = np.array(vals)[xs >= 0]
    assert np.all(np.diff(pos) < 0) == (c.b <= c.a)


def test_theta_symmetry():
    assert zeta_theta_kernel(0.7) == zeta_theta_kernel(-0.7)
    # direct summation at negative argument loses digits to cancellation
    direct = zeta_theta_kernel(-0.7, direct=True)
    assert direct == pytest.approx(zeta_theta_kernel(0.7), rel=1e-9)


def test_theta_at_zero_against_resummation():
    with mpmath.workdps(40):
        # reversed order, high precision
        total = mpmath.mpf(0)
        for n in range(12, 0, -1):
            total += 2 * (2 * n ** 4 * mpmath.pi ** 2 - 3 * n ** 2 * mpmath.pi) * mpmath.exp(-n * n * mpmath.pi)
    got = zeta_theta_kernel(0.0)
    assert got > 0
    assert got == pytest.approx(float(total), rel=1e-14)


def test_theta_positive_on_grid():
    # linear values underflow beyond |x| ~ 2.8; the log form covers the rest
    assert all(zeta_theta_kernel(x) > 0 for x in np.linspace(-2.5, 2.5, 101))
    xs = np.linspace(-6, 6, 241)
    assert np.all(np.isfinite(log_kernel(theta_spec(), xs).real))


def test_theta_vs_asym_correction_law():
    asym = KernelSpec("asymptotic", CZ)
    consts = []
    for x in np.arange(3.0, 8.5, 1.0):
        r = canonical_kernel(theta_spec(), x).rel_error(canonical_kernel(asym, x))
        assert r <= math.exp(-x)
        consts.append(r * math.exp(x))
    # C e^{-x} with a stable C (the next theta term is exponentially smaller still)
    assert max(consts) / min(consts) < 1.1


def test_canonical_kernel_examples():
    asym = KernelSpec("asymptotic", CZ)
    v = canonical_kernel(asym, 2.0)
    assert v.log_abs == pytest.approx(-math.pi * math.e ** 2 + 4.5, rel=1e-15) and v.phase == 0.0
    assert canonical_kernel(theta_spec(), 4.0).rel_error(canonical_kernel(asym, 4.0)) < 3 * math.exp(-4)


@pytest.mark.parametrize("x", [0.0, 0.4, 1.0, 2.0, 4.0])
def test_series_kernel_matches_theta(x):
    series = KernelSpec("numeric_series", CZ, ZETA)
    assert canonical_kernel(series, x).rel_error(canonical_kernel(theta_spec(), x)) < 1e-10


def test_series_kernel_negative_x_by_symmetry():
    series = KernelSpec("numeric_series", CZ, ZETA)
    assert canonical_kernel(series, -1.0).rel_error(canonical_kernel(theta_spec(), 1.0)) < 1e-10


def test_xihat_n2_term_negligible_at_10():
    spec = GammaProductSpec(((0.5, 0.25),), 1)
    lnQ = math.log(ZETA.Q)
    t1 = ft_quadrature_oracle(spec, 10 - lnQ)
    t2 = ft_quadrature_oracle(spec, 10 + math.log(2) - lnQ)
    assert t2.log_abs - 0.5 * math.log(2) - t1.log_abs < -1e8


@pytest.mark.parametrize("name", ["zeta", "chi4"])
def test_xihat_series_theorem1(name):
    data = builtin(name)
    c = derive_constants(data)
    x = 8.0
    lead = LogComplex.from_log(c.log_B_hat.log - c.a_hat * math.exp(x / c.Lambda) + c.b_hat * x)
    assert xihat_series(data, x).rel_error(lead) < 5 * math.exp(-x / c.Lambda)


def test_xihat_series_insufficient_coefficients():
    short = SelbergData(0, 1, math.sqrt(4 / math.pi), (GammaFactor(0.5, 0.5),),
                        DirichletCoefficients(values=(1, 0)))
    with pytest.raises(InsufficientCoefficientsError) as exc:
        xihat_series(short, 0.0)
    assert exc.value.available == 2
    assert exc.value.required > 2


def test_inverse_transform_at_origin():
    # Xi_F(0) = -2 Xi(0) = (1/4) pi^{-1/4} Gamma(1/4) zeta(1/2)
    ref = float(0.25 * mpmath.pi ** -0.25 * mpmath.gamma(0.25) * mpmath.zeta(0.5))
    assert xi_canonical(theta_spec(), 0.0) == pytest.approx(ref, rel=1e-10)
    series = KernelSpec("numeric_series", CZ, ZETA)
    # the Dirichlet-series kernel reaches the same number through its own transform
    xs = np.linspace(0.0, 3.0, 7)
    lt = log_kernel(theta_spec(), xs)
    ls = log_kernel(series, xs)
    assert np.max(np.abs(np.exp(ls - lt) - 1)) < 1e-6


def test_kernel_spec_errors():
    chi = builtin("chi4")
    with pytest.raises(KernelError):
        KernelSpec("zeta_theta", derive_constants(chi), chi)
    with pytest.raises(KernelError):
        KernelSpec("numeric_series", CZ)
    with pytest.raises(KernelError):
        KernelSpec("gaussian", CZ)


def test_dump_rows():
    rows = kernel_dump_rows(KernelSpec("asymptotic", CZ), [0.0, 1.0])
    assert rows[0] == (0.0, pytest.approx(-math.pi), 0.0, "asymptotic")
    assert len(rows) == 2
