import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selbergxi.selberg_core import (DirichletCoefficients, GammaFactor, InsufficientCoefficientsError,
                                    SelbergData, ValidationError, builtin, constants_to_dict,
                                    data_from_dict, data_to_dict, derive_constants,
                                    duplicate_gamma_factor, ramanujan_tau, validate)


def test_builtins_validate():
    for name in ("zeta", "chi4", "delta"):
        assert validate(builtin(name)) == []


def test_negative_lambda_reported():
    bad = SelbergData(0, 1, 1.0, (GammaFactor(-1.0, 0),))
    assert any("lambda must be positive" in r for r in validate(bad))


def test_a1_reported():
    bad = SelbergData(0, 1, 1.0, (GammaFactor(0.5, 0),), DirichletCoefficients(values=(2, 1)))
    assert any("a_1 must equal 1" in r for r in validate(bad))


def test_every_violation_reported():
    bad = SelbergData(-1, 2.0, -1.0, (GammaFactor(0.5, -1),), DirichletCoefficients(values=(2,)))
    fields = {r.split(":")[0] for r in validate(bad)}
    assert fields == {"m", "epsilon", "Q", "factors[0].mu", "coefficients"}
    with pytest.raises(ValidationError) as exc:
        derive_constants(bad)
    assert len(exc.value.report) == 5


def test_zeta_constants():
    c = derive_constants(builtin("zeta"))
    assert c.a == pytest.approx(math.pi, abs=1e-12)
    assert c.b == 2.25
    assert (c.Lambda, c.Mcomplex, c.Mprime) == (0.5, 0j, 0.0)
    # -4 pi^2: the classical 2 pi^2 times the factor -2 between the two xi normalizations
    assert c.B.real == pytest.approx(-4 * math.pi ** 2, rel=1e-13)
    assert abs(c.B.imag) < 1e-12 * abs(c.B)
    assert c.theta == math.pi


def test_chi4_and_delta_constants():
    c = derive_constants(builtin("chi4"))
    assert (c.a, c.b, c.Lambda) == (pytest.approx(math.pi / 4, rel=1e-14), pytest.approx(0.75), 0.5)
    d = derive_constants(builtin("delta"))
    assert (d.a, d.b, d.Lambda) == (pytest.approx(2 * math.pi, rel=1e-14), pytest.approx(6.0), 1.0)
    assert d.theta == 0.0 and c.theta == 0.0


def test_ramanujan_tau():
    assert ramanujan_tau(10) == (1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920)


def test_duplicate_zeta_factor():
    d = duplicate_gamma_factor(builtin("zeta"), 0)
    # Gamma(s/2) = 2^{s/2 - 1} pi^{-1/2} Gamma(s/4) Gamma(s/4 + 1/2)
    assert [(g.lam, g.mu) for g in d.factors] == [(0.25, 0), (0.25, 0.5)]
    assert d.Q == pytest.approx(math.pi ** -0.5 * 2 ** 0.5, rel=1e-15)
    with pytest.raises(IndexError):
        duplicate_gamma_factor(builtin("zeta"), 1)


def test_insufficient_coefficients():
    coeffs = DirichletCoefficients(values=(1, 0.5))
    assert coeffs[2] == 0.5
    with pytest.raises(InsufficientCoefficientsError) as exc:
        coeffs[3]
    assert exc.value.available == 2


factor = st.builds(GammaFactor, st.floats(0.1, 3.0), st.complex_numbers(max_magnitude=4).map(
    lambda z: complex(abs(z.real), z.imag)))
data_st = st.builds(SelbergData, st.integers(0, 2), st.floats(-math.pi, math.pi).map(lambda t: complex(math.cos(t), math.sin(t))),
                    st.floats(0.05, 20.0), st.lists(factor, min_size=1, max_size=4).map(tuple))


@settings(max_examples=60, deadline=None)
@given(data_st)
def test_consistency_invariants(data):
    c = derive_constants(data)
    assert c.a == c.a_hat
    lb = c.Lambda * c.b_hat - 1j * c.Mprime
    assert abs(lb.imag) <= 1e-12 * max(1.0, abs(lb))
    assert lb.real == pytest.approx(c.b, rel=1e-12, abs=1e-12)
    assert c.B == pytest.approx(c.B_hat * c.Lambda / (2 * math.pi), rel=1e-12)
    assert -math.pi < c.theta <= math.pi


@settings(max_examples=60, deadline=None)
@given(data_st, st.integers(0, 3))
def test_duplication_invariance(data, j):
    j %= data.k
    c0 = derive_constants(data)
    c1 = derive_constants(duplicate_gamma_factor(data, j))
    assert c1.Lambda == pytest.approx(c0.Lambda, rel=1e-12)
    assert abs(c1.Mcomplex - c0.Mcomplex) <= 1e-12 * max(1.0, abs(c0.Mcomplex))
    assert c1.a == pytest.approx(c0.a, rel=1e-12)
    assert c1.b == pytest.approx(c0.b, rel=1e-12, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(data_st)
def test_a_decreasing_in_Q(data):
    from dataclasses import replace
    assert derive_constants(replace(data, Q=2 * data.Q)).a < derive_constants(data).a


def test_epsilon_renormalized():
    data = SelbergData(0, complex(1 + 5e-13, 0), 1.0, (GammaFactor(0.5, 0.5),))
    assert derive_constants(data).theta == pytest.approx(derive_constants(
        SelbergData(0, 1, 1.0, (GammaFactor(0.5, 0.5),))).theta, abs=1e-15)


def test_json_round_trip(tmp_path):
    for name in ("zeta", "chi4", "delta"):
        data = builtin(name)
        again = data_from_dict(json.loads(json.dumps(data_to_dict(data))))
        assert derive_constants(again) == derive_constants(data)
    text = json.dumps(constants_to_dict(derive_constants(builtin("zeta"))))
    assert "log_abs" in text


@pytest.mark.parametrize("obj, field", [
    ({"epsilon": 1, "Q": 1, "factors": [], "coefficients": {}}, "m"),
    ({"m": 0, "epsilon": 1, "Q": "x", "factors": [], "coefficients": {}}, "Q"),
    ({"m": 0, "epsilon": [1, 2, 3], "Q": 1, "factors": [], "coefficients": {}}, "epsilon"),
    ({"m": 0, "epsilon": 1, "Q": 1, "factors": [{"lambda": "a"}], "coefficients": {}}, "factors[0].lambda"),
    ({"m": 0, "epsilon": 1, "Q": 1, "factors": [{"lambda": 1}], "coefficients": {"builtin": "eta"}}, "coefficients.builtin"),
])
def test_malformed_json_names_field(obj, field):
    with pytest.raises(ValueError, match=field.replace("[", r"\[").replace("]", r"\]")):
        data_from_dict(obj)
