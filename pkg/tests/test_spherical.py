import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbconv import (
    DEFAULT_CONFIG,
    QuadratureBudgetError,
    UnsupportedSpaceError,
    build_space,
    c_function,
    decay_envelope,
    phi_values,
    plancherel_weight,
    plancherel_weights,
    radial_jacobian,
    spherical_derivative,
    spherical_fn,
    spherical_values,
)
from orbconv.oracles import conical_function
from orbconv.spherical import envelope_ratio_sup, jost


def hyp_oracle(n, lam, t):
    """2F1((rho + i lam)/2, (rho - i lam)/2; n/2; -sinh^2 t) in mpmath."""
    rho = mp.mpf(n - 1) / 2
    z = -mp.sinh(t) ** 2
    # a Pfaff transformation keeps the argument in (-1, 0]
    a, b, c = (rho + 1j * lam) / 2, (rho - 1j * lam) / 2, mp.mpf(n) / 2
    val = (1 - z) ** (-a) * mp.hyp2f1(a, c - b, c, z / (z - 1))
    return complex(val).real


def test_conical_oracle_matches_mpmath():
    for lam in (0.0, 0.7, 5.0, 20.0):
        for t in (0.1, 1.0, 4.0):
            ref = float(mp.legenp(-0.5 + 1j * lam, 0, mp.cosh(t), type=3).real)
            assert conical_function([lam], t)[0] == pytest.approx(ref, abs=1e-12)


def test_plane_against_mpmath(h2):
    lam = np.linspace(0.0, 20.0, 11)
    for t in (0.05, 0.5, 2.0, 5.0):
        got = spherical_values(h2, lam, t).real
        ref = [float(mp.legenp(-0.5 + 1j * l, 0, mp.cosh(t), type=3).real) for l in lam]
        np.testing.assert_allclose(got, ref, atol=1e-12)


def test_h3_closed_form(h3):
    lam = np.linspace(0.1, 15.0, 30)
    for t in (0.3, 1.0, 3.0):
        got = spherical_values(h3, lam, t).real
        np.testing.assert_allclose(got, np.sin(lam * t) / (lam * np.sinh(t)), atol=1e-12)


@pytest.mark.parametrize("n", [4, 5])
def test_higher_dimensions_against_hypergeometric(n):
    space = build_space("real-hyperbolic", [n])
    for lam in (0.0, 1.3, 6.0):
        for t in (0.4, 1.5, 3.0):
            got = spherical_fn(space, lam, t).value.real
            assert got == pytest.approx(hyp_oracle(n, lam, t), abs=1e-11)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_normalization_and_weyl_symmetry(n):
    space = build_space("real-hyperbolic", [n])
    lam = np.linspace(-20.0, 20.0, 50)
    np.testing.assert_allclose(spherical_values(space, lam, 0.0), 1.0, atol=1e-14)
    for t in (0.2, 2.0):
        np.testing.assert_allclose(spherical_values(space, lam, t),
                                   spherical_values(space, -lam, t), atol=1e-13)


def test_imaginary_rho_gives_one(h3):
    # phi_{-i rho} = 1 identically; phi_{i rho} too by Weyl symmetry
    for t in (0.5, 2.0):
        for lam in (1j, -1j):
            assert spherical_values(h3, np.array([lam]), t)[0] == pytest.approx(1.0, abs=1e-12)


def test_phi_bounded_by_phi0(h2):
    # |phi_lambda| <= phi_0 for real lambda
    for t in (0.5, 2.0, 4.0):
        phi0 = spherical_values(h2, 0.0, t).real[0]
        vals = np.abs(spherical_values(h2, np.linspace(0, 30, 61), t))
        assert np.all(vals <= phi0 + 1e-13)


@settings(max_examples=25, deadline=None)
@given(lam=st.floats(0.0, 40.0), t=st.floats(0.0, 4.0))
def test_hybrid_matches_k_integral(lam, t):
    h3 = build_space("real-hyperbolic", [3])
    direct = spherical_values(h3, lam, t).real[0]
    assert phi_values(h3, lam, t)[0] == pytest.approx(direct, abs=1e-10)


def test_hybrid_large_lambda_plane(h2):
    lam = np.array([50.0, 200.0, 1000.0])
    t = 1.0
    ref = [float(mp.legenp(-0.5 + 1j * l, 0, mp.cosh(t), type=3).real) for l in lam]
    np.testing.assert_allclose(phi_values(h2, lam, t), ref, atol=1e-13)
    # small t, large lambda t: the asymptotic route
    lam = np.array([400.0, 2000.0])
    t = 0.1
    ref = [float(mp.legenp(-0.5 + 1j * l, 0, mp.cosh(t), type=3).real) for l in lam]
    np.testing.assert_allclose(phi_values(h2, lam, t), ref, atol=1e-13)


def test_jost_leading_behaviour(h3):
    # in H^3, Phi_lambda(t) = e^{i lambda t} / (2 sinh t)
    lam = np.array([0.5, 3.0, 10.0])
    for t in (0.5, 2.0):
        np.testing.assert_allclose(jost(h3, lam, t), 0.5 / np.sinh(t), rtol=1e-13)


def test_derivatives_against_finite_differences(h2):
    lam = np.array([0.0, 1.5, 6.0])
    h = 1e-5
    for t in (0.3, 1.0, 2.5):
        d1 = spherical_derivative(h2, lam, t, 1).real
        fd = (spherical_values(h2, lam, t + h) - spherical_values(h2, lam, t - h)).real / (2 * h)
        np.testing.assert_allclose(d1, fd, atol=1e-7)
        d2 = spherical_derivative(h2, lam, t, 2).real
        fd2 = (spherical_derivative(h2, lam, t + h, 1)
               - spherical_derivative(h2, lam, t - h, 1)).real / (2 * h)
        np.testing.assert_allclose(d2, fd2, atol=1e-6)


def test_derivative_satisfies_radial_equation(h3):
    # phi'' + (n-1) coth t phi' = -(lambda^2 + rho^2) phi
    lam = np.array([0.4, 2.0, 7.0])
    for t in (0.6, 1.7):
        p0 = spherical_values(h3, lam, t).real
        p1 = spherical_derivative(h3, lam, t, 1).real
        p2 = spherical_derivative(h3, lam, t, 2).real
        np.testing.assert_allclose(p2 + 2 / np.tanh(t) * p1, -(lam ** 2 + 1) * p0, atol=1e-10)


def test_plancherel_closed_forms(h2, h3):
    lam = np.array([0.01, 0.5, 1.0, 7.0, 100.0])
    np.testing.assert_allclose(plancherel_weights(h2, lam), lam * np.tanh(np.pi * lam) / 2,
                               rtol=1e-12)
    np.testing.assert_allclose(plancherel_weights(h3, lam), lam ** 2 / (2 * np.pi), rtol=1e-12)
    assert plancherel_weights(h2, [0.0])[0] == 0.0
    assert plancherel_weight(h3, -2.0).weight == pytest.approx(4 / (2 * np.pi))


def test_c_function_normalization():
    for space in (build_space("real-hyperbolic", [4]), build_space("complex-hyperbolic", [2]),
                  build_space("generic-rank-one", [4, 3])):
        assert c_function(space, -1j * space.rho_scalar) == pytest.approx(1.0, abs=1e-13)


def test_c_function_from_asymptotics(h2):
    # phi_lambda(a_t) e^{rho t} ~ 2 Re(c(lambda) e^{i lambda t}) for large t
    t = 14.0
    lam = np.array([0.7, 1.5, 3.0])
    lhs = [float(mp.legenp(-0.5 + 1j * l, 0, mp.cosh(t), type=3).real) * math.exp(0.5 * t)
           for l in lam]
    rhs = 2 * (c_function(h2, lam) * np.exp(1j * lam * t)).real
    np.testing.assert_allclose(lhs, rhs, atol=1e-9)


@pytest.mark.parametrize("n", [2, 3])
def test_plancherel_growth_exponent(n):
    space = build_space("real-hyperbolic", [n])
    lam = np.geomspace(1e2, 1e4, 100)
    slope = np.polyfit(np.log(lam), np.log(plancherel_weights(space, lam)), 1)[0]
    assert slope == pytest.approx(n - 1, abs=1e-3)


def test_envelope(h3):
    env = decay_envelope(h3, [1.0], np.array([0.0, 3.0]))
    np.testing.assert_allclose(env, [1.0, 0.25])
    with pytest.raises(ValueError):
        decay_envelope(h3, [0.0], [1.0])
    rep = envelope_ratio_sup(h3, 1.0, np.linspace(0, 200, 401))
    assert 0 < rep["sup_ratio"] < 10


def test_radial_jacobian(h3):
    np.testing.assert_allclose(radial_jacobian(h3, [0.0, 1.0]), [0.0, 4 * np.sinh(1.0) ** 2])


def test_budget_error(h2):
    tight = DEFAULT_CONFIG.with_(k_order=16, k_order_max=32)
    with pytest.raises(QuadratureBudgetError):
        spherical_values(h2, 30.0, 4.0, tight)


def test_unsupported_space():
    with pytest.raises(UnsupportedSpaceError):
        spherical_values(build_space("complex-hyperbolic", [2]), 1.0, 1.0)


def test_spherical_fn_record(h2):
    v = spherical_fn(h2, 2.0, 1.0)
    assert v.lam == 2.0 and v.point == 1.0 and v.order >= DEFAULT_CONFIG.k_order
    assert v.value.real == pytest.approx(conical_function([2.0], 1.0)[0], abs=1e-12)


def test_envelope_examples(h2):
    np.testing.assert_allclose(decay_envelope(h2, [1.0], np.array([0.0, 3.0])), [1.0, 0.5])


def test_envelope_ratio_stable_under_refinement(h2):
    coarse = envelope_ratio_sup(h2, 1.0, np.linspace(0, 200, 401))
    fine = envelope_ratio_sup(h2, 1.0, np.linspace(0, 200, 4001))
    assert np.isfinite(coarse["sup_ratio"])
    assert fine["sup_ratio"] == pytest.approx(coarse["sup_ratio"], rel=0.02)
    assert fine["argmax_lambda"] < 200
