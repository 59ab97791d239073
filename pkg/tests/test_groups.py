import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbconv import (
    CompactElement,
    GroupElement,
    Realization,
    RealizationError,
    cartan,
    cartan_radial,
    iwasawa,
    iwasawa_H,
    radial_element,
    radial_of_product,
    realization_for,
    sample_K,
)
from orbconv.groups import nilpotent_element, rotation, sample_product_radii

REALIZATIONS = [Realization("sl2"), Realization("so(n,1)", 2), Realization("so(n,1)", 3),
                Realization("so(n,1)", 5)]


def random_element(real, rng, tmax=4.0):
    """k1 a_t n k2 with random pieces: a generic group element."""
    t = rng.uniform(-tmax, tmax)
    if real.kind == "sl2":
        v = rng.normal()
    else:
        v = rng.normal(size=real.n - 1)
    g = sample_K(real, rng) @ radial_element(real, t)
    g = g @ nilpotent_element(real, v)
    return g @ sample_K(real, rng)


@pytest.mark.parametrize("real", REALIZATIONS, ids=lambda r: r.label)
def test_iwasawa_reconstruction(real, rng):
    worst = 0.0
    for _ in range(1000):
        g = random_element(real, rng)
        k, h, n = iwasawa(g)
        back = (k @ radial_element(real, h)) @ n
        scale = np.max(np.abs(g.matrix))
        worst = max(worst, np.max(np.abs(back.matrix - g.matrix)) / scale)
        # n - 1 is nilpotent of index <= 3
        x = n.matrix - np.eye(real.size)
        assert np.max(np.abs(x @ x @ x)) <= 1e-9 * max(1.0, np.max(np.abs(x))) ** 3
        assert h == pytest.approx(iwasawa_H(g), abs=1e-9)
    assert worst < 1e-10


@pytest.mark.parametrize("real", REALIZATIONS, ids=lambda r: r.label)
def test_cartan_reconstruction(real, rng):
    worst = 0.0
    for _ in range(1000):
        g = random_element(real, rng)
        k1, t, k2 = cartan(g)
        assert t >= 0
        back = (k1 @ radial_element(real, t)) @ k2
        scale = np.max(np.abs(g.matrix))
        worst = max(worst, np.max(np.abs(back.matrix - g.matrix)) / scale)
    assert worst < 1e-10


@pytest.mark.parametrize("real", REALIZATIONS, ids=lambda r: r.label)
def test_radial_of_radial_element(real):
    for t in [0.0, 1e-8, 0.3, 1.0, 7.5]:
        g = radial_element(real, t)
        assert cartan_radial(g) == pytest.approx(t, rel=1e-12, abs=1e-15)
        assert cartan_radial(radial_element(real, -t)) == pytest.approx(t, rel=1e-12, abs=1e-15)
        assert iwasawa_H(g) == pytest.approx(t, abs=1e-12)


def test_iwasawa_of_compact_is_zero(rng):
    for real in REALIZATIONS:
        k = sample_K(real, rng)
        g = GroupElement(k.embed(real), real)
        assert abs(iwasawa_H(g)) < 1e-12
        assert cartan_radial(g) == 0.0


@settings(max_examples=40, deadline=None)
@given(t=st.floats(0.0, 6.0), seed=st.integers(0, 2 ** 32 - 1))
def test_cartan_radial_bi_invariant(t, seed):
    rng = np.random.default_rng(seed)
    for real in (Realization("sl2"), Realization("so(n,1)", 3)):
        g = sample_K(real, rng) @ radial_element(real, t) @ sample_K(real, rng)
        assert cartan_radial(g) == pytest.approx(t, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(s=st.floats(0.0, 4.0), u=st.floats(0.0, 4.0), theta=st.floats(0, 2 * np.pi))
def test_sl2_and_so21_agree(s, u, theta):
    # the two models of the hyperbolic plane give the same radial law
    a = radial_of_product([s, u], [rotation(0), rotation(theta), rotation(0)], Realization("sl2"))
    rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    # SO(2) acts on the tangent plane by the double angle in the sl2 picture
    rot2 = np.array([[np.cos(2 * theta), -np.sin(2 * theta)], [np.sin(2 * theta), np.cos(2 * theta)]])
    b = radial_of_product([s, u], [CompactElement(np.eye(2)), CompactElement(rot2),
                                   CompactElement(np.eye(2))], Realization("so(n,1)", 2))
    assert a == pytest.approx(b, abs=1e-9)
    del rot


def test_product_radius_law_of_cosines():
    # cosh d = cosh s cosh u + sinh s sinh u cos(angle)
    real = Realization("so(n,1)", 3)
    s, u, ang = 0.7, 1.3, 2.0
    k = np.eye(3)
    k[:2, :2] = [[np.cos(ang), -np.sin(ang)], [np.sin(ang), np.cos(ang)]]
    d = radial_of_product([s, u], [CompactElement(np.eye(3)), CompactElement(k),
                                   CompactElement(np.eye(3))], real)
    expect = np.arccosh(np.cosh(s) * np.cosh(u) + np.sinh(s) * np.sinh(u) * np.cos(ang))
    assert d == pytest.approx(expect, rel=1e-12)


@pytest.mark.parametrize("real", REALIZATIONS, ids=lambda r: r.label)
def test_sample_K_is_special_orthogonal(real, rng):
    mats = sample_K(real, rng, size=500)
    eye = np.eye(real.k_size)
    assert np.allclose(np.einsum("nji,njk->nik", mats, mats), eye, atol=1e-12)
    assert np.allclose(np.linalg.det(mats), 1.0)


def test_haar_moments(rng):
    # for Haar SO(n): E[k_ij] = 0 and E[k_ij^2] = 1/n
    for n in (3, 4):
        mats = sample_K(Realization("so(n,1)", n), rng, size=40_000)
        assert np.max(np.abs(mats.mean(axis=0))) < 0.02
        np.testing.assert_allclose((mats ** 2).mean(axis=0), 1.0 / n, atol=0.01)


def test_haar_first_column_uniform_on_sphere(rng):
    # e_1 component of k e_1 is Beta-distributed: for n = 3 it is uniform on [-1, 1]
    mats = sample_K(Realization("so(n,1)", 3), rng, size=50_000)
    x = mats[:, 0, 0]
    hist, _ = np.histogram(x, bins=10, range=(-1, 1))
    assert np.max(np.abs(hist / x.size - 0.1)) < 0.006


def test_batched_radii_match_single_products(rng):
    for real in (Realization("sl2"), Realization("so(n,1)", 3)):
        ts = [0.4, 1.1, 0.9]
        seed = 99
        fast = sample_product_radii(real, ts, 50, np.random.default_rng(seed))
        assert np.all(fast <= sum(ts) + 1e-12)
        assert np.all(fast >= 0)
        # a single product with explicit rotations
        ks = [sample_K(real, rng) for _ in range(len(ts) + 1)]
        single = radial_of_product(ts, ks, real)
        assert 0 <= single <= sum(ts) + 1e-12


def test_single_generator_radius_exact(rng):
    for real in REALIZATIONS:
        out = sample_product_radii(real, [1.0], 100, rng)
        np.testing.assert_allclose(out, 1.0, rtol=1e-14)


def test_invalid_matrices_rejected():
    with pytest.raises(RealizationError):
        GroupElement(np.array([[2.0, 0], [0, 2.0]]), Realization("sl2"))
    with pytest.raises(RealizationError):
        GroupElement(-np.eye(3), Realization("so(n,1)", 2))
    with pytest.raises(RealizationError):
        CompactElement(np.diag([1.0, -1.0]))
    with pytest.raises(RealizationError):
        GroupElement(np.eye(3), Realization("sl2"))


def test_realization_choice(h2, h3):
    assert realization_for(h2).kind == "sl2"
    assert realization_for(h2, "so(n,1)").size == 3
    assert realization_for(h3).label == "so(3,1)"


def test_inverse(rng):
    for real in REALIZATIONS:
        g = random_element(real, rng)
        prod = g @ g.inverse()
        assert np.allclose(prod.matrix, np.eye(real.size), atol=1e-9)


@pytest.mark.parametrize("real", REALIZATIONS, ids=lambda r: r.label)
def test_iwasawa_invariances(real, rng):
    for _ in range(200):
        g = random_element(real, rng, tmax=3.0)
        v = rng.normal() if real.kind == "sl2" else rng.normal(size=real.n - 1)
        moved = (sample_K(real, rng) @ g) @ nilpotent_element(real, v)
        assert iwasawa_H(moved) == pytest.approx(iwasawa_H(g), abs=1e-9)
        assert cartan_radial(g.inverse()) == pytest.approx(cartan_radial(g), abs=1e-9)


@pytest.mark.parametrize("real", REALIZATIONS, ids=lambda r: r.label)
def test_identity_rotations_add_radii(real):
    ts = [0.3, 1.2, 0.5]
    eye = CompactElement(np.eye(real.k_size))
    assert radial_of_product(ts, [eye] * 4, real) == pytest.approx(sum(ts), rel=1e-13)


def test_so2_angle_uniform(rng):
    from scipy import stats

    mats = sample_K(Realization("sl2"), rng, size=100_000)
    theta = np.mod(np.arctan2(mats[:, 1, 0], mats[:, 0, 0]), 2 * np.pi)
    assert stats.kstest(theta, stats.uniform(0, 2 * np.pi).cdf).pvalue > 0.01


def test_two_step_radius_in_triangle_range(rng):
    out = sample_product_radii(Realization("sl2"), [1.0, 1.0], 20_000, rng)
    assert out.min() >= 0.0 and out.max() <= 2.0 + 1e-12
    assert out.max() > 1.99 and out.min() < 0.05


def test_haar_left_invariance(rng):
    from scipy import stats

    real = Realization("so(n,1)", 4)
    k0 = sample_K(real, rng).matrix
    a = sample_K(real, rng, size=20_000)
    b = np.einsum("ij,njk->nik", k0, sample_K(real, rng, size=20_000))
    for i, j in [(0, 0), (1, 2), (3, 1)]:
        assert stats.ks_2samp(a[:, i, j], b[:, i, j]).pvalue > 1e-3
