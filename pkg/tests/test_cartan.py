import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbconv import RestrictedRoot, SpaceDescriptor, build_space, rho, root_separation_constant
from orbconv.cartan import weyl_group_order
from orbconv.oracles import (
    lorentz_algebra_basis,
    restricted_root_counts,
    separation_brute_force,
    unitary_algebra_basis,
)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_real_hyperbolic_against_ad_eigenspaces(n):
    # boost in the (e_1, e_{n+1}) plane: eigenvalues 0 (a + m), +-1 (root spaces)
    H = np.zeros((n + 1, n + 1))
    H[0, n] = H[n, 0] = 1.0
    counts = restricted_root_counts(lorentz_algebra_basis(n), H)
    space = build_space("real-hyperbolic", [n])
    assert counts[1.0] == counts[-1.0] == space.m_alpha == n - 1
    assert space.m_2alpha == 0
    # dim g = dim k + dim p and dim G/K = dim p = n
    assert space.dim == n == space.rank + space.m_alpha
    assert space.weyl_order == 2
    assert rho(space)[0] == pytest.approx((n - 1) / 2)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_complex_hyperbolic_against_ad_eigenspaces(m):
    H = np.zeros((m + 1, m + 1), dtype=complex)
    H[0, m] = H[m, 0] = 0.5
    counts = restricted_root_counts(unitary_algebra_basis(m), H)
    space = build_space("complex-hyperbolic", [m])
    # with alpha(H) = 1/2 the roots are +-1/2 (alpha) and +-1 (2 alpha)
    assert counts[0.5] == space.m_alpha == 2 * (m - 1)
    assert counts[1.0] == space.m_2alpha == 1
    assert space.dim == 2 * m
    assert space.rho_scalar == pytest.approx(m)


def test_complex_hyperbolic_line_is_the_plane():
    ch1 = build_space("complex-hyperbolic", [1])
    h2 = build_space("real-hyperbolic", [2])
    assert (ch1.dim, ch1.m_alpha, ch1.m_2alpha) == (h2.dim, h2.m_alpha, h2.m_2alpha)


def test_sl2_roots():
    H = np.diag([0.5, -0.5])
    basis = [np.array([[1.0, 0], [0, -1.0]]), np.array([[0, 1.0], [0, 0]]),
             np.array([[0, 0], [1.0, 0]])]
    assert restricted_root_counts(basis, H) == {-1.0: 1, 0.0: 1, 1.0: 1}


@pytest.mark.parametrize("family,params", [
    ("real-hyperbolic", [1]), ("real-hyperbolic", [2, 3]), ("complex-hyperbolic", [0]),
    ("generic-rank-one", [0, 1]), ("nonsense", [2]),
])
def test_invalid_parameters(family, params):
    with pytest.raises(ValueError):
        build_space(family, params)


def test_descriptor_invariants_enforced():
    with pytest.raises(ValueError):
        SpaceDescriptor("bad", 1, 5, (RestrictedRoot((1.0,), 1),), 2)
    with pytest.raises(ValueError):
        RestrictedRoot((1.0,), 0)


def test_generic_rank_two():
    a2 = [RestrictedRoot((1.0, 0.0), 1),
          RestrictedRoot((-0.5, math.sqrt(3) / 2), 1),
          RestrictedRoot((0.5, math.sqrt(3) / 2), 1)]
    space = build_space("generic", [2], roots=a2)
    assert space.weyl_order == 6
    assert space.dim == 5
    np.testing.assert_allclose(rho(space), [0.5, math.sqrt(3) / 2])
    with pytest.raises(ValueError):
        build_space("generic", [2], roots=a2, dim=7)


def test_weyl_orders():
    b2 = [RestrictedRoot(v, 1) for v in [(1, 0), (0, 1), (1, 1), (1, -1)]]
    g2_short = [(1, 0), (-0.5, math.sqrt(3) / 2), (0.5, math.sqrt(3) / 2)]
    g2_long = [(0, math.sqrt(3)), (1.5, math.sqrt(3) / 2), (-1.5, math.sqrt(3) / 2)]
    assert weyl_group_order(b2) == 8
    assert weyl_group_order([RestrictedRoot(v, 1) for v in g2_short + g2_long]) == 12
    assert weyl_group_order([RestrictedRoot((1.0,), 3)]) == 2


@pytest.mark.parametrize("family,params", [
    ("real-hyperbolic", [3]), ("complex-hyperbolic", [2]), ("generic-rank-one", [3, 2]),
])
def test_serialization_round_trip(family, params):
    space = build_space(family, params)
    again = SpaceDescriptor.from_json(space.to_json())
    assert again.to_dict() == space.to_dict()
    assert again.dim == space.dim and again.m_2alpha == space.m_2alpha


@pytest.mark.parametrize("norm", [0.3, 1.0, 2.5])
def test_separation_rank_one_exact(norm):
    assert root_separation_constant([RestrictedRoot((norm,), 1)]) == norm


def test_separation_orthogonal_pair():
    c = root_separation_constant([RestrictedRoot((1.0, 0.0), 1), RestrictedRoot((0.0, 1.0), 1)])
    assert c == pytest.approx(1 / math.sqrt(2), abs=1e-6)


@settings(max_examples=15, deadline=None)
@given(angle=st.floats(0.3, math.pi - 0.3), scale=st.floats(0.2, 5.0))
def test_separation_rank_two_matches_brute_force(angle, scale):
    roots = [(scale, 0.0), (scale * math.cos(angle), scale * math.sin(angle))]
    c = root_separation_constant([RestrictedRoot(r, 1) for r in roots])
    assert c == pytest.approx(separation_brute_force(roots, 200_000), abs=1e-4 * scale)


def test_separation_rank_three_coordinate_roots():
    roots = [RestrictedRoot(tuple(np.eye(3)[i]), 1) for i in range(3)]
    c = root_separation_constant(roots)
    assert c == pytest.approx(1 / math.sqrt(3), abs=2e-3)


@settings(max_examples=10, deadline=None)
@given(s=st.floats(0.1, 10.0))
def test_separation_scales_linearly(s):
    ang = 2 * math.pi / 3
    base = [(1.0, 0.0), (math.cos(ang), math.sin(ang))]
    c1 = root_separation_constant([RestrictedRoot(r, 1) for r in base])
    cs = root_separation_constant([RestrictedRoot((s * x, s * y), 1) for x, y in base])
    assert cs > 0
    assert cs == pytest.approx(s * c1, rel=1e-6)


def test_rho_in_closed_chamber():
    b2 = [RestrictedRoot(v, m) for v, m in [((1, 0), 2), ((0, 1), 1), ((1, 1), 3), ((1, -1), 1)]]
    spaces = [build_space("generic", [2], roots=b2), build_space("complex-hyperbolic", [3]),
              build_space("real-hyperbolic", [6])]
    for space in spaces:
        r = rho(space)
        assert all(np.dot(r, root.vector) >= 0 for root in space.positive_roots)
