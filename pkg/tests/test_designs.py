import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.distance import pdist

from cubecover.designs import (
    OUTSIDE_CODE,
    CapacityError,
    DesignKind,
    Region,
    build_dn0,
    build_dn_delta,
    custom_design,
    linear_scan_sq_distances,
    membership_codes,
    nearest_sq_distance,
    nearest_sq_distances,
    read_design_csv,
    voronoi_membership,
    write_design_csv,
)
from cubecover.sampling import uniform_block


def brute_force_even_vertices(d, delta):
    """Independent enumeration through itertools.product."""
    return {
        tuple(delta * s for s in signs)
        for signs in itertools.product((1.0, -1.0), repeat=d)
        if sum(s < 0 for s in signs) % 2 == 0
    }


# -- construction ---------------------------------------------------------------


def test_dn_delta_d2():
    assert build_dn_delta(2, 0.5).coords.tolist() == [[0.5, 0.5], [-0.5, -0.5]]


def test_dn_delta_d3_points():
    got = {tuple(p) for p in build_dn_delta(3, 0.4).coords.tolist()}
    assert got == {(0.4, 0.4, 0.4), (-0.4, -0.4, 0.4), (-0.4, 0.4, -0.4), (0.4, -0.4, -0.4)}


def test_dn_delta_d10_min_distance():
    design = build_dn_delta(10, 0.5)
    assert design.n == 512
    assert pdist(design.coords).min() == pytest.approx(2 * 0.5 * math.sqrt(2), abs=1e-12)


@pytest.mark.parametrize("d", range(1, 9))
@pytest.mark.parametrize("delta", [0.1, 0.5, 1.0])
def test_dn_delta_matches_enumeration(d, delta):
    design = build_dn_delta(d, delta)
    assert design.kind is DesignKind.DN_DELTA
    assert design.n == 2 ** (d - 1) == len(design.coords)
    assert {tuple(p) for p in design.coords.tolist()} == brute_force_even_vertices(d, delta)
    assert tuple(design.coords[0]) == (delta,) * d
    assert np.all(np.abs(design.coords) <= 1.0)
    assert len({tuple(p) for p in design.coords.tolist()}) == design.n


def test_dn0_examples():
    assert sorted(build_dn0(1).coords.ravel().tolist()) == [-0.5, 0.5]
    d3 = build_dn0(3)
    assert d3.n == 8
    assert np.allclose(np.linalg.norm(d3.coords, axis=1), math.sqrt(3) / 2)
    d10 = build_dn0(10)
    assert d10.n == 1024
    assert np.allclose(np.linalg.norm(d10.coords, axis=1), 1.5811388300841898)
    assert len({tuple(p) for p in d10.coords.tolist()}) == 1024


def test_capacity_cap():
    with pytest.raises(CapacityError):
        build_dn_delta(26, 0.5)
    with pytest.raises(CapacityError):
        build_dn0(30)
    implicit = build_dn_delta(40, 0.5, materialize=False)
    assert implicit.n == 2**39 and not implicit.materialized
    with pytest.raises(CapacityError):
        implicit.coords
    assert build_dn_delta(5, 0.5, max_dim=4, materialize=False).n == 16
    with pytest.raises(CapacityError):
        build_dn_delta(5, 0.5, max_dim=4)


@pytest.mark.parametrize("bad", [-0.1, 1.5])
def test_delta_out_of_range(bad):
    with pytest.raises(ValueError):
        build_dn_delta(3, bad)


def test_custom_design_rejects_outside_points():
    with pytest.raises(ValueError):
        custom_design([[0.0, 1.2]])
    assert custom_design([[0.0, 0.0]]).n == 1


def test_design_points_are_read_only():
    design = build_dn_delta(3, 0.5)
    with pytest.raises(ValueError):
        design.coords[0, 0] = 0.0


# -- nearest point ----------------------------------------------------------------


def test_nearest_examples():
    design = build_dn_delta(3, 0.5)
    assert nearest_sq_distance([-0.2, 0.5, 0.9], design) == pytest.approx(0.65, abs=1e-15)
    assert nearest_sq_distance([0.5, 0.5, 0.5], design) == 0.0
    for d, delta in [(4, 0.3), (7, 0.8)]:
        assert nearest_sq_distance(np.zeros(d), build_dn_delta(d, delta)) == pytest.approx(d * delta**2)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        nearest_sq_distance([0.1, 0.2], build_dn_delta(3, 0.5))
    with pytest.raises(ValueError):
        nearest_sq_distance(np.zeros((2, 3)), build_dn_delta(3, 0.5))


@pytest.mark.parametrize("d", [1, 2, 3, 5, 8, 10])
@pytest.mark.parametrize("delta", [0.0, 0.25, 0.5, 0.9])
def test_closed_form_rule_equals_linear_scan(d, delta):
    x = uniform_block(d, 10**4, seed=d, index=int(delta * 100))
    design = build_dn_delta(d, delta)
    assert np.array_equal(nearest_sq_distances(x, design), linear_scan_sq_distances(x, design.coords))


@pytest.mark.parametrize("d", [1, 4, 9])
def test_dn0_rule_equals_linear_scan(d):
    x = uniform_block(d, 10**4, seed=3, index=d)
    design = build_dn0(d)
    assert np.array_equal(nearest_sq_distances(x, design), linear_scan_sq_distances(x, design.coords))


def test_generic_search_matches_linear_scan():
    rng = np.random.default_rng(11)
    design = custom_design(rng.uniform(-1, 1, size=(300, 6)))
    x = rng.uniform(-1, 1, size=(5000, 6))
    fast = nearest_sq_distances(x, design)
    slow = linear_scan_sq_distances(x, design.coords)
    assert np.allclose(fast, slow, rtol=0, atol=1e-12)


def test_implicit_design_matches_explicit():
    x = uniform_block(12, 2000, seed=5, index=0)
    explicit = nearest_sq_distances(x, build_dn_delta(12, 0.45))
    implicit = nearest_sq_distances(x, build_dn_delta(12, 0.45, materialize=False))
    assert np.array_equal(explicit, implicit)


@settings(max_examples=200, deadline=None)
@given(
    st.integers(1, 7).flatmap(
        lambda d: st.tuples(
            st.just(d),
            st.lists(st.floats(-1, 1, allow_nan=False), min_size=d, max_size=d),
            st.floats(0, 1, allow_nan=False),
        )
    )
)
def test_nearest_rule_property(args):
    d, x, delta = args
    design = build_dn_delta(d, delta)
    x = np.array([x])
    assert nearest_sq_distances(x, design)[0] == linear_scan_sq_distances(x, design.coords)[0]


# -- Voronoi cell of the first point --------------------------------------------------


def test_membership_examples():
    assert voronoi_membership([0.3, 0.7, 0.1], 3).region is Region.C0
    u1 = voronoi_membership([-0.2, 0.5, 0.9], 3)
    assert u1.region is Region.U and u1.index == 1 and u1.name == "U_1"
    assert voronoi_membership([-0.6, 0.5, 0.9], 3).region is Region.OUTSIDE


def test_membership_errors():
    with pytest.raises(ValueError):
        voronoi_membership([1.5, 0.0], 2)
    with pytest.raises(ValueError):
        voronoi_membership([0.1, 0.2], 3)


def test_membership_boundary_goes_to_lowest_region():
    assert voronoi_membership([0.0, 0.5], 2).region is Region.C0
    tie = voronoi_membership([-0.5, 0.5, 0.5], 3)
    assert tie.region is Region.U and tie.index == 1


def test_membership_region_invariants():
    x = uniform_block(4, 20000, seed=1, index=0)
    codes = membership_codes(x)
    c0 = x[codes == 0]
    assert np.all((c0 >= 0) & (c0 <= 1))
    for j in range(1, 5):
        u = x[codes == j]
        xj = u[:, j - 1]
        others = np.delete(u, j - 1, axis=1)
        assert np.all((xj >= -1) & (xj <= 0))
        assert np.all((np.abs(xj)[:, None] <= others) & (others <= 1))


@pytest.mark.parametrize("d", [2, 3, 6, 10])
@pytest.mark.parametrize("delta", [0.2, 0.5, 0.8])
def test_membership_agrees_with_nearest_point(d, delta):
    design = build_dn_delta(d, delta, materialize=False)
    x = uniform_block(d, 10**5, seed=17, index=d)
    inside = membership_codes(x) != OUTSIDE_CODE
    to_first = ((x - delta) ** 2).sum(axis=1)
    first_is_nearest = to_first <= nearest_sq_distances(x, design) + 1e-12
    assert np.array_equal(inside, first_is_nearest)


@pytest.mark.parametrize("d", [3, 5])
def test_regions_do_not_overlap(d):
    x = uniform_block(d, 10**5, seed=2, index=0)
    in_c0 = np.all((x >= 0) & (x <= 1), axis=1)
    count = in_c0.astype(int)
    for j in range(d):
        xj = x[:, j]
        others = np.delete(x, j, axis=1)
        count += ((xj >= -1) & (xj <= 0) & np.all((np.abs(xj)[:, None] <= others) & (others <= 1), axis=1)).astype(int)
    assert np.count_nonzero(count > 1) < 1e-3 * x.shape[0]


# -- CSV ----------------------------------------------------------------------------


def test_csv_round_trip(tmp_path):
    design = build_dn_delta(4, 1.0 / 3.0)
    path = tmp_path / "design.csv"
    write_design_csv(design, path)
    assert path.read_text().splitlines()[0] == "x1,x2,x3,x4"
    back = read_design_csv(path)
    assert back.kind is DesignKind.CUSTOM
    assert np.array_equal(back.coords, design.coords)


def test_csv_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n0.1,0.2\n")
    with pytest.raises(ValueError):
        read_design_csv(path)


@pytest.mark.parametrize("d", [2, 4, 6])
@pytest.mark.parametrize("delta", [0.25, 0.5, 1.0])
def test_nearest_rule_exact_on_repair_ties(d, delta):
    # coordinates from a coarse grid, so several share the smallest |x_i| and
    # the equally near repairs differ only in float summation order
    x = np.random.default_rng(d).choice(np.linspace(-1, 1, 9), size=(20000, d))
    design = build_dn_delta(d, delta)
    np.testing.assert_array_equal(nearest_sq_distances(x, design), linear_scan_sq_distances(x, design.coords))
