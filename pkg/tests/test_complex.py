import numpy as np
import pytest

from hodgeheat.complex import (EMPTY, ComplexError, boundary_apply, build_complex, closure,
                               coboundary_apply, complex_from_simplices, faces, inner_product,
                               lp_norm, make_simplex, orientation_sign, parse_simplex_key,
                               simplex_key)
from hodgeheat.generators import fixtures, torus

from oracles import boundary, delta, from_complex, theta


def test_closure_of_triangle_counts_and_gamma():
    cx = build_complex([[0, 1, 2]])
    assert [len(cx.block(k)) for k in range(3)] == [3, 3, 1]
    gamma = dict(zip(cx.simplices, cx.gamma))
    assert all(gamma[(v,)] == 2 for v in range(3))
    assert all(gamma[e] == 1 for e in cx.block(1))
    assert gamma[(0, 1, 2)] == 0


def test_weighted_edge_gamma_and_weights():
    cx = build_complex([[0, 1]], {"0": 1, "1": 2, "0,1": 3})
    gamma = dict(zip(cx.simplices, cx.gamma))
    assert gamma[(1,)] == 3
    assert cx.weight((1,)) == 2


def test_single_edge_nonaugmented_contents():
    cx = build_complex([[0, 1]])
    assert set(cx.simplices) == {(0,), (1,), (0, 1)}
    gamma = dict(zip(cx.simplices, cx.gamma))
    assert gamma[(0,)] == 1 and gamma[(0, 1)] == 0


@pytest.mark.parametrize("mode, expected", [("off", False), ("on", True), ("auto", True)])
def test_augmentation_modes(mode, expected):
    cx = build_complex([[0, 1]], augmented=mode)
    assert cx.augmented is expected
    assert (EMPTY in cx) is expected
    if expected:
        assert cx.weight(EMPTY) == 1.0
        assert cx.min_degree == -1


def test_empty_weight_parameter():
    cx = build_complex([[0, 1]], augmented="on", empty_weight=2.5)
    assert cx.weight(EMPTY) == 2.5


def test_orientation_signs():
    cx = build_complex([[0, 1, 2]])
    assert orientation_sign(cx, (1, 2), (0, 1, 2)) == 1
    assert orientation_sign(cx, (0, 2), (0, 1, 2)) == -1
    assert orientation_sign(cx, (0, 1), (0, 1, 2)) == 1
    assert orientation_sign(cx, (0,), (0, 1, 2)) == 0


def test_coboundary_of_two_vertex_indicators_vanishes():
    cx = build_complex([[0, 1]])
    om = cx.indicator((0,)) + cx.indicator((1,))
    assert coboundary_apply(om)[(0, 1)] == 0


def test_boundary_of_edge_indicator():
    cx = build_complex([[0, 1]])
    b = boundary_apply(cx.indicator((0, 1)))
    assert b[(0,)] == -1 and b[(1,)] == 1


def test_weighted_boundary_of_edge_indicator():
    cx = build_complex([[0, 1]], {"0": 1, "1": 2, "0,1": 3})
    b = boundary_apply(cx.indicator((0, 1)))
    assert b[(0,)] == pytest.approx(-3.0)
    assert b[(1,)] == pytest.approx(1.5)


def test_lp_norm_of_weighted_indicator():
    cx = build_complex([[0, 1]], {"0": 1, "1": 2, "0,1": 3})
    assert lp_norm(cx.indicator((1,)), 2) == pytest.approx(np.sqrt(2))
    assert lp_norm(cx.indicator((1,)), np.inf) == 1.0


@pytest.mark.parametrize("name", ["F1", "F2", "F3", "F4", "F5"])
def test_matrices_match_brute_force(name):
    cx = fixtures()[name]
    simplices, m = from_complex(cx)
    rng = np.random.default_rng(0)
    vals = rng.standard_normal(len(cx))
    om = dict(zip(cx.simplices, vals))
    d = delta(simplices, m, om)
    b = boundary(simplices, m, om)
    np.testing.assert_allclose(cx.coboundary_matrix @ vals, [d[s] for s in cx.simplices], atol=1e-13)
    np.testing.assert_allclose(cx.boundary_matrix @ vals, [b[s] for s in cx.simplices], atol=1e-13)


def test_coboundary_squares_to_zero_on_torus():
    D = torus().coboundary_matrix.astype(np.int64)
    assert not np.any(D @ D)


def test_stokes_on_augmented_complex(rng):
    cx = build_complex([[0, 1, 2], [2, 3]], augmented="on", empty_weight=0.7)
    om = cx.cochain()
    om.values[:] = rng.standard_normal(len(cx)) + 1j * rng.standard_normal(len(cx))
    eta = cx.cochain()
    eta.values[:] = rng.standard_normal(len(cx)) + 1j * rng.standard_normal(len(cx))
    lhs = inner_product(coboundary_apply(om), eta)
    rhs = inner_product(om, boundary_apply(eta))
    assert abs(lhs - rhs) <= 1e-12


def test_theta_oracle_agrees_with_orientation_sign():
    cx = build_complex([[0, 1, 2, 3]])
    for s in cx.simplices:
        for f in faces(s):
            if f:
                assert orientation_sign(cx, f, s) == theta(f, s)


@pytest.mark.parametrize("bad, match", [
    ([[0, 0]], "duplicate"),
    ([[-1, 2]], "negative"),
    ([[]], "nonempty"),
])
def test_malformed_top_simplices(bad, match):
    with pytest.raises(ComplexError, match=match):
        build_complex(bad)


def test_missing_face_names_the_simplex():
    with pytest.raises(ComplexError, match=r"missing face \[1, 2\]") as info:
        complex_from_simplices([[0], [1], [2], [0, 1], [0, 2], [0, 1, 2]])
    assert info.value.location == "simplices['0,1,2']"


def test_missing_weight_and_nonpositive_weight():
    with pytest.raises(ComplexError, match="missing weight"):
        build_complex([[0, 1]], {"0": 1, "1": 1})
    with pytest.raises(ComplexError, match="non-positive"):
        build_complex([[0, 1]], {"0": 1, "1": 0, "0,1": 1})


def test_simplex_keys_round_trip():
    for s in [(), (3,), (0, 4, 9)]:
        assert parse_simplex_key(simplex_key(s)) == s
    assert make_simplex([2, 0, 1]) == (0, 1, 2)
    assert closure([[0, 1]]) == {(0,), (1,), (0, 1)}
