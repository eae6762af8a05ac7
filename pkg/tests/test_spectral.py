import warnings

import numpy as np
import pytest

from hodgeheat.complex import build_complex
from hodgeheat.generators import cycle, fixtures, full_simplex, random_flag, torus
from hodgeheat.operators import assemble_laplacian, global_laplacian
from hodgeheat.spectral import (betti, betti_numbers, betti_rank_nullity, exact_rank,
                                norm_bound_suite, rayleigh_check, spectrum)


@pytest.mark.parametrize("name", ["F2", "F3"])
def test_betti_oracle_fixtures(oracle, name):
    assert betti_numbers(fixtures()[name]) == oracle["betti"][name]


def test_betti_torus(oracle):
    assert betti_numbers(torus()) == oracle["betti"]["torus"]


def test_betti_two_components_and_sphere():
    assert betti_numbers(build_complex([[0, 1], [2, 3]])) == [2, 0]
    sphere = build_complex([[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]])
    assert betti_numbers(sphere) == [1, 0, 1]


def test_reduced_betti_with_warning():
    cx = fixtures(augmented="on")["F2"]
    with pytest.warns(UserWarning, match="reduced"):
        assert betti(cx, 0) == 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert betti(cx, -1) == 0


def test_betti_degree_out_of_range():
    with pytest.raises(ValueError):
        betti(fixtures()["F1"], 3)


def test_exact_rank():
    assert exact_rank(np.array([[1, 2], [2, 4]])) == 1
    assert exact_rank(np.array([[1, 0], [0, -1]])) == 2
    assert exact_rank(np.zeros((0, 0))) == 0
    assert exact_rank(np.zeros((2, 3), int)) == 0


def test_rank_nullity_independent_of_weights():
    cx = random_flag(9, 0.5, 5)
    heavy = build_complex([list(s) for s in cx.simplices if s],
                          {",".join(map(str, s)): 1 + (sum(s) % 3) for s in cx.simplices})
    for k in range(cx.dim + 1):
        assert betti_rank_nullity(cx, k) == betti(heavy, k)


def test_spectrum_hollow_triangle_edges(oracle):
    rep = spectrum(assemble_laplacian(cycle(3), "hodge", 1))
    np.testing.assert_allclose(rep.eigenvalues, oracle["F2_hodge1_eigs"], atol=1e-13)
    assert rep.kernel_dim == 1
    assert rep.gap == pytest.approx(3.0)
    assert rep.to_dict()["lambda2"] == pytest.approx(0.0, abs=1e-13)


def test_spectrum_filled_triangle_has_no_gap_issue():
    rep = spectrum(assemble_laplacian(fixtures()["F3"], "hodge", 1))
    assert rep.kernel_dim == 0 and rep.gap == pytest.approx(3.0)


@pytest.mark.parametrize("cx", [torus(), full_simplex(4), random_flag(8, 0.6, 9)], ids=["torus", "K4", "flag"])
def test_rayleigh(cx, rng):
    for k in cx.degree_slices:
        assert rayleigh_check(assemble_laplacian(cx, "hodge", k), rng, samples=200).passed


@pytest.mark.parametrize("cx", [*fixtures().values(), torus(), full_simplex(5), random_flag(10, 0.5, 11)],
                         ids=["F1", "F2", "F3", "F4", "F5", "torus", "K5", "flag"])
def test_norm_bound_suite(cx):
    reports = norm_bound_suite(cx)
    assert len(reports) >= 6
    for rep in reports:
        assert rep.passed, (rep.check, rep.worst_sample)


def test_norm_bound_suite_is_tight_on_single_edge():
    # γ/m = 1 for both vertices, D = 2; the up Laplacian on vertices has ||.||_1 = 2
    reps = {r.check: r for r in norm_bound_suite(fixtures()["F1"])}
    assert reps["coboundary-1"].max_violation == 0.0
    assert reps["laplacian-up-down"].max_violation == 0.0


def test_norm_suite_exact_norm_agrees_with_float():
    from hodgeheat.norms import norm_1, norm_inf
    cx = fixtures()["F5"]
    reps = {r.check: r for r in norm_bound_suite(cx)}
    g = global_laplacian(cx, "hodge")
    assert reps["laplacian-hodge"].worst_sample is not None
    lhs = reps["laplacian-hodge"]
    assert max(norm_1(g.matrix, g.measure), norm_inf(g.matrix)) <= lhs.params["D"] + 1e-12
