import numpy as np
import pytest

from hodgeheat.generators import fixtures, path, torus
from hodgeheat.operators import assemble_laplacian
from hodgeheat.pipeline import prepare
from hodgeheat.geometry import lipschitz_constant
from hodgeheat.resolvent import (OnSpectrum, psi_family, rectangle_grid, resolvent,
                                 resolvent_decay_check, resolvent_identity_defect,
                                 squared_resolvent_check, weighted_resolvent_check)


def test_single_edge_resolvent_oracle(oracle):
    lap = assemble_laplacian(fixtures()["F1"], "hodge", 0)
    rk = resolvent(lap, -1.0)
    np.testing.assert_allclose(rk.matrix, oracle["F1_resolvent_minus1"], atol=1e-15)
    np.testing.assert_allclose(rk.matrix, np.linalg.inv(lap.matrix + np.eye(2)), atol=1e-15)


def test_weighted_resolvent_matches_inverse():
    lap = assemble_laplacian(fixtures()["F5"], "hodge", 0)
    z = -0.5 + 0.3j
    rk = resolvent(lap, z, squared=True)
    inv = np.linalg.inv(lap.matrix - z * np.eye(2))
    np.testing.assert_allclose(rk.matrix, inv, atol=1e-14)
    np.testing.assert_allclose(rk.squared, inv @ inv, atol=1e-14)
    assert resolvent_identity_defect(lap, rk) < 1e-14
    np.testing.assert_allclose(rk.kernel, inv / lap.measure[None, :])


def test_on_spectrum_is_refused():
    lap = assemble_laplacian(fixtures()["F1"], "hodge", 0)
    with pytest.raises(OnSpectrum):
        resolvent(lap, 0.0)
    with pytest.raises(OnSpectrum):
        resolvent(lap, 2.0 + 1e-15)


def test_rectangle_grid_shape():
    zs = rectangle_grid((-2, -1), (0, 1), (3, 2))
    assert zs.size == 6
    assert zs[0] == -2 and zs[-1] == -1 + 1j


def test_psi_family_lipschitz(rng):
    met = prepare(path(6), 0).metric
    for psi in psi_family(met, 0.3, rng, count=6):
        assert lipschitz_constant(psi, met) == pytest.approx(0.3)
        assert psi.min() == 0.0


@pytest.mark.parametrize("cx, k", [(fixtures()["F4"], 0), (torus(), 1)], ids=["path", "torus"])
def test_decay_and_squared_resolvent(cx, k):
    ctx = prepare(cx, k)
    assert resolvent_decay_check(ctx.lap, ctx.metric).passed
    rep = squared_resolvent_check(ctx.lap, ctx.metric, z_grid=rectangle_grid(shape=(3, 3)))
    assert rep.passed, rep.worst_sample


def test_alpha_above_floor_rejected():
    ctx = prepare(path(4), 0)
    with pytest.raises(ValueError, match="alpha"):
        resolvent_decay_check(ctx.lap, ctx.metric, alpha=0.0)


def test_weighted_resolvent_ratio(rng):
    ctx = prepare(path(6), 0)
    rep = weighted_resolvent_check(ctx.lap, ctx.metric, z_grid=rectangle_grid(shape=(3, 3)), rng=rng)
    assert rep.passed
    assert rep.extra["zero_psi_defect"] < 1e-12
    assert rep.extra["ratio"] >= 1.0 - 1e-12
