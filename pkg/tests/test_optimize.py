import numpy as np
import pytest

from orbitness.classify import classify_orbit
from orbitness.errors import InZError, ScalarMatrixError, TraceFreeError
from orbitness.kfun import k_value
from orbitness.linalg import random_conjugator
from orbitness.optimize import (
    OptimizerConfig,
    charpoly_drift,
    descend,
    gradient_norm,
    minimize_over_orbit,
)
from orbitness.sl2 import build_standard_triple, e_n
from orbitness.spectral import jordan_matrix

from conftest import naive_k

FAST = OptimizerConfig(max_iters=1500, restarts=3)


def conj(rng, a, spread=0.7):
    g = random_conjugator(rng, a.shape[0], spread)
    return g @ a @ np.linalg.inv(g)


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(backtrack_factor=1.5)
    with pytest.raises(ValueError):
        OptimizerConfig(z_floor=2.0)
    with pytest.raises(ValueError):
        OptimizerConfig(restarts=0)
    with pytest.raises(ValueError):
        OptimizerConfig(grad_tol=-1.0)


def test_e3_conjugate_reaches_c3(rng):
    rep = minimize_over_orbit(conj(rng, e_n(3)))
    assert rep.best_k == pytest.approx(0.5, abs=1e-3)
    assert rep.converged


def test_case1_reaches_zero(rng):
    rep = minimize_over_orbit(conj(rng, np.diag([1, 1j, -1 - 1j])), FAST)
    assert rep.best_k <= 1e-3


def test_case5_approaches_z(rng):
    rep = minimize_over_orbit(conj(rng, np.diag([3.0, -1.0, -2.0])))
    assert 1 / 14 - 1e-6 <= rep.best_k <= 1 / 14 + 0.01
    assert rep.boundary_approach == "z" or rep.diverging or rep.z_floor_bound


def test_trajectory_monotone_and_on_orbit(rng):
    a = conj(rng, jordan_matrix([(2, 1.0), (1, -2.0)]))
    rep = minimize_over_orbit(a, FAST)
    ks = np.array(rep.k_trajectory)
    assert np.all(np.diff(ks) <= 1e-15 * ks[:-1])
    drift = charpoly_drift(a, rep.best_matrix)
    assert drift <= 1e-6 * max(rep.iterations_used / 1000, 1)
    assert naive_k(rep.best_matrix) == pytest.approx(rep.best_k, rel=1e-9)


def test_deterministic_and_worker_independent(rng):
    a = conj(rng, build_standard_triple((3, 1)).E)
    cfg = OptimizerConfig(max_iters=300, restarts=2)
    r1 = minimize_over_orbit(a, cfg)
    r2 = minimize_over_orbit(a, cfg)
    r3 = minimize_over_orbit(a, cfg, workers=2)
    assert r1.best_k == r2.best_k == r3.best_k
    assert np.array_equal(r1.best_matrix, r3.best_matrix)
    assert r1.k_trajectory == r3.k_trajectory


def test_seed_changes_starts(rng):
    a = conj(rng, build_standard_triple((3, 1)).E)
    r1 = minimize_over_orbit(a, OptimizerConfig(max_iters=5, restarts=1, seed=1))
    r2 = minimize_over_orbit(a, OptimizerConfig(max_iters=5, restarts=1, seed=2))
    assert r1.k_trajectory[0] != r2.k_trajectory[0]


def test_errors():
    with pytest.raises(TraceFreeError):
        minimize_over_orbit(np.diag([1.0, 1.0, -1.0]))
    with pytest.raises(ScalarMatrixError):
        minimize_over_orbit(np.zeros((2, 2)))
    with pytest.raises(InZError):
        descend(np.diag([1.0, -1.0]), OptimizerConfig())


def test_gradient_norm_zero_at_critical_points():
    for p in [(3,), (3, 1), (2, 2)]:
        assert gradient_norm(build_standard_triple(p).E) < 1e-12


def test_report_serializes(rng):
    rep = minimize_over_orbit(conj(rng, e_n(3)), OptimizerConfig(max_iters=50, restarts=1))
    d = rep.to_dict(thin=5)
    assert len(d["k_trajectory"]) == len(rep.k_trajectory[::5])
    assert d["best_matrix"]["n"] == 3
    assert d["config"]["restarts"] == 1


@pytest.mark.slow
@pytest.mark.parametrize("a", [
    np.diag([2.0, 0.0, -2.0]),
    np.diag([1.0, -1.0]),
    e_n(4),
    build_standard_triple((2, 2, 1)).E,
    np.diag([2.0, 1.0, 0.0, -1.0, -2.0]),
    np.diag([3.0, 1.0, -1.0, -3.0]),
    np.diag([1.0, -1.0, 1.0, -1.0, 0.0]),
])
def test_never_beats_classification(a, rng):
    cls = classify_orbit(a)
    rep = minimize_over_orbit(conj(rng, a, 0.5))
    inf = float(cls.infimum)
    assert rep.best_k >= inf - 1e-6
    if cls.achieved:
        assert rep.best_k <= inf + 1e-3
    assert k_value(rep.best_matrix) == pytest.approx(rep.best_k, rel=1e-9)
