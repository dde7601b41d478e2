"""Gradient descent of K over an adjoint orbit.

Each step conjugates the iterate by exp(eta * g), where g = 4 G(A) / den^2
is the (Hermitian) gradient of K with respect to the Lie-algebra direction,
so iterates never leave the orbit except by rounding. Steps are chosen by
backtracking with an Armijo test; steps that push the iterate closer to Z
than ``z_floor * ||A||^4`` are rejected.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import InZError, ScalarMatrixError
from .kfun import denominator, variation_matrix
from .linalg import as_matrix, matrix_exp, norm, random_traceless

log = logging.getLogger(__name__)

ARMIJO_C = 1e-4
MAX_BACKTRACKS = 60
STEP_GROWTH = 2.0
#: Largest allowed |eta * eigenvalue(g)| in one step.
MAX_LOG_STEP = 1.0
DIVERGENCE_FACTOR = 1e3
DIVERGENCE_WINDOW = 50
START_ATTEMPTS = 20
EPS = float(np.finfo(float).eps)
#: Line-search stalls with ||g||^2 <= PRECISION_FACTOR * eps * K count as converged.
PRECISION_FACTOR = 1e4
#: Best iterates with denominator ratio below this are reported as approaching Z.
Z_APPROACH_RATIO = 1e-4


@dataclass(frozen=True)
class OptimizerConfig:
    max_iters: int = 5000
    grad_tol: float = 1e-9
    step_init: float = 1e-2
    backtrack_factor: float = 0.5
    restarts: int = 5
    seed: int = 20240521
    z_floor: float = 1e-8
    sample_spread: float = 1.0

    def __post_init__(self):
        for name in ("max_iters", "grad_tol", "step_init", "backtrack_factor", "restarts",
                     "z_floor", "sample_spread"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.backtrack_factor < 1:
            raise ValueError("backtrack_factor must be < 1")
        if not self.z_floor < 1:
            raise ValueError("z_floor must be < 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass
class RestartResult:
    restart: int
    best_k: float
    best_matrix: np.ndarray
    grad_residual_at_best: float
    iterations: int
    k_trajectory: list[float]
    iterate_norm_trajectory: list[float]
    converged: bool
    diverging: bool
    z_floor_bound: bool
    stop_reason: str
    denominator_ratio: float


@dataclass
class MinimizationReport:
    best_k: float
    best_matrix: np.ndarray
    grad_residual_at_best: float
    iterations_used: int
    k_trajectory: list[float]
    iterate_norm_trajectory: list[float]
    diverging: bool
    converged: bool
    z_floor_bound: bool
    best_restart: int
    denominator_ratio: float = 1.0
    restarts: list[dict] = field(default_factory=list)
    config: OptimizerConfig | None = None

    @property
    def boundary_approach(self) -> str | None:
        """"z" when the best iterate sits near Z, "infinity" when iterates diverge."""
        if self.z_floor_bound or self.denominator_ratio < Z_APPROACH_RATIO:
            return "z"
        if self.diverging:
            return "infinity"
        return None

    def to_dict(self, thin: int = 1) -> dict:
        thin = max(int(thin), 1)
        m = self.best_matrix
        return {
            "best_k": self.best_k,
            "grad_residual_at_best": self.grad_residual_at_best,
            "iterations_used": self.iterations_used,
            "converged": self.converged,
            "diverging": self.diverging,
            "z_floor_bound": self.z_floor_bound,
            "best_restart": self.best_restart,
            "denominator_ratio": self.denominator_ratio,
            "boundary_approach": self.boundary_approach,
            "best_matrix": {"n": m.shape[0], "re": m.real.tolist(), "im": m.imag.tolist()},
            "k_trajectory": self.k_trajectory[::thin],
            "iterate_norm_trajectory": self.iterate_norm_trajectory[::thin],
            "restarts": self.restarts,
            "config": None if self.config is None else asdict(self.config),
        }


def _k_and_ratio(a):
    c = a @ a.conj().T - a.conj().T @ a
    num = float(np.vdot(c, c).real)
    n2 = float(np.vdot(a, a).real)
    den = denominator(a)
    return num, den, n2 * n2


def gradient_norm(a) -> float:
    """||4 G(A) / den^2|| at A / ||A||: the norm of the K-gradient, scale-free."""
    ahat = np.asarray(a, dtype=complex) / norm(a)
    den = denominator(ahat)
    if den == 0.0:
        return float("inf")
    return 4.0 * norm(variation_matrix(ahat)) / den ** 2


def _hermitian_exp_pair(g: np.ndarray, eta: float):
    """exp(eta g) and its inverse for Hermitian g."""
    w, u = np.linalg.eigh(g)
    up = (u * np.exp(eta * w)) @ u.conj().T
    dn = (u * np.exp(-eta * w)) @ u.conj().T
    return up, dn


def random_start(a: np.ndarray, rng: np.random.Generator, spread: float, z_floor: float) -> np.ndarray:
    n = a.shape[0]
    for _ in range(START_ATTEMPTS):
        b = random_traceless(rng, n)
        b *= spread / norm(b)
        g = matrix_exp(b)
        start = g @ a @ matrix_exp(-b)
        num, den, n4 = _k_and_ratio(start)
        if den > z_floor * n4:
            return start
    raise InZError("could not sample a starting point outside the Z floor")


def descend(a0: np.ndarray, cfg: OptimizerConfig, restart: int = 0) -> RestartResult:
    """Single descent run from ``a0`` (already a point of the orbit)."""
    a = np.array(a0, dtype=complex)
    a0_norm = norm(a)
    num, den, n4 = _k_and_ratio(a)
    if den <= cfg.z_floor * n4:
        raise InZError("starting point is below the Z floor")
    k = num / den
    ks, norms = [k], [a0_norm]
    best = (k, a.copy())
    eta = cfg.step_init
    g_prev, eta_prev = None, 0.0
    floor_hit = False
    converged = False
    reason = "max_iters"
    resid = np.inf
    it = 0
    for it in range(1, cfg.max_iters + 1):
        scale = norm(a)
        ahat = a / scale
        numh, denh, _ = _k_and_ratio(ahat)
        g = 4.0 * variation_matrix(ahat) / denh ** 2
        g = 0.5 * (g + g.conj().T)
        gsq = float(np.vdot(g, g).real)
        resid = np.sqrt(gsq)
        if resid <= cfg.grad_tol:
            converged = True
            reason = "grad_tol"
            break
        if g_prev is not None:
            # Barzilai-Borwein estimate from the last accepted move
            y = g - g_prev
            sy = -eta_prev * float(np.vdot(g_prev, y).real)
            if sy > 0:
                eta = eta_prev ** 2 * float(np.vdot(g_prev, g_prev).real) / sy
        top = np.max(np.abs(np.linalg.eigvalsh(g)))
        eta = min(eta, MAX_LOG_STEP / top)
        accepted = False
        for _ in range(MAX_BACKTRACKS):
            up, dn = _hermitian_exp_pair(g, eta)
            trial = up @ a @ dn
            tnum, tden, tn4 = _k_and_ratio(trial)
            if tden <= cfg.z_floor * tn4:
                floor_hit = True
            elif tnum / tden <= k - ARMIJO_C * eta * gsq:
                accepted = True
                break
            eta *= cfg.backtrack_factor
        if not accepted:
            # a stall is convergence when no step can move K above rounding
            if gsq <= PRECISION_FACTOR * EPS * max(k, EPS):
                converged = True
                reason = "precision"
            else:
                reason = "line_search"
            break
        a = trial
        g_prev, eta_prev = g, eta
        k = tnum / tden
        ks.append(k)
        norms.append(norm(a))
        if k < best[0]:
            best = (k, a.copy())
        eta *= STEP_GROWTH
    best_k, best_a = best
    best_resid = gradient_norm(best_a)
    bnum, bden, bn4 = _k_and_ratio(best_a)
    recent = ks[-DIVERGENCE_WINDOW - 1:]
    diverging = bool(norms[-1] > DIVERGENCE_FACTOR * a0_norm and len(recent) > 1
                     and recent[-1] < recent[0])
    return RestartResult(restart, float(best_k), best_a, float(best_resid), it, ks, norms,
                         converged, diverging, floor_hit, reason, bden / bn4)


def _run_restart(args):
    a, cfg, r = args
    rng = np.random.default_rng([cfg.seed, r])
    start = random_start(a, rng, cfg.sample_spread, cfg.z_floor)
    return descend(start, cfg, r)


def minimize_over_orbit(a, cfg: OptimizerConfig | None = None, workers: int = 1) -> MinimizationReport:
    """Multi-restart minimization of K over the orbit of ``a``.

    Restart r draws its starting conjugation from the RNG stream (seed, r),
    so results do not depend on ``workers``.
    """
    cfg = cfg or OptimizerConfig()
    a = as_matrix(a, trace_free=True)
    if norm(a) == 0.0:
        raise ScalarMatrixError("cannot minimize over the orbit of 0")
    jobs = [(a, cfg, r) for r in range(cfg.restarts)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_restart, jobs))
    else:
        results = [_run_restart(j) for j in jobs]
    best = min(results, key=lambda r: (r.best_k, r.restart))
    for r in results:
        log.debug("restart %d: best K %.12g after %d iterations (%s)",
                  r.restart, r.best_k, r.iterations, r.stop_reason)
    return MinimizationReport(
        best_k=best.best_k,
        best_matrix=best.best_matrix,
        grad_residual_at_best=best.grad_residual_at_best,
        iterations_used=sum(r.iterations for r in results),
        k_trajectory=best.k_trajectory,
        iterate_norm_trajectory=best.iterate_norm_trajectory,
        diverging=any(r.diverging for r in results),
        converged=best.converged,
        z_floor_bound=any(r.z_floor_bound for r in results),
        best_restart=best.restart,
        denominator_ratio=best.denominator_ratio,
        restarts=[{"restart": r.restart, "best_k": r.best_k, "iterations": r.iterations,
                   "converged": r.converged, "diverging": r.diverging,
                   "z_floor_bound": r.z_floor_bound, "stop_reason": r.stop_reason}
                  for r in results],
        config=cfg,
    )


def charpoly_drift(a, b) -> float:
    """max_k |c_k(B) - c_k(A)| / ||A||^k over characteristic polynomial coefficients."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    ca, cb = np.poly(a), np.poly(b)
    s = norm(a)
    return float(max(abs(cb[k] - ca[k]) / s ** k for k in range(1, len(ca))))
