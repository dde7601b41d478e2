"""Dense complex matrix helpers and the Hermitian form <X, Y> = tr(X Y*).

Matrices are plain ``numpy`` arrays of shape ``(n, n)`` with complex dtype.
:func:`as_matrix` is the single validation entry point; everything else
assumes its output.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import DimensionError, EigenSolverError, NonFiniteError, TraceFreeError

#: Relative trace tolerance: |tr A| <= TRACE_TOL * ||A||_F.
TRACE_TOL = 1e-10
#: Default relative threshold for :func:`numerical_rank`.
RANK_TOL = 1e-9


def as_matrix(a, trace_free: bool = False, trace_tol: float = TRACE_TOL) -> np.ndarray:
    """Coerce ``a`` to a square complex matrix of size n >= 2.

    With ``trace_free=True`` the trace is checked against ``trace_tol``
    relative to the Frobenius norm; failing inputs raise
    :class:`TraceFreeError` rather than being projected.
    """
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] < 2:
        raise DimensionError("matrix dimension must be at least 2")
    if not np.all(np.isfinite(m)):
        raise NonFiniteError("matrix has non-finite entries")
    if trace_free:
        tr = np.trace(m)
        if abs(tr) > trace_tol * max(norm(m), np.finfo(float).tiny):
            raise TraceFreeError(complex(tr))
    return m


def _check_same_shape(x, y):
    if np.shape(x) != np.shape(y):
        raise DimensionError(f"shape mismatch: {np.shape(x)} vs {np.shape(y)}")


def inner(x, y) -> complex:
    """tr(X Y*), conjugate-linear in the second slot."""
    x = np.asarray(x)
    y = np.asarray(y)
    _check_same_shape(x, y)
    return complex(np.vdot(y, x))


def norm(x) -> float:
    """Frobenius norm, i.e. sqrt(<X, X>)."""
    return float(np.linalg.norm(x))


def commutator(x, y) -> np.ndarray:
    x = np.asarray(x)
    y = np.asarray(y)
    _check_same_shape(x, y)
    return x @ y - y @ x


def adjoint_star(x) -> np.ndarray:
    """Conjugate transpose X*."""
    return np.conj(np.asarray(x)).T


def matrix_exp(b) -> np.ndarray:
    """Matrix exponential (scaling and squaring with a Pade core)."""
    b = np.asarray(b, dtype=complex)
    if not np.all(np.isfinite(b)):
        raise NonFiniteError("cannot exponentiate a matrix with non-finite entries")
    return scipy.linalg.expm(b)


def numerical_rank(x, tol_rel: float = RANK_TOL, atol: float | None = None) -> int:
    """Number of singular values above ``tol_rel * sigma_max``.

    If ``atol`` is given it replaces the relative threshold; this is what the
    rank-sequence code uses on pre-normalized matrix powers, where a power that
    should vanish consists only of rounding noise.
    """
    if tol_rel <= 0:
        raise ValueError("tol_rel must be positive")
    s = np.linalg.svd(np.asarray(x, dtype=complex), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    thresh = atol if atol is not None else tol_rel * s[0]
    return int(np.count_nonzero(s > thresh))


def eigenvalues(x) -> np.ndarray:
    """All n eigenvalues with multiplicity, unordered."""
    x = np.asarray(x, dtype=complex)
    if not np.all(np.isfinite(x)):
        raise NonFiniteError("matrix has non-finite entries")
    try:
        return np.linalg.eigvals(x)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(str(exc)) from exc


def unit(n: int, i: int, j: int) -> np.ndarray:
    """Matrix unit E_ij."""
    m = np.zeros((n, n), dtype=complex)
    m[i, j] = 1.0
    return m


def random_complex(rng: np.random.Generator, shape, scale: float = 1.0) -> np.ndarray:
    """Standard complex Gaussian samples."""
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_traceless(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    m = random_complex(rng, (n, n), scale)
    return m - np.trace(m) / n * np.eye(n)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed unitary via QR with phase correction."""
    q, r = np.linalg.qr(random_complex(rng, (n, n)))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_conjugator(rng: np.random.Generator, n: int, spread: float = 1.0) -> np.ndarray:
    """exp(B) for a random trace-free B with ||B|| about ``spread``; determinant 1."""
    b = random_traceless(rng, n)
    b *= spread / max(norm(b), 1e-300)
    return matrix_exp(b)


def conjugate(g, a, g_inv=None) -> np.ndarray:
    """g A g^{-1}."""
    if g_inv is None:
        g_inv = np.linalg.inv(g)
    return g @ a @ g_inv
