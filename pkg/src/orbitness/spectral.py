"""Spectral structure: eigenvalue clusters, Jordan block sizes from rank
sequences, the invariant-factor partition pi(A), uni-real phases and the
degeneration sequences whose normalized limits are nilpotent of type pi(A).

Clustering
----------
Eigenvalues of a defective block of size k are computed with a spread of
order eps**(1/k), far above any fixed "coincident eigenvalue" tolerance.
Clusters are therefore taken from the single-linkage dendrogram of the
computed spectrum, top-down: a subtree is accepted as one eigenvalue of
multiplicity m when either its diameter is below ``tol * ||A||`` or the
normalized power ((A - mu I) / ||A - mu I||)^m at the subtree mean mu has
nullity m. The mean of a perturbed defective cluster is accurate to
O(eps), so the power test is sharp there, while two genuinely distinct
eigenvalues at distance g fail it by a margin of order (g/||A||)^m.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import linkage, to_tree
from scipy.spatial.distance import pdist

from .errors import AmbiguousClusteringError, OrbitError, ScalarMatrixError
from .linalg import eigenvalues, norm
from .partitions import Partition

CLUSTER_TOL = 1e-7
RANK_ATOL = 1e-9
UNI_REAL_TOL = 1e-7
#: Singular values within this factor of the rank threshold are ambiguous.
AMBIGUITY_BAND = 10.0


class ZeroSpectrumError(OrbitError, ValueError):
    pass


@dataclass(frozen=True)
class SpectralProfile:
    clusters: list[tuple[complex, int]]
    diagonalizable: bool
    nilpotent: bool
    uni_real_phase: complex | None
    jordan_blocks: list[tuple[int, ...]]
    invariant_partition: Partition
    eigenvalues: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.invariant_partition.n

    @property
    def jordan_type(self) -> Partition | None:
        """Block sizes of a nilpotent matrix; None otherwise."""
        if not self.nilpotent:
            return None
        return Partition.canonical(self.jordan_blocks[0])

    def realified(self) -> np.ndarray | None:
        """Cluster centers divided by the uni-real phase, with multiplicity."""
        if self.uni_real_phase is None:
            return None
        vals = []
        for center, mult in self.clusters:
            vals.extend([(center / self.uni_real_phase).real] * mult)
        return np.array(sorted(vals, reverse=True))

    def to_dict(self) -> dict:
        phase = self.uni_real_phase
        return {
            "clusters": [{"center": [c.real, c.imag], "multiplicity": m} for c, m in self.clusters],
            "diagonalizable": self.diagonalizable,
            "nilpotent": self.nilpotent,
            "uni_real_phase": None if phase is None else [phase.real, phase.imag],
            "jordan_blocks": [list(b) for b in self.jordan_blocks],
            "invariant_partition": list(self.invariant_partition.parts),
        }


def _sv_power(a: np.ndarray, mu: complex, power: int) -> np.ndarray:
    """Singular values of ((A - mu I) / ||A - mu I||_2)^power, descending."""
    n = a.shape[0]
    b = a - mu * np.eye(n)
    s = np.linalg.norm(b, 2)
    if s == 0.0:
        return np.zeros(n)
    b = b / s
    p = np.linalg.matrix_power(b, power)
    return np.linalg.svd(p, compute_uv=False)


def _rank_from_sv(sv: np.ndarray, atol: float) -> int:
    return int(np.count_nonzero(sv > atol))


def _check_margin(value: float, atol: float, what: str):
    if atol / AMBIGUITY_BAND < value < atol * AMBIGUITY_BAND:
        raise AmbiguousClusteringError(
            f"{what}: singular value {value:.3e} is within a factor "
            f"{AMBIGUITY_BAND:g} of the rank threshold {atol:.1e}; refine tolerances")


def _cluster_ok(a, members, eigs, diam, scale, tol, atol) -> bool:
    m = len(members)
    if m == 1 or diam <= tol * scale:
        return True
    mu = complex(np.mean(eigs[members]))
    sv = _sv_power(a, mu, m)
    deciding = sv[-m]
    _check_margin(deciding, atol, f"cluster of size {m} at {mu:.6g}")
    return bool(deciding <= atol)


def cluster_eigenvalues(a, eigs=None, tol: float = CLUSTER_TOL,
                        atol: float = RANK_ATOL) -> list[tuple[complex, list[int]]]:
    """Group eigenvalue indices into clusters; returns (center, indices) pairs."""
    a = np.asarray(a, dtype=complex)
    eigs = eigenvalues(a) if eigs is None else np.asarray(eigs)
    n = eigs.size
    scale = max(norm(a), np.finfo(float).tiny)
    if n == 1:
        return [(complex(eigs[0]), [0])]
    pts = np.column_stack([eigs.real, eigs.imag])
    root = to_tree(linkage(pdist(pts), method="single"))

    out: list[tuple[complex, list[int]]] = []
    stack = [root]
    while stack:
        node = stack.pop()
        members = node.pre_order()
        if _cluster_ok(a, members, eigs, node.dist, scale, tol, atol):
            out.append((complex(np.mean(eigs[members])), sorted(members)))
        else:
            stack.extend([node.get_right(), node.get_left()])
    out.sort(key=lambda c: (-c[0].real, -c[0].imag))
    return out


def block_sizes(a, mu: complex, multiplicity: int, atol: float = RANK_ATOL) -> tuple[int, ...]:
    """Jordan block sizes at mu from r_l = rank((A - mu I)^l):
    #blocks of size >= l is r_{l-1} - r_l."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    ranks = [n]
    for l in range(1, multiplicity + 1):
        sv = _sv_power(a, mu, l)
        r = _rank_from_sv(sv, atol)
        for idx in (r - 1, r):
            if 0 <= idx < n:
                _check_margin(sv[idx], atol, f"rank of power {l} at {mu:.6g}")
        ranks.append(r)
    if n - ranks[-1] != multiplicity:
        raise AmbiguousClusteringError(
            f"generalized eigenspace at {mu:.6g} has dimension {n - ranks[-1]}, "
            f"expected {multiplicity}")
    at_least = [ranks[l - 1] - ranks[l] for l in range(1, multiplicity + 1)]
    sizes = []
    for l in range(multiplicity, 0, -1):
        exactly = at_least[l - 1] - (at_least[l] if l < multiplicity else 0)
        sizes.extend([l] * exactly)
    return tuple(sorted(sizes, reverse=True))


def invariant_partition_from_blocks(blocks: list[tuple[int, ...]]) -> Partition:
    """m_j = sum over eigenvalues of the j-th largest block."""
    depth = max(len(b) for b in blocks)
    parts = [sum(b[j] for b in blocks if j < len(b)) for j in range(depth)]
    return Partition.canonical(parts)


def uni_real_phase(eigs, tol: float = UNI_REAL_TOL) -> complex | None:
    """Unit c with arg in [0, pi) and every eigs/c real, or None.

    The candidate phase is that of the largest eigenvalue.
    """
    eigs = np.asarray(eigs, dtype=complex).ravel()
    big = np.max(np.abs(eigs)) if eigs.size else 0.0
    if big <= np.finfo(float).tiny:
        raise ZeroSpectrumError("all eigenvalues vanish; nilpotent input has no phase")
    lead = eigs[np.argmax(np.abs(eigs))]
    c = lead / abs(lead)
    ang = np.angle(c)
    if ang < 0 or ang >= np.pi - 1e-15:
        c = -c
    if abs(c.imag) < 1e-15 and c.real > 0:
        c = 1.0 + 0.0j
    if np.max(np.abs((eigs / c).imag)) > tol * big:
        return None
    return complex(c)


def spectral_profile(a, tol: float = CLUSTER_TOL, rank_atol: float = RANK_ATOL,
                     uni_real_tol: float = UNI_REAL_TOL) -> SpectralProfile:
    a = np.asarray(a, dtype=complex)
    eigs = eigenvalues(a)
    clusters = cluster_eigenvalues(a, eigs, tol=tol, atol=rank_atol)
    centers, blocks = [], []
    for center, members in clusters:
        mult = len(members)
        centers.append((center, mult))
        blocks.append(block_sizes(a, center, mult, atol=rank_atol))
    nilpotent = len(centers) == 1
    if nilpotent:
        centers = [(0j, centers[0][1])]
    diagonalizable = all(all(k == 1 for k in b) for b in blocks)
    phase = None
    if not nilpotent:
        phase = uni_real_phase([c for c, m in centers for _ in range(m)], uni_real_tol)
    return SpectralProfile(
        clusters=centers,
        diagonalizable=diagonalizable,
        nilpotent=nilpotent,
        uni_real_phase=phase,
        jordan_blocks=blocks,
        invariant_partition=invariant_partition_from_blocks(blocks),
        eigenvalues=eigs,
    )


def jordan_block(size: int, eigenvalue: complex = 0.0) -> np.ndarray:
    """J_k^lambda with ones on the subdiagonal."""
    m = eigenvalue * np.eye(size, dtype=complex)
    if size > 1:
        m[np.arange(1, size), np.arange(size - 1)] = 1.0
    return m


def jordan_matrix(blocks) -> np.ndarray:
    """Block diagonal of J_k^lambda for (k, lambda) pairs."""
    mats = [jordan_block(k, lam) for k, lam in blocks]
    n = sum(m.shape[0] for m in mats)
    out = np.zeros((n, n), dtype=complex)
    i = 0
    for m in mats:
        k = m.shape[0]
        out[i:i + k, i:i + k] = m
        i += k
    return out


@dataclass(frozen=True)
class DegenerationWitness:
    """A_i = diag_j(diag(lambda_b I_{k_jb}) + i J^0_{m_j}), similar to ``base``
    for every i > 0; A_i / ||A_i|| tends to diag_j(J^0_{m_j}) / norm."""

    base: np.ndarray
    factor_blocks: list[list[tuple[int, complex]]]
    predicted_type: Partition

    def element(self, i: float) -> np.ndarray:
        mats = []
        for fac in self.factor_blocks:
            diag = np.concatenate([np.full(k, lam, dtype=complex) for k, lam in fac])
            m = diag.size
            mats.append(np.diag(diag) + i * jordan_block(m, 0.0))
        return _block_diag(mats)

    def normalized(self, i: float) -> np.ndarray:
        e = self.element(i)
        return e / norm(e)

    def limit(self) -> np.ndarray:
        nil = _block_diag([jordan_block(sum(k for k, _ in fac), 0.0) for fac in self.factor_blocks])
        return nil / norm(nil)


def _block_diag(mats) -> np.ndarray:
    n = sum(m.shape[0] for m in mats)
    out = np.zeros((n, n), dtype=complex)
    i = 0
    for m in mats:
        k = m.shape[0]
        out[i:i + k, i:i + k] = m
        i += k
    return out


def degeneration_witness(a, profile: SpectralProfile | None = None) -> DegenerationWitness:
    a = np.asarray(a, dtype=complex)
    if norm(a - np.trace(a) / a.shape[0] * np.eye(a.shape[0])) == 0.0:
        raise ScalarMatrixError("scalar matrices have a single-point orbit")
    profile = profile or spectral_profile(a)
    depth = max(len(b) for b in profile.jordan_blocks)
    factors = []
    for j in range(depth):
        fac = [(b[j], center) for (center, _), b in zip(profile.clusters, profile.jordan_blocks)
               if j < len(b)]
        factors.append(fac)
    return DegenerationWitness(a, factors, profile.invariant_partition)


def one_parameter_limit(a, weights) -> np.ndarray:
    """Normalized limit of D_t A D_t^{-1} as t -> infinity, D_t = diag(t^w).

    Entry (i, j) scales like t^(w_i - w_j); the limit keeps the entries of
    maximal exponent among the nonzero ones.
    """
    a = np.asarray(a, dtype=complex)
    w = np.asarray(weights, dtype=float)
    expo = w[:, None] - w[None, :]
    mask = np.abs(a) > 1e-12 * norm(a)
    top = np.max(expo[mask])
    lim = np.where(mask & (expo == top), a, 0.0)
    return lim / norm(lim)
