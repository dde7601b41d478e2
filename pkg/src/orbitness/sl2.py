"""Standard sl(2, C)-triples of type pi and elements a E + b Etilde + c X."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import InZError, PartitionError
from .partitions import Partition, as_partition, c_constant

#: Relative tolerance of the closed-form Z criterion on coefficients.
COEFF_Z_TOL = 1e-10


def weights(k: int) -> np.ndarray:
    """Superdiagonal entries r_j = sqrt(j (k - j)), j = 1..k-1."""
    j = np.arange(1, k)
    return np.sqrt(j * (k - j))


def e_block(k: int) -> np.ndarray:
    m = np.zeros((k, k), dtype=complex)
    if k > 1:
        m[np.arange(k - 1), np.arange(1, k)] = weights(k)
    return m


def etilde_block(k: int) -> np.ndarray:
    return e_block(k).T.copy()


def x_block(k: int) -> np.ndarray:
    return np.diag(np.arange(k - 1, -k, -2).astype(complex))


def _block_diag(blocks) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=complex)
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return out


@dataclass(frozen=True)
class StandardTriple:
    """E, Etilde = E*, X = [E, Etilde] for the partition ``pi``, blocks in
    non-increasing order."""

    pi: Partition
    E: np.ndarray
    Etilde: np.ndarray
    X: np.ndarray

    @property
    def n(self) -> int:
        return self.pi.n

    @property
    def c_value(self) -> Fraction:
        return c_constant(self.pi)

    def element(self, a=0.0, b=0.0, c=0.0) -> np.ndarray:
        return embed_element(self, a, b, c)


@lru_cache(maxsize=256)
def _triple(parts: tuple[int, ...]) -> StandardTriple:
    pi = Partition(parts)
    E = _block_diag([e_block(k) for k in parts])
    Et = _block_diag([etilde_block(k) for k in parts])
    X = _block_diag([x_block(k) for k in parts])
    for m in (E, Et, X):
        m.setflags(write=False)
    return StandardTriple(pi, E, Et, X)


def build_standard_triple(pi) -> StandardTriple:
    return _triple(as_partition(pi).parts)


def e_n(n: int) -> np.ndarray:
    return e_block(n)


def x_n(n: int) -> np.ndarray:
    return x_block(n)


def embed_element(triple: StandardTriple, a=0.0, b=0.0, c=0.0) -> np.ndarray:
    """a E + b Etilde + c X."""
    return a * triple.E + b * triple.Etilde + c * triple.X


def coefficient_z_defect(a, b, c) -> float:
    """4|a conj(c) - conj(b) c|^2 + (|a|^2 - |b|^2)^2, scaled by (|a|^2 + |b|^2 + 2|c|^2)^2.

    This is the denominator of K on a standard sl(2) divided by |E|^4 |A|^4/|E|^4,
    so it lies in [0, 1] and vanishes exactly on Z.
    """
    a, b, c = complex(a), complex(b), complex(c)
    raw = 4 * abs(a * c.conjugate() - b.conjugate() * c) ** 2 + (abs(a) ** 2 - abs(b) ** 2) ** 2
    size = (abs(a) ** 2 + abs(b) ** 2 + 2 * abs(c) ** 2) ** 2
    if size == 0.0:
        return 0.0
    return raw / size


@dataclass(frozen=True)
class Sl2Element:
    triple: StandardTriple
    a: complex
    b: complex
    c: complex

    @property
    def matrix(self) -> np.ndarray:
        return embed_element(self.triple, self.a, self.b, self.c)

    def in_z(self, tol: float = COEFF_Z_TOL) -> bool:
        return coefficient_z_defect(self.a, self.b, self.c) <= tol

    def is_nilpotent(self, tol: float = 1e-12) -> bool:
        """a E + b Etilde + c X is nilpotent iff c^2 + a b = 0."""
        scale = abs(self.a) ** 2 + abs(self.b) ** 2 + abs(self.c) ** 2
        return abs(self.c ** 2 + self.a * self.b) <= tol * max(scale, 1e-300)


def k_on_standard(a, b, c, pi, tol: float = COEFF_Z_TOL) -> Fraction:
    """Closed-form K of a E + b Etilde + c X: identically C_pi outside Z."""
    pi = as_partition(pi)
    if pi.is_trivial():
        raise PartitionError("the standard triple of (1, ..., 1) is zero")
    if coefficient_z_defect(a, b, c) <= tol:
        raise InZError(f"coefficients ({a}, {b}, {c}) give an element of Z")
    return c_constant(pi)
