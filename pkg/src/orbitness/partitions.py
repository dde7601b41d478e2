"""Partitions of n: dominance order, the constants C_pi, parity classes,
Lambda-sequences and the decomposition of real spectra into Lambda-forms.

Parity follows the convention used throughout this package: a partition is
*even* when all of its parts share the same parity (all odd or all even),
and *odd* otherwise. This is not the usual "all parts even".
"""
from __future__ import annotations

import enum
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import PartitionError

#: |value/t - round(value/t)| allowed when peeling Lambda-chains.
MATCH_TOL = 1e-6
MAX_ENUM_N = 16


@dataclass(frozen=True, order=True)
class Partition:
    """Non-increasing tuple of positive integers."""

    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise PartitionError("a partition needs at least one part")
        if any(not isinstance(p, (int, np.integer)) or p < 1 for p in parts):
            raise PartitionError(f"parts must be positive integers: {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise PartitionError(f"parts must be non-increasing: {parts}")
        object.__setattr__(self, "parts", tuple(int(p) for p in parts))

    @classmethod
    def canonical(cls, parts: Sequence[int]) -> "Partition":
        """Build from parts in any order (zeros dropped)."""
        return cls(tuple(sorted((int(p) for p in parts if p != 0), reverse=True)))

    @classmethod
    def parse(cls, text: str) -> "Partition":
        """Parse ``"3,1^2"`` style text; parentheses and spaces are ignored."""
        body = text.strip().strip("()").replace(" ", "")
        if not body:
            raise PartitionError("empty partition text")
        parts: list[int] = []
        for token in body.split(","):
            m = re.fullmatch(r"(\d+)(?:\^(\d+))?", token)
            if m is None:
                raise PartitionError(f"cannot parse partition token {token!r}")
            parts.extend([int(m.group(1))] * int(m.group(2) or 1))
        return cls(tuple(parts))

    @property
    def n(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def is_trivial(self) -> bool:
        """True for (1, ..., 1), whose standard triple is zero."""
        return self.parts[0] == 1

    def prefix_sums(self, length: int | None = None) -> list[int]:
        length = length or self.n
        out, acc = [], 0
        for i in range(length):
            acc += self.parts[i] if i < len(self.parts) else 0
            out.append(acc)
        return out

    def __str__(self) -> str:
        chunks = []
        for value, count in _runs(self.parts):
            chunks.append(f"{value}^{count}" if count > 1 else str(value))
        return ",".join(chunks)


def _runs(parts):
    i = 0
    while i < len(parts):
        j = i
        while j < len(parts) and parts[j] == parts[i]:
            j += 1
        yield parts[i], j - i
        i = j


def as_partition(p) -> Partition:
    if isinstance(p, Partition):
        return p
    if isinstance(p, str):
        return Partition.parse(p)
    return Partition(tuple(p))


@lru_cache(maxsize=None)
def _partitions_tuple(n: int, largest: int) -> tuple[tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions_tuple(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def partitions(n: int) -> Iterator[Partition]:
    """All partitions of n in reverse lexicographic order, (n) first."""
    if n < 1 or n > MAX_ENUM_N:
        raise PartitionError(f"enumeration supported for 1 <= n <= {MAX_ENUM_N}")
    for parts in _partitions_tuple(n, n):
        yield Partition(parts)


class Dominance(str, enum.Enum):
    GREATER = "greater"
    LESS = "less"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


def dominance_compare(p1, p2) -> Dominance:
    """Compare prefix sums; the order is partial."""
    p1, p2 = as_partition(p1), as_partition(p2)
    if p1.n != p2.n:
        raise PartitionError(f"cannot compare partitions of {p1.n} and {p2.n}")
    ge = le = True
    for a, b in zip(p1.prefix_sums(), p2.prefix_sums()):
        ge &= a >= b
        le &= a <= b
    if ge and le:
        return Dominance.EQUAL
    if ge:
        return Dominance.GREATER
    if le:
        return Dominance.LESS
    return Dominance.INCOMPARABLE


def dominates(p1, p2) -> bool:
    """p1 >= p2 in dominance order."""
    return dominance_compare(p1, p2) in (Dominance.GREATER, Dominance.EQUAL)


def c_constant(p) -> Fraction:
    """C_pi = 12 / sum(n_p (n_p^2 - 1)), the value of K on the standard sl(2) of type pi."""
    p = as_partition(p)
    denom = sum(k * (k * k - 1) for k in p.parts)
    if denom == 0:
        raise PartitionError("C_pi is undefined for the partition (1, ..., 1)")
    return Fraction(12, denom)


def parity_class(p) -> str:
    """'even' iff all parts share one parity."""
    p = as_partition(p)
    return "even" if len({k % 2 for k in p.parts}) == 1 else "odd"


def is_even(p) -> bool:
    return parity_class(p) == "even"


@dataclass(frozen=True)
class LambdaSequence:
    """Concatenation of the chains (k-1, k-3, ..., 1-k) over the parts k of ``source``."""

    values: tuple[int, ...]
    source: Partition

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def multiset(self) -> Counter:
        return Counter(self.values)


def lambda_chain(k: int) -> tuple[int, ...]:
    return tuple(range(k - 1, -k, -2))


def lambda_sequence(p) -> LambdaSequence:
    p = as_partition(p)
    vals: list[int] = []
    for k in p.parts:
        vals.extend(lambda_chain(k))
    return LambdaSequence(tuple(vals), p)


def _peel(counts: Counter) -> Partition | None:
    """Greedy chain peeling of an integer multiset; None if impossible.

    The current maximum m must head the chain m, m-2, ..., -m, because
    every Lambda-block containing m has top value at least m and m is maximal.
    """
    counts = Counter({k: v for k, v in counts.items() if v > 0})
    blocks: list[int] = []
    while counts:
        top = max(counts)
        if top < 0:
            return None
        for v in range(top, -top - 1, -2):
            if counts.get(v, 0) == 0:
                return None
            counts[v] -= 1
            if counts[v] == 0:
                del counts[v]
        blocks.append(top + 1)
    return Partition.canonical(blocks)


def match_lambda_forms(values, tol: float = MATCH_TOL) -> list[tuple[float, Partition]]:
    """All (t, pi) with ``values == t * lambda_sequence(pi)`` as multisets.

    Candidate scales are d and d/2 where d is the smallest gap between
    distinct values. Returns at most two matches, sorted by t.
    """
    vals = np.sort(np.asarray(values, dtype=float).ravel())
    if vals.size == 0:
        raise PartitionError("empty spectrum")
    spread = vals[-1] - vals[0]
    scale = max(np.max(np.abs(vals)), np.finfo(float).tiny)
    if spread <= tol * scale:
        raise PartitionError("spectrum must contain at least two distinct values")
    # symmetry about 0 is necessary for any Lambda-form
    if np.max(np.abs(vals + vals[::-1])) > 2 * tol * scale:
        return []
    gaps = np.diff(vals)
    gaps = gaps[gaps > tol * scale]
    d = float(np.min(gaps))
    found: list[tuple[float, Partition]] = []
    for t0 in (d / 2.0, d):
        ints = np.rint(vals / t0)
        if not np.any(ints):
            continue
        t = float(np.dot(vals, ints) / np.dot(ints, ints))
        if np.max(np.abs(vals / t - ints)) > tol:
            continue
        p = _peel(Counter(int(k) for k in ints))
        if p is not None and all(p != q for _, q in found):
            found.append((t, p))
    return found


def successor_pair_dual(p) -> Partition | None:
    """If ``p`` splits into pairs (m, m+1) (m = 0 allowed, i.e. lone 1s), return
    the all-odd partition (2m+1, ...) with the same Lambda-spectrum at half scale."""
    p = as_partition(p)
    counts = Counter(p.parts)
    dual: list[int] = []
    while counts:
        top = max(counts)
        counts[top] -= 1
        if counts[top] == 0:
            del counts[top]
        if top == 1:
            dual.append(1)
            continue
        if counts.get(top - 1, 0) == 0:
            return None
        counts[top - 1] -= 1
        if counts[top - 1] == 0:
            del counts[top - 1]
        dual.append(2 * (top - 1) + 1)
    return Partition.canonical(dual)
