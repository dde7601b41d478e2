"""Infimum of K on an adjoint orbit minus Z, by the seven-case taxonomy.

=====  ==============================================  ==================  ========
case   orbit                                           infimum             attained
=====  ==============================================  ==================  ========
1      diagonalizable, spectrum not uni-real           0                   yes
2      Lambda-form with all parts odd (two forms)      C_pi                yes
3      Lambda-form with all parts even                 C_pi                yes
4      Lambda-form with mixed parity, no dual          C_pi / 4            no
5      uni-real, no Lambda-form                        gap^2 / sum l^2     no
6      nilpotent of Jordan type pi                     C_pi                yes
7      neither diagonalizable nor nilpotent            0                   no
=====  ==============================================  ==================  ========
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import OrbitError, ScalarMatrixError
from .linalg import as_matrix, norm
from .partitions import (
    Partition,
    c_constant,
    is_even,
    match_lambda_forms,
    successor_pair_dual,
)
from .spectral import SpectralProfile, spectral_profile


class NilpotentInputError(OrbitError, ValueError):
    pass


class ClosedOrbitError(OrbitError, ValueError):
    """The orbit is closed and disjoint from Z, so no limit at Z exists."""


@dataclass(frozen=True)
class CriticalSet:
    """SU(n)-orbit of critical points: either the unitary orbit of a diagonal
    matrix (``partition is None``) or of j_pi(sl(2)) minus Z."""

    value: Fraction | float
    partition: Partition | None = None

    @property
    def description(self) -> str:
        if self.partition is None:
            return "SU(n)-orbit of the diagonal matrix of eigenvalues"
        return f"SU(n)-orbit of the standard sl(2) of type ({self.partition}) minus Z"

    def to_dict(self) -> dict:
        return {
            "value": _num(self.value),
            "value_exact": str(self.value) if isinstance(self.value, Fraction) else None,
            "partition": None if self.partition is None else list(self.partition.parts),
            "description": self.description,
        }


@dataclass(frozen=True)
class OrbitClassification:
    case_id: int
    infimum: Fraction | float
    achieved: bool
    minimizing_set: CriticalSet | None
    extra_critical: CriticalSet | None
    critical_sets: tuple[CriticalSet, ...]
    notes: str
    provenance: dict = field(default_factory=dict)
    profile: SpectralProfile | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.achieved and self.minimizing_set is None:
            raise ValueError("an attained infimum needs a minimizing set")
        if self.infimum < 0:
            raise ValueError("K is non-negative")

    def to_dict(self) -> dict:
        return {
            "case": self.case_id,
            "infimum": _num(self.infimum),
            "infimum_exact": str(self.infimum) if isinstance(self.infimum, Fraction) else None,
            "achieved": self.achieved,
            "minimizing_set": None if self.minimizing_set is None else self.minimizing_set.to_dict(),
            "extra_critical": None if self.extra_critical is None else self.extra_critical.to_dict(),
            "critical_sets": [c.to_dict() for c in self.critical_sets],
            "notes": self.notes,
            "provenance": self.provenance,
        }


def _num(x) -> float:
    return float(x)


def gap_ratio(real_values) -> float:
    """min_{l_i != l_j} (l_i - l_j)^2 / sum l_i^2 for a real tuple."""
    v = np.sort(np.asarray(real_values, dtype=float))
    scale = np.max(np.abs(v))
    gaps = np.diff(v)
    gaps = gaps[gaps > 1e-9 * scale]
    if gaps.size == 0:
        raise ScalarMatrixError("spectrum has a single distinct value")
    return float(np.min(gaps) ** 2 / np.sum(v ** 2))


def all_odd_dual(pi: Partition) -> Partition:
    """(2m+1, ...) -> (m+1, m, ...): the same Lambda-spectrum at double scale."""
    parts = []
    for k in pi.parts:
        m = (k - 1) // 2
        parts.extend(p for p in (m + 1, m) if p > 0)
    return Partition.canonical(parts)


def _nonscalar(a) -> np.ndarray:
    a = as_matrix(a, trace_free=True)
    if norm(a) == 0.0:
        raise ScalarMatrixError("the zero matrix (the only trace-free scalar) has no orbit outside Z")
    return a


def lambda_forms(profile: SpectralProfile):
    real = profile.realified()
    if real is None:
        return None
    return match_lambda_forms(real)


def classify_orbit(a, profile: SpectralProfile | None = None) -> OrbitClassification:
    a = _nonscalar(a)
    profile = profile or spectral_profile(a)

    if profile.nilpotent:
        pi = profile.jordan_type
        c = c_constant(pi)
        crit = CriticalSet(c, pi)
        return OrbitClassification(
            6, c, True, crit, None, (crit,),
            f"nilpotent of Jordan type ({pi}); minimum on the standard sl(2) of that type",
            {"infimum": f"C_pi for the Jordan type ({pi})"}, profile)

    if not profile.diagonalizable:
        return OrbitClassification(
            7, Fraction(0), False, None, None, (),
            "neither diagonalizable nor nilpotent; K tends to 0 along D + tN, t -> 0; no critical points",
            {"infimum": "limit of K(D + tN) as t -> 0 (semisimple part D, nilpotent part N)"},
            profile)

    if profile.uni_real_phase is None:
        crit = CriticalSet(Fraction(0))
        return OrbitClassification(
            1, Fraction(0), True, crit, None, (crit,),
            "diagonalizable, eigenvalues not uni-real; minimum 0 on normal matrices, no other critical points",
            {"infimum": "K = 0 on the unitary orbit of the diagonal form"}, profile)

    real = profile.realified()
    forms = match_lambda_forms(real)
    odd_forms = [(t, p) for t, p in forms if all(k % 2 == 1 for k in p.parts)]

    if not forms:
        g = gap_ratio(real)
        return OrbitClassification(
            5, g, False, None, None, (),
            "uni-real spectrum not of Lambda-form; infimum approached at Z, no critical points",
            {"infimum": "min gap^2 / sum of squares of the realified spectrum"}, profile)

    if odd_forms:
        pi = odd_forms[0][1]
        dual = next((p for _, p in forms if p != pi), None) or all_odd_dual(pi)
        return _case2(pi, dual, profile, guarded=len(forms) == 1)
    if len(forms) == 2:
        raise OrbitError(f"two Lambda-forms without an all-odd one: {forms}")

    (t, pi), = forms
    dual = successor_pair_dual(pi)
    if dual is not None and not is_even(pi):
        # a single mixed-parity form of successor-pair shape means the all-odd
        # form was missed by the peeling tolerance
        return _case2(dual, pi, profile, guarded=True)
    c = c_constant(pi)
    if is_even(pi):
        crit = CriticalSet(c, pi)
        return OrbitClassification(
            3, c, True, crit, None, (crit,),
            f"Lambda-form of the all-even partition ({pi}); minimum attained, no other critical points",
            {"infimum": f"C_pi for pi = ({pi})", "lambda_scale": t}, profile)
    crit = CriticalSet(c, pi)
    return OrbitClassification(
        4, c / 4, False, None, None, (crit,),
        f"Lambda-form of the mixed-parity partition ({pi}); infimum C_pi/4 approached at Z, "
        f"critical value C_pi on the standard sl(2) of that type",
        {"infimum": f"C_pi / 4 for pi = ({pi})", "critical_value": f"C_pi for pi = ({pi})",
         "lambda_scale": t}, profile)


def _case2(pi: Partition, dual: Partition, profile, guarded: bool) -> OrbitClassification:
    c = c_constant(pi)
    c_dual = c_constant(dual)
    main = CriticalSet(c, pi)
    extra = CriticalSet(c_dual, dual)
    note = (f"two Lambda-forms: ({pi}) with all parts odd and ({dual}) at twice the scale; "
            f"minimum C_pi attained, extra critical value {c_dual} = 4 C_pi")
    if guarded:
        note += "; second form reconstructed from the first"
    return OrbitClassification(
        2, c, True, main, extra, (main, extra), note,
        {"infimum": f"C_pi for pi = ({pi})", "extra_critical": f"C_pi' for pi' = ({dual})"},
        profile)


def z_liminf(a, profile: SpectralProfile | None = None) -> Fraction | float:
    """liminf of K along sequences of the orbit approaching Z."""
    a = _nonscalar(a)
    profile = profile or spectral_profile(a)
    if profile.nilpotent:
        raise NilpotentInputError("no limit-at-Z analysis for nilpotent orbits")
    if not profile.diagonalizable:
        return Fraction(0)
    if profile.uni_real_phase is None:
        raise ClosedOrbitError("diagonalizable with non-uni-real spectrum: the orbit misses Z")
    forms = lambda_forms(profile)
    if forms:
        _, pi = forms[0]
        c = c_constant(pi)
        return c if is_even(pi) else c / 4
    return gap_ratio(profile.realified())


def infinity_liminf(a, profile: SpectralProfile | None = None) -> Fraction:
    """liminf of K as ||B|| -> infinity in the orbit: C of the invariant-factor partition."""
    a = _nonscalar(a)
    profile = profile or spectral_profile(a)
    return c_constant(profile.invariant_partition)


def infimum_candidates(a, profile: SpectralProfile | None = None) -> dict:
    """Interior critical values, limit at Z and limit at infinity, where defined."""
    a = _nonscalar(a)
    profile = profile or spectral_profile(a)
    cls = classify_orbit(a, profile)
    out = {"critical": [c.value for c in cls.critical_sets],
           "z": None, "infinity": infinity_liminf(a, profile)}
    if not profile.nilpotent:
        try:
            out["z"] = z_liminf(a, profile)
        except ClosedOrbitError:
            pass
    return out
