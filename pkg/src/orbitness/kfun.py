"""The functionals K and K0, membership in Z and W, first-variation
residuals, the nilpotent rigidity test, the wedge defect and curvature.

    K(A)  = ||[A, A*]||^2 / (||A||^4 - |tr A^2|^2)
    K0(A) = ||[A, A*]||^2 / ||A||^4
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InZError, OrbitError
from .linalg import adjoint_star, commutator, norm

Z_TOL = 1e-10
W_TOL = 1e-10
NESS_TOL = 1e-9


def denominator(a: np.ndarray) -> float:
    """||A||^4 - |tr A^2|^2 computed as ||A||^2 * ||A* - proj_A(A*)||^2.

    The projected form avoids the cancellation of the naive difference near Z
    and is non-negative by construction.
    """
    a = np.asarray(a)
    n2 = float(np.vdot(a, a).real)
    if n2 == 0.0:
        return 0.0
    astar = adjoint_star(a)
    resid = astar - (np.vdot(a, astar) / n2) * a
    return n2 * float(np.vdot(resid, resid).real)


@dataclass(frozen=True)
class KReport:
    k_value: float | None
    numerator: float
    denominator: float
    norm4: float
    in_Z: bool
    in_W: bool

    @property
    def k0(self) -> float | None:
        """Ness' K0 = numerator / ||A||^4 (equals K on nilpotents)."""
        return self.numerator / self.norm4 if self.norm4 > 0 else None

    @property
    def denominator_ratio(self) -> float:
        return self.denominator / self.norm4 if self.norm4 > 0 else 0.0

    def to_dict(self) -> dict:
        return {
            "k_value": self.k_value,
            "k0": self.k0,
            "numerator": self.numerator,
            "denominator": self.denominator,
            "norm4": self.norm4,
            "in_Z": self.in_Z,
            "in_W": self.in_W,
        }


def k_functional(a, z_tol: float = Z_TOL, w_tol: float = W_TOL) -> KReport:
    """Evaluate K. In Z the report carries ``k_value=None`` instead of raising."""
    a = np.asarray(a, dtype=complex)
    c = commutator(a, adjoint_star(a))
    num = float(np.vdot(c, c).real)
    n2 = float(np.vdot(a, a).real)
    norm4 = n2 * n2
    den = denominator(a)
    in_z = den <= z_tol * norm4
    in_w = np.sqrt(num) <= w_tol * n2
    k = None if in_z else num / den
    return KReport(k, num, den, norm4, bool(in_z), bool(in_w))


def k_value(a, z_tol: float = Z_TOL) -> float:
    """K(A) as a float; raises :class:`InZError` in Z."""
    rep = k_functional(a, z_tol=z_tol)
    if rep.k_value is None:
        raise InZError("K is undefined on Z")
    return rep.k_value


def variation_matrix(a) -> np.ndarray:
    """G(A) = den * [A*, [A, [A*, A]]] - ||[A, A*]||^2 ||A||^2 [A*, A].

    For A_t = exp(-tM) A exp(tM), dK/dt at 0 equals 4 Re<M, G> / den^2.
    G is Hermitian.
    """
    a = np.asarray(a, dtype=complex)
    astar = adjoint_star(a)
    h = astar @ a - a @ astar  # [A*, A]
    num = float(np.vdot(h, h).real)
    n2 = float(np.vdot(a, a).real)
    den = denominator(a)
    inner_term = commutator(astar, commutator(a, h))
    return den * inner_term - num * n2 * h


def _require_outside_z(a, z_tol):
    n2 = norm(a) ** 2
    if denominator(a) <= z_tol * n2 * n2:
        raise InZError("matrix lies in Z")


def critical_residual(a, z_tol: float = Z_TOL) -> float:
    """||G(A)|| / ||A||^8; invariant under A -> cA since G has degree 8."""
    a = np.asarray(a, dtype=complex)
    _require_outside_z(a, z_tol)
    return norm(variation_matrix(a)) / norm(a) ** 8


def k_gradient(a, z_tol: float = Z_TOL) -> np.ndarray:
    """Gradient of M -> K(exp(-M) A exp(M)) at M = 0 for the real inner
    product Re<.,.>, i.e. 4 G(A) / den^2."""
    a = np.asarray(a, dtype=complex)
    _require_outside_z(a, z_tol)
    return 4.0 * variation_matrix(a) / denominator(a) ** 2


def k_gradient_direction(a, z_tol: float = Z_TOL) -> np.ndarray:
    """Steepest-descent direction M = -G(A) for A_t = exp(-tM) A exp(tM)."""
    a = np.asarray(a, dtype=complex)
    _require_outside_z(a, z_tol)
    return -variation_matrix(a)


def descent_slope(a) -> float:
    """Closed-form dK/dt along M = -G(A): -4 ||G||^2 / den^2."""
    g = variation_matrix(a)
    return -4.0 * norm(g) ** 2 / denominator(a) ** 2


@dataclass(frozen=True)
class NessReport:
    a: float
    imag_part: float
    residual: float
    satisfied: bool

    def to_dict(self) -> dict:
        return {"a": self.a, "imag_part": self.imag_part,
                "residual": self.residual, "satisfied": self.satisfied}


def ness_residual(a, tol: float = NESS_TOL) -> NessReport:
    """Test [[A*, A], A] = a A with real a < 0.

    The bracket is taken as [A*, A] so that critical nilpotents have a < 0
    (for e_2, [[A*, A], A] = -2 A). The companion equation for A* follows by
    taking adjoints when a is real. ``a`` is the real part of the
    least-squares coefficient; the imaginary part is kept in the residual.
    ``satisfied`` compares the residual with ``tol * ||A||^3``, the degree of
    the left-hand side.
    """
    a_mat = np.asarray(a, dtype=complex)
    n2 = norm(a_mat) ** 2
    if n2 == 0.0:
        raise OrbitError("ness_residual is undefined at 0")
    lhs = commutator(commutator(adjoint_star(a_mat), a_mat), a_mat)
    coeff = np.vdot(a_mat, lhs) / n2
    a_real = float(coeff.real)
    resid = norm(lhs - a_real * a_mat)
    ok = resid <= tol * n2 ** 1.5 and a_real < 0
    return NessReport(a_real, float(coeff.imag), float(resid), bool(ok))


def wedge_defect(x1, x2, x3) -> np.ndarray | float:
    """|X1|^2|X2|^2|X3|^2 + 2 Re(<X1,X2><X2,X3><X3,X1>) - sum_cyc |Xi|^2 |<Xj,Xk>|^2.

    Equals |X1 ^ X2 ^ X3|^2 / 6 >= 0, zero iff the vectors are dependent.
    Works on the last axis, so stacked triples are evaluated in one call.
    """
    x1, x2, x3 = (np.asarray(x, dtype=complex) for x in (x1, x2, x3))
    if not (x1.shape == x2.shape == x3.shape):
        raise ValueError(f"length mismatch: {x1.shape}, {x2.shape}, {x3.shape}")

    def ip(u, v):
        return np.sum(u * np.conj(v), axis=-1)

    n1, n2_, n3 = (ip(x, x).real for x in (x1, x2, x3))
    p12, p23, p31 = ip(x1, x2), ip(x2, x3), ip(x3, x1)
    out = (n1 * n2_ * n3 + 2 * np.real(p12 * p23 * p31)
           - n1 * np.abs(p23) ** 2 - n2_ * np.abs(p31) ** 2 - n3 * np.abs(p12) ** 2)
    return float(out) if np.ndim(out) == 0 else out


def wedge_norm_sq(x1, x2, x3) -> float:
    """|X1 ^ X2 ^ X3|^2 with the unnormalized antisymmetrizer (sum over S_3)."""
    x1, x2, x3 = (np.asarray(x, dtype=complex) for x in (x1, x2, x3))
    t = np.einsum("i,j,k->ijk", x1, x2, x3)
    w = (t - t.transpose(0, 2, 1) + t.transpose(1, 2, 0)
         - t.transpose(1, 0, 2) + t.transpose(2, 0, 1) - t.transpose(2, 1, 0))
    return float(np.vdot(w, w).real)


CURVATURE_CONVENTIONS = ("higgs", "sectional")


def curvature(a, convention: str = "higgs") -> float:
    """Curvature associated with K: -K/(2n) (Higgs-field normalization) or
    -K/2 (sectional curvature for the metric 2 tr(AB))."""
    a = np.asarray(a, dtype=complex)
    k = k_value(a)
    if convention == "higgs":
        return -k / (2 * a.shape[0])
    if convention == "sectional":
        return -k / 2.0
    raise ValueError(f"unknown convention {convention!r}; use one of {CURVATURE_CONVENTIONS}")
