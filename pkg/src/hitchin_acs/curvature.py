"""Curvature of left-invariant metrics and the nearly Kähler test.

For left-invariant fields all derivatives reduce to brackets, so the
Levi-Civita connection is a linear map ``X -> nabla_X`` given by the
Koszul formula

    2 g(nabla_X Y, Z) = g([X,Y],Z) - g([Y,Z],X) + g([Z,X],Y).

Conventions: ``R(X,Y) = [nabla_X, nabla_Y] - nabla_{[X,Y]}`` and
``Ric(Y,Z) = tr(X -> R(X,Y)Z)``; a bi-invariant metric then has
``Ric(X,X) = |ad_X|^2 / 4 >= 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from .acs import OrthogonalACS, hermitian_pair, _require_ao_minus
from .errors import NotAlternating, PoleAtHalf
from .exterior import DIM, from_skew_matrix, wedge
from .hitchin import alternation_defect, dual_three_form, three_form_tensor
from .liealg import LieAlgebraSpec, standard_su2_su2

__all__ = [
    "LeftInvariantMetric",
    "CurvatureReport",
    "NKFormFit",
    "connection_matrices",
    "levi_civita",
    "riemann_tensor",
    "riemann",
    "ricci_tensor",
    "ricci",
    "ricci_closed_form",
    "proper_frame",
    "eigenframe",
    "nk_tensor_defect",
    "nk_form_fit",
    "nk_defect",
]

_STANDARD = standard_su2_su2()


@dataclass(frozen=True, eq=False)
class LeftInvariantMetric:
    g: np.ndarray
    spec: LieAlgebraSpec = _STANDARD

    def __post_init__(self):
        g = np.array(self.g, dtype=float)
        if g.shape != (DIM, DIM):
            raise ValueError("metric must be 6x6")
        if not np.allclose(g, g.T, atol=1e-12):
            raise ValueError("metric is not symmetric")
        g = 0.5 * (g + g.T)
        if np.linalg.eigvalsh(g).min() <= 0:
            raise ValueError("metric is not positive definite")
        g.setflags(write=False)
        object.__setattr__(self, "g", g)

    def inner(self, X, Y) -> float:
        return float(np.asarray(X) @ self.g @ np.asarray(Y))

    def orthonormal_frame(self) -> np.ndarray:
        """Columns: the eigenvectors of ``g`` rescaled to unit g-length."""
        return self._frame

    @cached_property
    def _frame(self) -> np.ndarray:
        w, V = np.linalg.eigh(self.g)
        return V / np.sqrt(w)

    @cached_property
    def connection(self) -> np.ndarray:
        C, G = self.spec.structure_constants, self.g
        br = np.einsum("ijk,kl->ijl", C, G)  # g([e_i, e_j], e_l)
        b = 0.5 * (br - br.transpose(2, 0, 1) + br.transpose(1, 2, 0))
        Gamma = b @ np.linalg.inv(G)  # nabla_{e_i} e_j = Gamma[i, j, k] e_k
        return Gamma.transpose(0, 2, 1)


def _as_metric(g) -> LeftInvariantMetric:
    return g if isinstance(g, LeftInvariantMetric) else LeftInvariantMetric(g)


def connection_matrices(g) -> np.ndarray:
    """``N[i]`` is the matrix of ``nabla_{e_i}`` acting on vectors."""
    return _as_metric(g).connection


def levi_civita(g, X, Y) -> np.ndarray:
    """``nabla_X Y`` for left-invariant ``X``, ``Y``."""
    N = connection_matrices(g)
    return np.einsum("i,ikj,j->k", np.asarray(X, float), N, np.asarray(Y, float))


def riemann_tensor(g) -> np.ndarray:
    """``R[i, j]`` is the matrix of ``R(e_i, e_j)``."""
    g = _as_metric(g)
    N = g.connection
    C = g.spec.structure_constants
    NN = np.einsum("iab,jbc->ijac", N, N)
    return NN - NN.transpose(1, 0, 2, 3) - np.einsum("ijm,mab->ijab", C, N)


def riemann(g, X, Y, Z) -> np.ndarray:
    R = riemann_tensor(g)
    return np.einsum("i,j,ijab,b->a", np.asarray(X, float), np.asarray(Y, float), R, np.asarray(Z, float))


def ricci_tensor(g) -> np.ndarray:
    """``Ric[j, k] = Ric(e_j, e_k)`` in the frame of ``g``."""
    return np.einsum("ijik->jk", riemann_tensor(g))


@dataclass(frozen=True, eq=False)
class CurvatureReport:
    orthonormal_frame: np.ndarray
    ricci: np.ndarray
    scalar: float
    nk_defect: Optional[float] = None

    def to_json(self) -> dict:
        return {
            "frame": self.orthonormal_frame.T.tolist(),
            "ricci": self.ricci.tolist(),
            "scalar": self.scalar,
            "nk_defect": self.nk_defect,
        }

    @classmethod
    def from_json(cls, data: dict) -> "CurvatureReport":
        return cls(
            np.array(data["frame"], dtype=float).T,
            np.array(data["ricci"], dtype=float),
            float(data["scalar"]),
            data.get("nk_defect"),
        )


def ricci(g, frame=None, J=None) -> CurvatureReport:
    """Ricci tensor in a g-orthonormal frame (columns of ``frame``) and scalar curvature.

    Without ``frame`` the rescaled eigenvectors of ``g`` are used.  With
    ``J`` the nearly Kähler defect of ``(g, J)`` is filled in.
    """
    g = _as_metric(g)
    V = g.orthonormal_frame() if frame is None else np.asarray(frame, dtype=float)
    Ric = ricci_tensor(g)
    ric_v = V.T @ Ric @ V
    scalar = float(np.trace(np.linalg.solve(g.g, Ric)))
    defect = None if J is None else nk_defect(g, J)
    return CurvatureReport(V, ric_v, scalar, defect)


def ricci_closed_form(t: float, eps: float = 1e-12) -> tuple[np.ndarray, float]:
    """Ricci diagonal in the proper frame of ``g_I`` and the scalar curvature."""
    d = 4.0 * t * t - 1.0
    if abs(d) < eps:
        raise PoleAtHalf(f"4t^2 - 1 = {d:.3g}: the closed forms have a pole at t = 1/2")
    den = 2.0 * d * d
    r12 = -(8 * t**4 - 16 * t**3 - 10 * t**2 + 10 * t + 3) / den
    r3 = (4 * t**2 + 1) / den
    r45 = -(8 * t**4 - 16 * t**3 + 6 * t**2 - 2 * t - 1) / den
    r6 = (-3 + 16 * t**4 - 8 * t**2) / den
    s = -(8 * t**4 - 32 * t**3 - 2 * t**2 + 8 * t + 3) / (d * d)
    return np.array([r12, r12, r3, r45, r45, r6]), float(s)


def _reference_vectors(a: np.ndarray) -> list[np.ndarray]:
    """Unnormalised eigen-directions of ``g_I`` in the (u) frame, one per slot.

    Slots are ordered by eigenvalue label ``2t-1, 2t-1, 1, 2t+1, 2t+1, 4t^2-1``.
    """
    a1, a2, a3 = a
    r = a1**2 + a3**2
    w = np.array([-a3, a2, -a1])
    if r > 1e-14:
        p = np.array([-a1, 0.0, a3])
        q = np.array([a2 * a3, r, a1 * a2])
    else:
        p = np.array([1.0, 0.0, 0.0])
        q = np.array([0.0, 0.0, 1.0])
    if w @ w < 1e-14:
        # x = 0: the eigenvalue-1 and 4t^2-1 directions become e_2 + e_5, e_2 - e_5
        w = np.array([0.0, 1.0, 0.0])
    return [np.concatenate((v, sign * v)) for sign in (1.0, -1.0) for v in (p, q, w)]


def _labels(t: float) -> np.ndarray:
    return np.array([2 * t - 1, 2 * t - 1, 1.0, 2 * t + 1, 2 * t + 1, 4 * t * t - 1])


def proper_frame(I: OrthogonalACS, g=None, cluster_tol: float = 1e-7) -> np.ndarray:
    """g_I-orthonormal eigenframe ``(v1, ..., v6)`` as columns, in the (u) frame.

    Eigenvectors come from a numerical eigendecomposition of ``g_I``.
    Inside each eigenspace the basis is fixed by projecting the reference
    directions onto it, which removes the sign and rotation freedom of the
    double eigenvalues.
    """
    _require_ao_minus(I)
    G = hermitian_pair(I).gI if g is None else np.asarray(g, dtype=float)
    return eigenframe(G, I.a, I.t, cluster_tol)


def eigenframe(G, a, t: float, cluster_tol: float = 1e-7) -> np.ndarray:
    """``proper_frame`` from the block metric ``G`` and the parameters ``a``, ``t``."""
    G = np.asarray(G, dtype=float)
    w, V = np.linalg.eigh(G)
    labels = _labels(t)
    refs = _reference_vectors(np.asarray(a, dtype=float))
    frame = np.zeros((DIM, DIM))
    for slot in range(DIM):
        lam = labels[slot]
        space = V[:, np.abs(w - lam) < cluster_tol * max(1.0, abs(lam))]
        if space.shape[1] == 0:
            raise ValueError(f"no eigenvalue of g_I near {lam:.6g}")
        v = space @ (space.T @ refs[slot])
        for k in range(slot):
            v = v - (frame[:, k] @ G @ v) * frame[:, k]
        nrm = np.sqrt(v @ G @ v)
        if nrm < 1e-8:
            raise ValueError(f"reference direction for slot {slot + 1} misses its eigenspace")
        frame[:, slot] = v / nrm
    return frame


def nk_tensor_defect(g, J) -> float:
    """``max |(nabla_X J) X|_g`` over g-unit ``X``, bounded via polarisation.

    Returns the largest g-norm of ``((nabla_{v_i} J) v_j + (nabla_{v_j} J) v_i) / 2``
    over a g-orthonormal frame; zero exactly when ``(g, J)`` is nearly Kähler.
    """
    g = _as_metric(g)
    J = np.asarray(J, dtype=float)
    N = g.connection
    V = g.orthonormal_frame()
    DJ = N @ J - J @ N  # DJ[i] = nabla_{e_i} J
    DJv = np.einsum("ia,ibc,cj->ajb", V, DJ, V)  # (nabla_{v_a} J) v_j, components b
    S = 0.5 * (DJv + DJv.transpose(1, 0, 2))
    norms = np.sqrt(np.einsum("ajb,bc,ajc->aj", S, g.g, S))
    return float(norms.max())


@dataclass(frozen=True)
class NKFormFit:
    mu: float
    residual: float
    omega_psi: float


def nk_form_fit(g, J) -> NKFormFit:
    """Fit ``mu`` in ``d phi = -2 mu omega ^ omega`` with ``psi = 3 d omega``.

    ``omega(X, Y) = g(JX, Y)`` and ``phi`` is the dual of ``psi`` under
    ``J``.  ``residual`` is the least-squares norm of ``d phi + 2 mu omega^omega``;
    when ``phi`` fails to be alternating, the residual is its alternation
    defect and ``mu`` is NaN.
    """
    g = _as_metric(g)
    J = np.asarray(J, dtype=float)
    omega = from_skew_matrix(J.T @ g.g)
    psi = 3.0 * g.spec.d(omega)
    try:
        phi = dual_three_form(psi, J, tol=1e-8)
    except NotAlternating:
        T = -np.einsum("ai,ajk->ijk", J, three_form_tensor(psi))
        return NKFormFit(float("nan"), alternation_defect(T), wedge(omega, psi).norm())
    dphi = g.spec.d(phi).coeffs
    ww = wedge(omega, omega).coeffs
    mu = -float(dphi @ ww) / (2.0 * float(ww @ ww))
    residual = float(np.linalg.norm(dphi + 2.0 * mu * ww))
    return NKFormFit(mu, residual, wedge(omega, psi).norm())


def nk_defect(g, J) -> float:
    """Largest of the pointwise defect and the form-system residual."""
    return max(nk_tensor_defect(g, J), nk_form_fit(g, J).residual)
