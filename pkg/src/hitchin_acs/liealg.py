"""Six-dimensional real Lie algebras given by structure constants.

Only su(2) + su(2) in its standard frame is shipped.  ``C[i, j, k]`` holds
``C^k_ij`` so that ``[e_i, e_j] = sum_k C[i, j, k] e_k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import comb

import numpy as np

from .exterior import DIM, KForm, basis, basis_form, wedge

__all__ = [
    "LieAlgebraSpec",
    "FrameChange",
    "standard_su2_su2",
    "bracket",
    "mc_differential",
    "change_frame",
    "block_frame",
]


@dataclass(frozen=True, eq=False)
class LieAlgebraSpec:
    structure_constants: np.ndarray

    def __post_init__(self):
        C = np.array(self.structure_constants, dtype=float)
        if C.shape != (DIM, DIM, DIM):
            raise ValueError(f"structure constants must be {DIM}x{DIM}x{DIM}")
        if not np.allclose(C, -C.transpose(1, 0, 2), atol=1e-12):
            raise ValueError("structure constants must be antisymmetric in (i, j)")
        C.setflags(write=False)
        object.__setattr__(self, "structure_constants", C)

    def bracket(self, X, Y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", np.asarray(X, float), np.asarray(Y, float), self.structure_constants)

    def ad(self, X) -> np.ndarray:
        """Matrix of ``ad_X``."""
        return np.einsum("i,ijk->kj", np.asarray(X, float), self.structure_constants)

    def jacobi_residual(self) -> float:
        C = self.structure_constants
        # sum_m C^m_ij C^l_mk + cyclic(i, j, k)
        t = np.einsum("ijm,mkl->ijkl", C, C)
        r = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
        return float(np.abs(r).max())

    @cached_property
    def _d_matrices(self) -> dict[int, np.ndarray]:
        C = self.structure_constants
        d1 = [KForm(2, [-C[i, j, k] for i, j in basis(2)]) for k in range(DIM)]
        mats = {}
        for deg in range(DIM):
            M = np.zeros((comb(DIM, deg + 1), comb(DIM, deg)))
            for col, idx in enumerate(basis(deg)):
                acc = KForm.zero(deg + 1)
                for pos, m in enumerate(idx):
                    left = basis_form(*(i + 1 for i in idx[:pos]))
                    right = basis_form(*(i + 1 for i in idx[pos + 1:]))
                    acc = acc + (-1) ** pos * wedge(wedge(left, d1[m]), right)
                M[:, col] = acc.coeffs
            mats[deg] = M
        return mats

    def d(self, alpha: KForm) -> KForm:
        """Exterior derivative of a left-invariant form."""
        if alpha.degree >= DIM:
            return KForm.zero(DIM) if alpha.degree == DIM else alpha
        return KForm(alpha.degree + 1, self._d_matrices[alpha.degree] @ alpha.coeffs)

    def to_json(self) -> list[dict]:
        C = self.structure_constants
        return [
            {"i": int(i), "j": int(j), "k": int(k), "value": float(C[i, j, k])}
            for i, j, k in zip(*np.nonzero(C))
        ]

    @classmethod
    def from_json(cls, entries: list[dict]) -> "LieAlgebraSpec":
        C = np.zeros((DIM, DIM, DIM))
        for e in entries:
            C[e["i"], e["j"], e["k"]] = e["value"]
        return cls(C)


def standard_su2_su2() -> LieAlgebraSpec:
    """su(2) + su(2) with ``[e1, e2] = e3, [e2, e3] = e1, [e3, e1] = e2`` on each factor."""
    C = np.zeros((DIM, DIM, DIM))
    for off in (0, 3):
        for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            C[off + i, off + j, off + k] = 1.0
            C[off + j, off + i, off + k] = -1.0
    return LieAlgebraSpec(C)


_STANDARD = standard_su2_su2()


def bracket(X, Y, spec: LieAlgebraSpec = _STANDARD) -> np.ndarray:
    return spec.bracket(X, Y)


def mc_differential(alpha: KForm, spec: LieAlgebraSpec = _STANDARD) -> KForm:
    """Maurer-Cartan differential, ``d theta^k = -sum_{i<j} C^k_ij theta^i ^ theta^j``."""
    return spec.d(alpha)


@dataclass(frozen=True, eq=False)
class FrameChange:
    """New frame ``u_j = sum_i matrix[i, j] e_i`` (columns are the new vectors)."""

    matrix: np.ndarray

    def __post_init__(self):
        F = np.array(self.matrix, dtype=float)
        if F.shape != (DIM, DIM):
            raise ValueError("frame change must be 6x6")
        if abs(np.linalg.det(F)) < 1e-12:
            raise ValueError("frame change matrix is singular")
        F.setflags(write=False)
        object.__setattr__(self, "matrix", F)

    @cached_property
    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.matrix)

    def is_orientation_preserving_isometry(self, atol: float = 1e-10) -> bool:
        F = self.matrix
        return bool(np.allclose(F.T @ F, np.eye(DIM), atol=atol) and np.linalg.det(F) > 0)


def block_frame(X) -> FrameChange:
    """``diag(E, X)``: keeps ``e1, e2, e3`` and rotates the second factor by ``X``."""
    F = np.eye(DIM)
    F[3:, 3:] = np.asarray(X, dtype=float)
    return FrameChange(F)


def change_frame(obj, F: FrameChange, kind: str | None = None):
    """Express ``obj`` in the frame given by ``F``.

    ``kind`` selects the transformation law for arrays: ``"vector"``
    (components), ``"operator"`` (endomorphism), ``"bilinear"`` (metric or
    2-form matrix) or ``"structure"`` (structure constants).  A ``KForm`` or
    ``LieAlgebraSpec`` is recognised without ``kind``.
    """
    P, Pinv = F.matrix, F.inverse
    if isinstance(obj, KForm):
        return _pullback_form(obj, P)
    if isinstance(obj, LieAlgebraSpec):
        return LieAlgebraSpec(change_frame(obj.structure_constants, F, "structure"))
    a = np.asarray(obj, dtype=float)
    if kind is None:
        kind = "vector" if a.shape == (DIM,) else "operator"
    if kind == "vector":
        return Pinv @ a
    if kind == "operator":
        return Pinv @ a @ P
    if kind == "bilinear":
        return P.T @ a @ P
    if kind == "structure":
        return np.einsum("ia,jb,ijk,ck->abc", P, P, a, Pinv)
    raise ValueError(f"unknown kind {kind!r}")


def _pullback_form(alpha: KForm, P: np.ndarray) -> KForm:
    # coefficient on u^{I} is alpha(u_{i1}, ..., u_{ik}) = det-minors of P
    k = alpha.degree
    if k == 0:
        return alpha
    idx = basis(k)
    T = np.array([[np.linalg.det(P[np.ix_(rows, cols)]) for cols in idx] for rows in idx])
    return KForm(k, alpha.coeffs @ T)
