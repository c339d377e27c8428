"""Hitchin's endomorphism K of a 3-form, the invariant tau and the induced J."""

from __future__ import annotations

import enum
from functools import lru_cache
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NonNegativeTau, NotAlternating
from .exterior import DIM, KForm, _interior_tensor, basis, dual_iso_A, interior, wedge

__all__ = [
    "Orbit",
    "HitchinStructure",
    "hitchin_K",
    "hitchin_K_columns",
    "tau",
    "classify_orbit",
    "hitchin_J",
    "dual_three_form",
    "alternation_defect",
    "three_form_tensor",
    "hitchin_structure",
]

DEFAULT_EPS = 1e-10
_FRAME = np.eye(DIM)


class Orbit(str, enum.Enum):
    O1 = "O1"
    O2 = "O2"
    DEGENERATE = "degenerate"


def hitchin_K_columns(psi: KForm) -> np.ndarray:
    """``K`` assembled column by column from interior and wedge products."""
    if psi.degree != 3:
        raise ValueError("hitchin_K expects a 3-form")
    return np.column_stack([dual_iso_A(wedge(interior(e, psi), psi)) for e in _FRAME])


@lru_cache(maxsize=None)
def _k_tensor() -> np.ndarray:
    # K is quadratic in psi: K = sum_ab psi_a psi_b T[a, b]
    n = len(basis(3))
    T = np.zeros((n, n, DIM, DIM))
    for a in range(n):
        for b in range(n):
            T[a, b] = hitchin_K_columns(KForm(3, np.eye(n)[a] + np.eye(n)[b]))
            T[a, b] -= hitchin_K_columns(KForm(3, np.eye(n)[a])) + hitchin_K_columns(KForm(3, np.eye(n)[b]))
    T = 0.5 * T.reshape(n * n, DIM * DIM)
    T.setflags(write=False)
    return T


def hitchin_K(psi: KForm) -> np.ndarray:
    """Matrix of ``K(X) = A(i_X psi ^ psi)``; column ``j`` is ``K(e_j)``.

    ``K`` is trivialised by ``Vol = e^{123456}``, so that ``K @ K`` equals
    ``tau(psi)`` times the identity.  The quadratic map is tabulated once
    from ``hitchin_K_columns`` on basis forms.
    """
    if psi.degree != 3:
        raise ValueError("hitchin_K expects a 3-form")
    return (np.outer(psi.coeffs, psi.coeffs).reshape(-1) @ _k_tensor()).reshape(DIM, DIM)


def tau(psi: KForm) -> float:
    """``tr(K^2) / 6``; quartic in ``psi``."""
    K = hitchin_K(psi)
    return float(np.trace(K @ K)) / 6.0


def classify_orbit(psi: KForm, eps: float = DEFAULT_EPS) -> Orbit:
    t = tau(psi)
    if t < -eps:
        return Orbit.O1
    if t > eps:
        return Orbit.O2
    return Orbit.DEGENERATE


def hitchin_J(psi: KForm, eps: float = DEFAULT_EPS) -> np.ndarray:
    """Almost complex structure ``K / sqrt(-tau)`` of a 3-form in O1."""
    K = hitchin_K(psi)
    t = float(np.trace(K @ K)) / 6.0
    if t >= -eps:
        raise NonNegativeTau(f"tau(psi) = {t:.6g} is not negative; psi is not in O1")
    return K / np.sqrt(-t)


@lru_cache(maxsize=None)
def _three_form_scatter() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    flat, src, sign = [], [], []
    for n, (i, j, k) in enumerate(basis(3)):
        for (a, b, c), sg in (
            ((i, j, k), 1), ((j, k, i), 1), ((k, i, j), 1),
            ((j, i, k), -1), ((i, k, j), -1), ((k, j, i), -1),
        ):
            flat.append((a * DIM + b) * DIM + c)
            src.append(n)
            sign.append(sg)
    return np.array(flat), np.array(src), np.array(sign, dtype=float)


def three_form_tensor(alpha: KForm) -> np.ndarray:
    """Fully antisymmetric ``6x6x6`` array ``alpha(e_i, e_j, e_k)``."""
    if alpha.degree != 3:
        raise ValueError("expected a 3-form")
    flat, src, sign = _three_form_scatter()
    T = np.zeros(DIM**3)
    T[flat] = alpha.coeffs[src] * sign
    return T.reshape(DIM, DIM, DIM)


def alternation_defect(T: np.ndarray) -> float:
    """Largest violation of antisymmetry of a trilinear array."""
    return float(max(
        np.abs(T + T.transpose(1, 0, 2)).max(),
        np.abs(T + T.transpose(0, 2, 1)).max(),
    ))


def dual_three_form(psi: KForm, J, tol: float = 1e-10) -> KForm:
    """The 3-form ``phi`` with ``i_X psi = i_{JX} phi``.

    ``phi(X, Y, Z) = -psi(JX, Y, Z)``.  Raises ``NotAlternating`` when this
    trilinear form is not alternating (``psi`` is not of type (3,0)+(0,3)
    for ``J``), and ``ValueError`` if the defining relation fails.
    """
    J = np.asarray(J, dtype=float)
    if psi.degree != 3:
        raise ValueError("dual_three_form expects a 3-form")
    if not np.allclose(J @ J, -np.eye(DIM), atol=tol):
        raise ValueError("J does not square to -1")
    T = -np.einsum("ai,ajk->ijk", J, three_form_tensor(psi))
    scale = max(1.0, float(np.abs(T).max()))
    defect = alternation_defect(T)
    if defect > tol * scale:
        raise NotAlternating(f"phi(X,Y,Z) = -psi(JX,Y,Z) is not alternating (defect {defect:.3g})")
    idx = np.array(basis(3)).T
    phi = KForm(3, T[idx[0], idx[1], idx[2]])
    # rows: i_{e_j} psi and i_{J e_j} phi for every basis vector e_j
    lhs = _interior_slices(psi)
    rhs = J.T @ _interior_slices(phi)
    if not np.allclose(lhs, rhs, rtol=0.0, atol=tol * scale):
        raise ValueError("relation i_X psi = i_{JX} phi failed")
    return phi


def _interior_slices(alpha: KForm) -> np.ndarray:
    # row m holds the coefficients of i_{e_m} alpha
    T = _interior_tensor(alpha.degree)
    return np.tensordot(T, alpha.coeffs, axes=([1], [0]))


@dataclass(frozen=True, eq=False)
class HitchinStructure:
    psi: KForm
    K: np.ndarray
    tau: float
    kappa: Optional[float] = None
    J: Optional[np.ndarray] = None
    phi: Optional[KForm] = None

    @property
    def orbit(self) -> Orbit:
        return classify_orbit(self.psi)

    def to_json(self) -> dict:
        out = {"psi": self.psi.to_json(), "K": self.K.tolist(), "tau": self.tau}
        if self.kappa is not None:
            out["kappa"] = self.kappa
            out["J"] = self.J.tolist()
        if self.phi is not None:
            out["phi"] = self.phi.to_json()
        return out

    @classmethod
    def from_json(cls, data: dict) -> "HitchinStructure":
        return cls(
            psi=KForm.from_json(data["psi"]),
            K=np.array(data["K"], dtype=float),
            tau=float(data["tau"]),
            kappa=data.get("kappa"),
            J=None if data.get("J") is None else np.array(data["J"], dtype=float),
            phi=None if data.get("phi") is None else KForm.from_json(data["phi"]),
        )


def hitchin_structure(psi: KForm, eps: float = DEFAULT_EPS) -> HitchinStructure:
    """Bundle ``K``, ``tau`` and, in O1, ``kappa``, ``J`` and ``phi``."""
    K = hitchin_K(psi)
    t = float(np.trace(K @ K)) / 6.0
    if t >= -eps:
        return HitchinStructure(psi, K, t)
    kappa = float(np.sqrt(-t))
    J = K / kappa
    try:
        phi = dual_three_form(psi, J, tol=1e-8)
    except NotAlternating:
        phi = None
    return HitchinStructure(psi, K, t, kappa, J, phi)
