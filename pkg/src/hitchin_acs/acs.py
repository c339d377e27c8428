"""Left-invariant almost complex structures on su(2) + su(2).

An orthogonal structure (for the Killing-Cartan metric, the identity in
the standard frame) is a skew matrix

    I = [[A, B], [-B^T, C]]

with ``A = [[0, a1, a2], [-a1, 0, a3], [-a2, -a3, 0]]`` and ``C`` alike.
``x = a1^2 + a2^2 + a3^2`` decides whether the Hitchin structure of
``d omega_I`` exists (``x < 3/4``) and ``t = sqrt(1 - x)`` parametrises the
metric ``g_I``.

Throughout, ``M*`` is the matrix of cofactors of a 3x3 matrix ``M``
(``M* = det(M) M^{-T}`` when invertible), and a 2-form is stored through
its matrix ``omega[i, j] = omega(e_i, e_j)``, so ``omega_I = I^T``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    NotComplexStructure,
    NotInAOMinus,
    NotSkew,
    SamplingExhausted,
    SingularSkewPart,
    WrongOrientation,
)
from .exterior import DIM, KForm, from_skew_matrix, to_skew_matrix, wedge
from .hitchin import hitchin_K
from .liealg import FrameChange, block_frame, change_frame, mc_differential

__all__ = [
    "E3",
    "I0",
    "INTEGRABLE_J",
    "cofactor",
    "OrthogonalACS",
    "GeneralACS",
    "HermitianPair",
    "SU3Report",
    "orientation_sign",
    "validate",
    "conjugate_standard",
    "random_rotation",
    "sample",
    "omega_of",
    "alpha_map",
    "project_polar",
    "y_of_x",
    "projection_closed_form",
    "rotation_block",
    "u_frame",
    "block_metric",
    "hermitian_pair",
    "su3_compatibility",
    "G_NK",
    "J_I0",
]

E3 = np.eye(3)
_Z3 = np.zeros((3, 3))
I0 = np.block([[_Z3, -E3], [E3, _Z3]])
J_I0 = np.block([[E3, -2 * E3], [2 * E3, -E3]]) / np.sqrt(3.0)
G_NK = np.block([[2 * E3, -E3], [-E3, 2 * E3]]) / np.sqrt(3.0)

_A3 = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])
_B3 = np.array([[-1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
INTEGRABLE_J = np.block([[_A3, _B3], [-_B3, _A3]])

AO_MINUS_BOUND = 0.75
Y_SERIES_THRESHOLD = 1e-4


def cofactor(M) -> np.ndarray:
    """Matrix of cofactors of a 3x3 matrix (no transpose)."""
    (a, b, c), (d, e, f), (g, h, i) = np.asarray(M, dtype=float)
    return np.array([
        [e * i - f * h, f * g - d * i, d * h - e * g],
        [c * h - b * i, a * i - c * g, b * g - a * h],
        [b * f - c * e, c * d - a * f, a * e - b * d],
    ])


def _skew_params(S: np.ndarray) -> np.ndarray:
    return np.array([S[0, 1], S[0, 2], S[1, 2]])


def _skew_from_params(p) -> np.ndarray:
    p1, p2, p3 = p
    return np.array([[0.0, p1, p2], [-p1, 0.0, p3], [-p2, -p3, 0.0]])


_TRIPLES = np.array(list(itertools.combinations(range(DIM), 3)))
_TRIPLE_FRAMES = np.eye(DIM)[:, _TRIPLES].transpose(1, 0, 2)


def orientation_sign(J) -> float:
    """Sign of ``det(v1, v2, v3, Jv1, Jv2, Jv3)`` for a complex basis.

    The sign does not depend on the choice of ``v``; the best-conditioned
    triple of standard basis vectors is used.
    """
    J = np.asarray(J, dtype=float)
    frames = np.concatenate([_TRIPLE_FRAMES, J[:, _TRIPLES].transpose(1, 0, 2)], axis=2)
    dets = np.linalg.det(frames)
    return float(np.sign(dets[np.argmax(np.abs(dets))]))


@dataclass(frozen=True, eq=False)
class OrthogonalACS:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return np.block([[self.A, self.B], [-self.B.T, self.C]])

    @property
    def a(self) -> np.ndarray:
        return _skew_params(self.A)

    @property
    def c(self) -> np.ndarray:
        return _skew_params(self.C)

    @property
    def x(self) -> float:
        return float(self.a @ self.a)

    @property
    def t(self) -> float:
        return float(np.sqrt(max(0.0, 1.0 - self.x)))

    @property
    def tau_predicted(self) -> float:
        return 4.0 * self.x - 3.0

    @property
    def in_ao_minus(self) -> bool:
        return self.x < AO_MINUS_BOUND

    def relations(self) -> np.ndarray:
        """Residuals of the nine scalar relations coming from ``I^2 = -1``."""
        a1, a2, a3 = self.a
        c1, c2, c3 = self.c
        b = self.B
        return np.array([
            b[0] @ b[0] + a1**2 + a2**2 - 1,
            b[1] @ b[1] + a1**2 + a3**2 - 1,
            b[2] @ b[2] + a2**2 + a3**2 - 1,
            a2 * a3 + b[0] @ b[1],
            -a1 * a3 + b[0] @ b[2],
            a1 * a2 + b[1] @ b[2],
            b[:, 0] @ b[:, 0] + c1**2 + c2**2 - 1,
            b[:, 1] @ b[:, 1] + c1**2 + c3**2 - 1,
            b[:, 2] @ b[:, 2] + c2**2 + c3**2 - 1,
        ])

    def to_json(self) -> dict:
        return {"A": self.a.tolist(), "B": self.B.tolist(), "C": self.c.tolist()}

    @classmethod
    def from_json(cls, data: dict, **kwargs) -> "OrthogonalACS":
        A = _skew_from_params(data["A"])
        C = _skew_from_params(data["C"])
        B = np.array(data["B"], dtype=float).reshape(3, 3)
        return validate(np.block([[A, B], [-B.T, C]]), **kwargs)


@dataclass(frozen=True, eq=False)
class GeneralACS:
    J: np.ndarray

    def amplification_det(self) -> float:
        """``det`` of the change from ``(e1, e2, e3, Je1, Je2, Je3)`` to the standard frame."""
        return float(np.linalg.det(np.block([[E3, self.J[:3, :3]], [_Z3, self.J[3:, :3]]])))

    def is_positive(self) -> bool:
        return orientation_sign(self.J) > 0

    def to_json(self) -> list:
        return self.J.tolist()

    @classmethod
    def from_json(cls, data) -> "GeneralACS":
        J = np.array(data, dtype=float).reshape(DIM, DIM)
        if not np.allclose(J @ J, -np.eye(DIM), atol=1e-10):
            raise NotComplexStructure("J^2 != -1")
        return cls(J)


def validate(I, tol: float = 1e-10, require_positive: bool = True) -> OrthogonalACS:
    """Check that ``I`` is a g-orthogonal, positively oriented ACS and split it."""
    I = np.asarray(I, dtype=float)
    if I.shape != (DIM, DIM):
        raise ValueError("expected a 6x6 matrix")
    if not np.allclose(I.T, -I, atol=tol):
        raise NotSkew("I is not skew-symmetric, so not g-orthogonal")
    I = 0.5 * (I - I.T)
    if not np.allclose(I @ I, -np.eye(DIM), atol=tol):
        raise NotComplexStructure("I^2 != -1")
    if require_positive and orientation_sign(I) <= 0:
        raise WrongOrientation("I induces the opposite orientation")
    return OrthogonalACS(I[:3, :3].copy(), I[:3, 3:].copy(), I[3:, 3:].copy())


def random_rotation(rng: np.random.Generator, n: int = DIM) -> np.ndarray:
    """Haar-distributed element of SO(n) from the QR factorisation of a Gaussian matrix."""
    Z = rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def conjugate_standard(Q) -> OrthogonalACS:
    Q = np.asarray(Q, dtype=float)
    return validate(Q @ I0 @ Q.T)


def sample(
    rng_seed,
    require_AO_minus: bool = False,
    x_range: Optional[tuple[float, float]] = None,
    max_tries: int = 100_000,
) -> OrthogonalACS:
    """Random orthogonal ACS ``Q I0 Q^T`` with ``Q`` Haar on SO(6).

    ``rng_seed`` is anything accepted by ``numpy.random.default_rng``.
    ``require_AO_minus`` and ``x_range`` reject until ``x < 3/4`` and
    ``lo < x < hi`` respectively.
    """
    rng = np.random.default_rng(rng_seed)
    lo, hi = x_range if x_range is not None else (-np.inf, np.inf)
    for _ in range(max_tries):
        Q = random_rotation(rng)
        I = Q @ I0 @ Q.T
        I = 0.5 * (I - I.T)
        a = _skew_params(I[:3, :3])
        x = float(a @ a)
        if require_AO_minus and x >= AO_MINUS_BOUND:
            continue
        if not lo < x < hi:
            continue
        return OrthogonalACS(I[:3, :3].copy(), I[:3, 3:].copy(), I[3:, 3:].copy())
    raise SamplingExhausted(f"no acceptable sample in {max_tries} draws")


def omega_of(I) -> KForm:
    """The 2-form ``omega_I(X, Y) = g(IX, Y)``."""
    M = I.matrix if isinstance(I, OrthogonalACS) else np.asarray(I, dtype=float)
    return from_skew_matrix(M.T)


def _require_ao_minus(I: OrthogonalACS, eps: float = 1e-12) -> None:
    if I.x >= AO_MINUS_BOUND - eps:
        raise NotInAOMinus(
            f"a1^2 + a2^2 + a3^2 = {I.x:.6g} is not below 3/4, so tau(d omega_I) >= 0"
        )


def alpha_map(I: OrthogonalACS, eps: float = 1e-12) -> GeneralACS:
    """``J_I = K / sqrt(-tau)`` for the 3-form ``d omega_I``."""
    _require_ao_minus(I, eps)
    K = hitchin_K(mc_differential(omega_of(I)))
    tau = float(np.trace(K @ K)) / 6.0
    if tau >= 0:
        raise NotInAOMinus(f"tau(d omega_I) = {tau:.6g} is not negative")
    return GeneralACS(K / np.sqrt(-tau))


def project_polar(J, tol: float = 1e-12) -> OrthogonalACS:
    """Polar retraction ``(-D^2)^{-1/2} D`` of an ACS onto the orthogonal ones.

    ``D`` is the skew part of ``J``; the inverse square root of the
    symmetric positive matrix ``-D^2`` comes from its eigendecomposition.
    """
    J = J.J if isinstance(J, GeneralACS) else np.asarray(J, dtype=float)
    D = 0.5 * (J - J.T)
    w, V = np.linalg.eigh(-D @ D)
    if w.min() <= tol * max(1.0, w.max()):
        raise SingularSkewPart(f"skew part of J is singular (min eigenvalue of -D^2 = {w.min():.3g})")
    P = (V / np.sqrt(w)) @ V.T @ D
    return validate(0.5 * (P - P.T), tol=1e-9)


def y_of_x(x: float) -> float:
    """``(1 - sqrt(1-x)) / (x sqrt(1-x))``, continuous at ``x = 0`` with value 1/2."""
    if x < Y_SERIES_THRESHOLD:
        return 0.5 + x * (3.0 / 8.0 + x * (5.0 / 16.0 + x * 35.0 / 128.0))
    s = np.sqrt(1.0 - x)
    # same expression with the cancelling difference rationalised
    return float(1.0 / (s * (1.0 + s)))


def projection_closed_form(I: OrthogonalACS) -> np.ndarray:
    """Matrix of ``omega_J``, the 2-form of the orthogonal projection of ``J_I``.

    ``(2/sqrt(1-tau)) [[0, (1 + y A*) B*], [-(1 + y C*) B*^T, 0]]`` with
    ``tau = 4x - 3``.
    """
    _require_ao_minus(I)
    X = rotation_block(I)
    Ys = 2.0 / np.sqrt(1.0 - I.tau_predicted) * (E3 + y_of_x(I.x) * cofactor(I.C)) @ cofactor(I.B).T
    return np.block([[_Z3, X], [-Ys, _Z3]])


def rotation_block(I: OrthogonalACS) -> np.ndarray:
    """``X = (2/sqrt(1-tau)) (1 + y A*) B*``, an element of SO(3)."""
    _require_ao_minus(I)
    return 2.0 / np.sqrt(1.0 - I.tau_predicted) * (E3 + y_of_x(I.x) * cofactor(I.A)) @ cofactor(I.B)


def u_frame(I: OrthogonalACS) -> FrameChange:
    """Frame ``(e1, e2, e3, u4, u5, u6)`` in which ``omega_J`` is canonical.

    ``u_{3+k} = sum_j X[k, j] e_{3+j}``, i.e. the change matrix is
    ``diag(E, X^T)``; in it the projection of ``J_I`` becomes ``I0``.
    """
    return block_frame(rotation_block(I).T)


def block_metric(I) -> np.ndarray:
    """``[[2t(1 - A*/(1+t)), -1 + 2A*], [-1 + 2A*, 2t(1 - A*/(1+t))]]``.

    ``I`` is an ``OrthogonalACS`` or just its parameters ``(a1, a2, a3)``.
    """
    A = I.A if isinstance(I, OrthogonalACS) else _skew_from_params(I)
    t = float(np.sqrt(1.0 - _skew_params(A) @ _skew_params(A)))
    As = cofactor(A)
    diag = 2.0 * t * (E3 - As / (1.0 + t))
    off = -E3 + 2.0 * As
    return np.block([[diag, off], [off, diag]])


@dataclass(frozen=True, eq=False)
class HermitianPair:
    """``omega_J`` and the metric ``g_I``, both expressed in the (u) frame.

    ``J_u`` is ``J_I`` in the same frame.  ``hermitian_metric`` is
    ``omega_J(., J_I .)``; the block metric ``gI`` equals it times
    ``conformal_factor = sqrt(-tau) = sqrt(4t^2 - 1)``.
    """

    omegaJ: np.ndarray
    gI: np.ndarray
    frame: FrameChange
    J_u: np.ndarray
    t: float
    hermitian_metric: np.ndarray

    @property
    def conformal_factor(self) -> float:
        return float(np.sqrt(4.0 * self.t**2 - 1.0))

    @property
    def hermitian_residual(self) -> float:
        return float(np.abs(self.gI - self.hermitian_metric).max())

    @property
    def conformal_residual(self) -> float:
        return float(np.abs(self.gI - self.conformal_factor * self.hermitian_metric).max())

    def spectrum(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.gI)

    @staticmethod
    def expected_spectrum(t: float) -> np.ndarray:
        return np.sort([2 * t - 1, 2 * t - 1, 1.0, 2 * t + 1, 2 * t + 1, 4 * t * t - 1])


def hermitian_pair(I: OrthogonalACS, J: Optional[GeneralACS] = None) -> HermitianPair:
    """Block metric of ``I`` with ``omega_J`` and ``J_I`` moved to the (u) frame.

    ``J`` may pass an already computed ``alpha_map(I)``.
    """
    _require_ao_minus(I)
    F = u_frame(I)
    J_u = change_frame((alpha_map(I) if J is None else J).J, F, "operator")
    omega_u = change_frame(projection_closed_form(I), F, "bilinear")
    # g(X, Y) = omega(X, J Y)  ->  matrix omega @ J
    return HermitianPair(
        omegaJ=omega_u,
        gI=block_metric(I),
        frame=F,
        J_u=J_u,
        t=I.t,
        hermitian_metric=omega_u @ J_u,
    )


@dataclass(frozen=True)
class SU3Report:
    wedge_norm: float
    positivity_margin: float

    @property
    def compatible(self) -> bool:
        return self.wedge_norm <= 1e-10 and self.positivity_margin > 0


def su3_compatibility(omega: KForm, psi: KForm, J) -> SU3Report:
    """``|omega ^ psi|`` and the smallest eigenvalue of ``X -> omega(X, JX)``."""
    J = J.J if isinstance(J, GeneralACS) else np.asarray(J, dtype=float)
    W = to_skew_matrix(omega)
    Q = W @ J
    margin = float(np.linalg.eigvalsh(0.5 * (Q + Q.T)).min())
    return SU3Report(wedge(omega, psi).norm(), margin)
