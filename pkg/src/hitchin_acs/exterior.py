"""Exterior algebra of a fixed six-dimensional real vector space.

Forms are stored densely over the lexicographic basis of strictly increasing
multi-indices, so ``e^{124}`` is the basis element ``(0, 1, 3)``.  Wedge and
interior products are precomputed as sparse sign tables and applied with
``numpy`` contractions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Sequence

import numpy as np

DIM = 6

__all__ = [
    "DIM",
    "KForm",
    "basis",
    "basis_form",
    "index_of",
    "wedge",
    "interior",
    "volume",
    "dual_iso_A",
    "evaluate",
    "from_skew_matrix",
    "to_skew_matrix",
]


@lru_cache(maxsize=None)
def basis(degree: int) -> tuple[tuple[int, ...], ...]:
    """Lexicographically ordered multi-indices of ``degree`` (0-based)."""
    return tuple(itertools.combinations(range(DIM), degree))


@lru_cache(maxsize=None)
def _positions(degree: int) -> dict[tuple[int, ...], int]:
    return {idx: n for n, idx in enumerate(basis(degree))}


def index_of(multi_index: Sequence[int]) -> int:
    """Position of a strictly increasing multi-index in its basis."""
    key = tuple(multi_index)
    return _positions(len(key))[key]


def _sort_sign(indices: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Return (sign, sorted indices); sign is 0 for a repeated index."""
    idx = list(indices)
    if len(set(idx)) < len(idx):
        return 0, ()
    sign = 1
    # bubble sort keeps track of transpositions
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


@dataclass(frozen=True, eq=False)
class KForm:
    """Alternating ``degree``-form on R^6.

    Parameters
    ----------
    degree : int
        Form degree in ``0..6``.
    coeffs : array_like
        ``C(6, degree)`` coefficients in lexicographic multi-index order.
    """

    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        if not 0 <= self.degree <= DIM:
            raise ValueError(f"degree must be in 0..{DIM}, got {self.degree}")
        c = np.array(self.coeffs, dtype=float).reshape(-1)
        if c.size != comb(DIM, self.degree):
            raise ValueError(
                f"a {self.degree}-form needs {comb(DIM, self.degree)} coefficients, got {c.size}"
            )
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls, degree: int) -> "KForm":
        return cls(degree, np.zeros(comb(DIM, degree)))

    def __add__(self, other: "KForm") -> "KForm":
        if other.degree != self.degree:
            raise ValueError("cannot add forms of different degree")
        return KForm(self.degree, self.coeffs + other.coeffs)

    def __sub__(self, other: "KForm") -> "KForm":
        return self + (-other)

    def __neg__(self) -> "KForm":
        return KForm(self.degree, -self.coeffs)

    def __mul__(self, scalar: float) -> "KForm":
        return KForm(self.degree, float(scalar) * self.coeffs)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "KForm":
        return KForm(self.degree, self.coeffs / float(scalar))

    def __xor__(self, other: "KForm") -> "KForm":
        return wedge(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, KForm):
            return NotImplemented
        return self.degree == other.degree and np.array_equal(self.coeffs, other.coeffs)

    def __repr__(self) -> str:
        terms = [
            f"{c:+.6g} e^{''.join(str(i + 1) for i in idx)}"
            for c, idx in zip(self.coeffs, basis(self.degree))
            if c != 0.0
        ]
        return f"KForm({self.degree}: {' '.join(terms) or '0'})"

    def norm(self) -> float:
        """Euclidean norm of the coefficient vector."""
        return float(np.linalg.norm(self.coeffs))

    def allclose(self, other: "KForm", atol: float = 1e-12) -> bool:
        return self.degree == other.degree and bool(
            np.allclose(self.coeffs, other.coeffs, rtol=0.0, atol=atol)
        )

    def to_json(self) -> dict:
        return {"degree": self.degree, "coeffs": [float(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> "KForm":
        return cls(int(data["degree"]), data["coeffs"])


def basis_form(*indices: int) -> KForm:
    """The form ``e^{i1} ^ ... ^ e^{ik}`` from 1-based indices, in any order."""
    sign, idx = _sort_sign([i - 1 for i in indices])
    form = np.zeros(comb(DIM, len(indices)))
    if sign:
        form[index_of(idx)] = sign
    return KForm(len(indices), form)


@lru_cache(maxsize=None)
def _wedge_tensor(p: int, q: int) -> np.ndarray:
    out = np.zeros((comb(DIM, p), comb(DIM, q), comb(DIM, p + q)))
    for a, ia in enumerate(basis(p)):
        for b, ib in enumerate(basis(q)):
            sign, idx = _sort_sign(ia + ib)
            if sign:
                out[a, b, index_of(idx)] = sign
    out.setflags(write=False)
    return out


def wedge(alpha: KForm, beta: KForm) -> KForm:
    """Exterior product ``alpha ^ beta``."""
    p, q = alpha.degree, beta.degree
    if p + q > DIM:
        raise ValueError(f"wedge of degrees {p} and {q} exceeds {DIM}")
    W = _wedge_tensor(p, q)
    coeffs = np.outer(alpha.coeffs, beta.coeffs).reshape(-1) @ W.reshape(-1, W.shape[2])
    return KForm(p + q, coeffs)


@lru_cache(maxsize=None)
def _interior_tensor(k: int) -> np.ndarray:
    # T[m, a, b]: coefficient of basis(k-1)[b] in i_{e_m} basis(k)[a]
    out = np.zeros((DIM, comb(DIM, k), comb(DIM, k - 1)))
    for a, idx in enumerate(basis(k)):
        for pos, m in enumerate(idx):
            rest = idx[:pos] + idx[pos + 1:]
            out[m, a, index_of(rest)] = (-1) ** pos
    out.setflags(write=False)
    return out


def interior(X, alpha: KForm) -> KForm:
    """Interior product ``i_X alpha`` (contraction in the first slot)."""
    if alpha.degree < 1:
        raise ValueError("interior product needs a form of degree >= 1")
    X = np.asarray(X, dtype=float).reshape(DIM)
    T = _interior_tensor(alpha.degree)
    M = (X @ T.reshape(DIM, -1)).reshape(T.shape[1:])
    return KForm(alpha.degree - 1, alpha.coeffs @ M)


def volume() -> KForm:
    """The fixed volume form ``e^{123456}``."""
    return KForm(DIM, [1.0])


def dual_iso_A(phi5: KForm) -> np.ndarray:
    """Vector ``Y`` with ``i_Y Vol = phi5``."""
    if phi5.degree != DIM - 1:
        raise ValueError("dual_iso_A expects a 5-form")
    # i_{e_m} Vol = (-1)^m e^{...m missing...}, which sits at index 5 - m
    c = phi5.coeffs
    return np.array([(-1) ** m * c[DIM - 1 - m] for m in range(DIM)])


def evaluate(alpha: KForm, *vectors) -> float:
    """Value ``alpha(X_1, ..., X_k)`` with the determinant normalisation."""
    if len(vectors) != alpha.degree:
        raise ValueError(f"a {alpha.degree}-form takes {alpha.degree} vectors")
    if alpha.degree == 0:
        return float(alpha.coeffs[0])
    V = np.column_stack([np.asarray(v, dtype=float) for v in vectors])
    return float(
        sum(c * np.linalg.det(V[list(idx), :]) for c, idx in zip(alpha.coeffs, basis(alpha.degree)) if c)
    )


def from_skew_matrix(M) -> KForm:
    """2-form with ``omega(e_i, e_j) = M[i, j]``; ``M`` must be skew."""
    M = np.asarray(M, dtype=float)
    return KForm(2, [M[i, j] for i, j in basis(2)])


def to_skew_matrix(omega: KForm) -> np.ndarray:
    """Matrix ``omega(e_i, e_j)`` of a 2-form."""
    if omega.degree != 2:
        raise ValueError("expected a 2-form")
    M = np.zeros((DIM, DIM))
    for c, (i, j) in zip(omega.coeffs, basis(2)):
        M[i, j], M[j, i] = c, -c
    return M
