"""SO(4) primitives: group/tangent containers, skew basis, exponential, adjoint.

Everything downstream works with tuples of 4x4 orthogonal matrices ("points on
a product of SO(4) factors") and tangent vectors stored as ambient matrices,
one per factor.  A matrix V is tangent to SO(4) at h exactly when h^T V is
skew-symmetric.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

DIM = 4

#: index pairs (1-based) naming the six skew basis elements, in fixed order
BASIS_PAIRS = ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))


@dataclass(frozen=True, eq=False)
class GroupPoint:
    """A point of SO(4)^p, stored as a tuple of 4x4 orthogonal matrices."""

    factors: tuple[np.ndarray, ...]

    @property
    def level(self) -> int:
        return len(self.factors)

    def validate(self, tol: float = 1e-12) -> "GroupPoint":
        """Raise ValueError unless every factor is special orthogonal."""
        for k, m in enumerate(self.factors):
            if m.shape != (DIM, DIM):
                raise ValueError(f"factor {k} has shape {m.shape}, want (4, 4)")
            if np.max(np.abs(m.T @ m - np.eye(DIM))) > tol:
                raise ValueError(f"factor {k} is not orthogonal within {tol}")
            if abs(np.linalg.det(m) - 1.0) > 1e-9:
                raise ValueError(f"factor {k} has determinant != +1")
        return self


@dataclass(frozen=True, eq=False)
class Tangent:
    """A tangent vector at ``base``: one ambient 4x4 matrix per factor."""

    base: GroupPoint
    reps: tuple[np.ndarray, ...]

    @property
    def level(self) -> int:
        return len(self.reps)

    def validate(self, tol: float = 1e-12) -> "Tangent":
        """Raise ValueError unless h^T V is skew for every factor."""
        if len(self.reps) != self.base.level:
            raise ValueError("tangent/base factor count mismatch")
        for k, (h, v) in enumerate(zip(self.base.factors, self.reps)):
            s = h.T @ v
            if np.max(np.abs(s + s.T)) > tol:
                raise ValueError(f"rep {k} is not tangent at the base point")
        return self


@dataclass(frozen=True)
class SignedPermutation:
    """A permutation of (1, 2, 3, 4) together with its sign."""

    images: tuple[int, int, int, int]
    sign: int


def identity_point(level: int) -> GroupPoint:
    """The identity element of SO(4)^level."""
    if level < 0:
        raise ValueError("level must be >= 0")
    return GroupPoint(tuple(np.eye(DIM) for _ in range(level)))


def basis_so4() -> tuple[np.ndarray, ...]:
    """The six skew matrices E_ab (entry (a,b) = +1, (b,a) = -1), a < b."""
    out = []
    for a, b in BASIS_PAIRS:
        m = np.zeros((DIM, DIM))
        m[a - 1, b - 1] = 1.0
        m[b - 1, a - 1] = -1.0
        out.append(m)
    return tuple(out)


def basis_element(a: int, b: int) -> np.ndarray:
    """E_ab for 1 <= a < b <= 4."""
    if not (1 <= a < b <= DIM):
        raise ValueError("need 1 <= a < b <= 4")
    return basis_so4()[BASIS_PAIRS.index((a, b))]


def skew_from_coords(coords) -> np.ndarray:
    """Skew matrix with the six coordinates in BASIS_PAIRS order."""
    coords = np.asarray(coords, dtype=float)
    if coords.shape != (6,):
        raise ValueError("need exactly six coordinates")
    m = np.zeros((DIM, DIM))
    for c, (a, b) in zip(coords, BASIS_PAIRS):
        m[a - 1, b - 1] = c
        m[b - 1, a - 1] = -c
    return m


def random_skew(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Skew matrix with independent entries uniform in [-scale, scale]."""
    return skew_from_coords(rng.uniform(-scale, scale, size=6))


def exp_matrix(x: np.ndarray) -> np.ndarray:
    """Matrix exponential of a 4x4 skew matrix (lands in SO(4))."""
    x = np.asarray(x, dtype=float)
    if x.shape != (DIM, DIM):
        raise ValueError(f"need a 4x4 matrix, got shape {x.shape}")
    if np.max(np.abs(x + x.T)) > 1e-10:
        raise ValueError("exp_matrix expects a skew-symmetric argument")
    return expm(x)


def exp_skew(x: np.ndarray) -> GroupPoint:
    """exp of a skew matrix, wrapped as a one-factor group point."""
    return GroupPoint((exp_matrix(x),))


def sample_so4(seed: int) -> GroupPoint:
    """Deterministic pseudo-random rotation: exp of a skew draw in [-2, 2]."""
    rng = np.random.default_rng(seed)
    return exp_skew(random_skew(rng, scale=2.0))


def adjoint(g: GroupPoint, x: np.ndarray) -> np.ndarray:
    """Conjugation g x g^-1 of a skew matrix by a one-factor group point."""
    if g.level != 1:
        raise ValueError("adjoint expects a single-factor group point")
    m = g.factors[0]
    return m @ x @ m.T


def commutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


def _perm_sign(images) -> int:
    inv = sum(
        1
        for i in range(len(images))
        for j in range(i + 1, len(images))
        if images[i] > images[j]
    )
    return -1 if inv % 2 else 1


def s4_table() -> tuple[SignedPermutation, ...]:
    """All 24 permutations of (1,2,3,4) with signs, in lexicographic order."""
    return _S4_TABLE


_S4_TABLE = tuple(
    SignedPermutation(images=p, sign=_perm_sign(p))
    for p in itertools.permutations((1, 2, 3, 4))
)
