"""The explicit degree-4 cochain on the SO(4) nerve and its building blocks.

Three evaluators are hand-coded as signed sums over all 24 permutations of
(1,2,3,4), pairing matrix entries (tau1,tau2) against (tau3,tau4):

* a bi-invariant 3-form on SO(4) built from the left Maurer-Cartan form and
  its wedge square (coefficient 1/(192 pi^2)),
* a 2-form on SO(4)^2 pairing the left form of the first factor with the
  right form of the second (coefficient -1/(64 pi^2)),
* a polynomial 1-form pairing the argument X against both Maurer-Cartan
  forms (coefficient -1/(64 pi^2) on each half).

`eval_alpha` integrates the corresponding pairing of two algebra paths over
[0, 1] with composite Simpson quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .cartanmodel import EquivariantForm
from .formcalc import FormEval, _same_point
from .matrixgroup import GroupPoint, Tangent, s4_table

_C192 = 1.0 / (192.0 * math.pi ** 2)
_C64 = -1.0 / (64.0 * math.pi ** 2)

# permutation images as 0-based index quadruples, paired with signs
_PERMS = tuple((p.sign, p.images[0] - 1, p.images[1] - 1,
                p.images[2] - 1, p.images[3] - 1) for p in s4_table())


def _pair_sum(m1, m2) -> float:
    """sum over permutations of sgn * (m1[t1,t2] m2[t3,t4] + m1[t3,t4] m2[t1,t2])."""
    total = 0.0
    for s, a, b, c, d in _PERMS:
        total += s * (m1[a][b] * m2[c][d] + m1[c][d] * m2[a][b])
    return total


def _require_base(pt: GroupPoint, *ts: Tangent) -> None:
    for t in ts:
        if t.base is not pt and not _same_point(t.base, pt):
            raise ValueError("tangent is based at a different point")


def eval_E13(pt: GroupPoint, v1: Tangent, v2: Tangent, v3: Tangent) -> float:
    """The bi-invariant 3-form at a one-factor point."""
    if pt.level != 1:
        raise ValueError("this 3-form lives on a single factor")
    _require_base(pt, v1, v2, v3)
    hT = pt.factors[0].T
    w = [(hT @ v.reps[0]).tolist() for v in (v1, v2, v3)]

    def comm(a, b):
        out = [[0.0] * 4 for _ in range(4)]
        for i in range(4):
            for j in range(4):
                out[i][j] = sum(a[i][k] * b[k][j] - b[i][k] * a[k][j]
                                for k in range(4))
        return out

    c23 = comm(w[1], w[2])
    c13 = comm(w[0], w[2])
    c12 = comm(w[0], w[1])
    total = 0.0
    for s, a, b, c, d in _PERMS:
        # (1,2)-shuffle expansion of (1-form) wedge (2-form), then the
        # symmetrized entry pairing
        shuf_ab_cd = (w[0][a][b] * c23[c][d] - w[1][a][b] * c13[c][d]
                      + w[2][a][b] * c12[c][d])
        shuf_cd_ab = (w[0][c][d] * c23[a][b] - w[1][c][d] * c13[a][b]
                      + w[2][c][d] * c12[a][b])
        total += s * (shuf_ab_cd + shuf_cd_ab)
    return _C192 * total


def eval_E22(pt: GroupPoint, t1: Tangent, t2: Tangent) -> float:
    """The left/right mixed 2-form at a two-factor point."""
    if pt.level != 2:
        raise ValueError("this 2-form lives on two factors")
    _require_base(pt, t1, t2)
    h1T = pt.factors[0].T
    h2T = pt.factors[1].T
    left = [(h1T @ t.reps[0]).tolist() for t in (t1, t2)]
    right = [(t.reps[1] @ h2T).tolist() for t in (t1, t2)]
    total = 0.0
    for s, a, b, c, d in _PERMS:
        wedge_ab_cd = left[0][a][b] * right[1][c][d] - left[1][a][b] * right[0][c][d]
        wedge_cd_ab = left[0][c][d] * right[1][a][b] - left[1][c][d] * right[0][a][b]
        total += s * (wedge_ab_cd + wedge_cd_ab)
    return _C64 * total


def eval_mu(X: np.ndarray, pt: GroupPoint, v: Tangent) -> float:
    """The polynomial 1-form: X paired against both Maurer-Cartan forms."""
    if pt.level != 1:
        raise ValueError("the polynomial 1-form lives on a single factor")
    _require_base(pt, v)
    h = pt.factors[0]
    x = np.asarray(X, dtype=float).tolist()
    wl = (h.T @ v.reps[0]).tolist()
    wr = (v.reps[0] @ h.T).tolist()
    total = 0.0
    for s, a, b, c, d in _PERMS:
        total += s * (x[a][b] * wl[c][d] + x[c][d] * wl[a][b]
                      + x[a][b] * wr[c][d] + x[c][d] * wr[a][b])
    return _C64 * total


def e13_form() -> EquivariantForm:
    """The 3-form packaged as a (constant-in-X) equivariant form."""
    form = FormEval(3, 1, lambda pt, ts: eval_E13(pt, *ts))
    return EquivariantForm(level=1, form_degree=3, poly_degree=0,
                           eval=lambda X: form)


def e22_form() -> EquivariantForm:
    form = FormEval(2, 2, lambda pt, ts: eval_E22(pt, *ts))
    return EquivariantForm(level=2, form_degree=2, poly_degree=0,
                           eval=lambda X: form)


def mu_form() -> EquivariantForm:
    def at(X: np.ndarray) -> FormEval:
        return FormEval(1, 1, lambda pt, ts: eval_mu(X, pt, ts[0]))

    return EquivariantForm(level=1, form_degree=1, poly_degree=1, eval=at)


@dataclass(frozen=True)
class AlgebraPath:
    """A path in the skew matrices with its derivative, both on [0, 1]."""

    value: Callable[[float], np.ndarray]
    deriv: Callable[[float], np.ndarray]


def polynomial_path(coeffs) -> AlgebraPath:
    """Path sum_k theta^k coeffs[k] with exact derivative."""
    coeffs = [np.asarray(c, dtype=float) for c in coeffs]

    def value(theta: float) -> np.ndarray:
        out = np.zeros((4, 4))
        for k, c in enumerate(coeffs):
            out += (theta ** k) * c
        return out

    def deriv(theta: float) -> np.ndarray:
        out = np.zeros((4, 4))
        for k, c in enumerate(coeffs[1:], start=1):
            out += k * (theta ** (k - 1)) * c
        return out

    return AlgebraPath(value, deriv)


def eval_alpha(xi1: AlgebraPath, xi2: AlgebraPath, n_quad: int = 64) -> float:
    """Antisymmetric path pairing integrated by composite Simpson.

    n_quad is the (even) number of subintervals.
    """
    if n_quad < 8 or n_quad % 2:
        raise ValueError("n_quad must be an even integer >= 8")

    def integrand(theta: float) -> float:
        a = xi1.value(theta).tolist()
        da = xi1.deriv(theta).tolist()
        b = xi2.value(theta).tolist()
        db = xi2.deriv(theta).tolist()
        return _pair_sum(da, b) - _pair_sum(db, a)

    h = 1.0 / n_quad
    total = integrand(0.0) + integrand(1.0)
    for k in range(1, n_quad):
        total += (4.0 if k % 2 else 2.0) * integrand(k * h)
    return _C64 * (h / 3.0) * total
