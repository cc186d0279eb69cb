"""Cartan-model machinery for the conjugation action of SO(4) on its nerve.

An equivariant form of polynomial degree k assigns to each skew matrix X a
plain form, homogeneously of degree k in X, equivariant for simultaneous
conjugation.  The model differential is d - i_{X#}, where X# is the
generating vector field of the conjugation action; with the sign convention
used here its value at h is (h_j X - X h_j) per factor, i.e. the
left-invariant minus the right-invariant extension of X.

Because d raises and the contraction lowers the form degree, the Cartan
differential of a homogeneous form has two homogeneous components; it is
returned as a GradedForm keyed by degree.

`equivariant_total_check` evaluates the five component identities that make
the degree-4 cochain (3-form, 2-form on the squared level, and the
polynomial 1-form) a cocycle of the equivariant nerve complex, determining
the two undetermined relative signs empirically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .formcalc import FormEval, contract, exterior_d, zero_form
from .matrixgroup import GroupPoint, Tangent
from .nerve import d_prime


@dataclass(frozen=True, eq=False)
class FundamentalField:
    """Generating vector field of conjugation: h_j -> h_j X - X h_j."""

    X: np.ndarray
    level: int

    def __call__(self, pt: GroupPoint) -> Tangent:
        if pt.level != self.level:
            raise ValueError("fundamental field applied at the wrong level")
        x = self.X
        return Tangent(pt, tuple(h @ x - x @ h for h in pt.factors))


def fundamental_field(X: np.ndarray, level: int) -> FundamentalField:
    return FundamentalField(np.asarray(X, dtype=float), level)


@dataclass(frozen=True, eq=False)
class EquivariantForm:
    """A polynomial family X -> FormEval, homogeneous of degree poly_degree."""

    level: int
    form_degree: int
    poly_degree: int
    eval: Callable[[np.ndarray], FormEval]

    @property
    def total_degree(self) -> int:
        return self.level + self.form_degree + 2 * self.poly_degree

    def __call__(self, X: np.ndarray) -> FormEval:
        return self.eval(X)


@dataclass(frozen=True, eq=False)
class GradedForm:
    """A finite sum of homogeneous forms of distinct degrees, one level."""

    level: int
    components: dict[int, FormEval]

    def component(self, degree: int) -> FormEval:
        return self.components.get(degree, zero_form(degree, self.level))

    def __call__(self, pt: GroupPoint, *tangents: Tangent) -> float:
        return self.component(len(tangents))(pt, *tangents)


def _graded_cartan_step(level: int, parts: dict[int, FormEval], X: np.ndarray,
                        fd_step: float) -> GradedForm:
    field = fundamental_field(X, level)
    out: dict[int, FormEval] = {}

    def accumulate(degree: int, form: FormEval) -> None:
        out[degree] = out[degree] + form if degree in out else form

    for degree, form in parts.items():
        accumulate(degree + 1, exterior_d(form, fd_step))
        if degree >= 1:
            accumulate(degree - 1, -contract(form, field))
    return GradedForm(level, out)


def cartan_d(alpha: EquivariantForm, X: np.ndarray,
             fd_step: float = 1e-5) -> GradedForm:
    """(d - i_{X#}) applied to alpha(X), split into homogeneous components."""
    form = alpha(X)
    return _graded_cartan_step(alpha.level, {form.degree: form}, X, fd_step)


def cartan_d_graded(g: GradedForm, X: np.ndarray,
                    fd_step: float = 1e-5) -> GradedForm:
    """Apply the Cartan differential to an already-graded value (for d^2 probes)."""
    return _graded_cartan_step(g.level, dict(g.components), X, fd_step)


@dataclass(frozen=True)
class CocycleSample:
    """Random evaluation data shared by the five component identities."""

    h1: GroupPoint                      # one-factor point
    v: tuple[Tangent, ...]              # four tangents at h1
    h2: GroupPoint                      # two-factor point
    t: tuple[Tangent, ...]              # three tangents at h2


@dataclass(frozen=True)
class TotalCheckResult:
    residuals: dict[str, float]
    sigma1: int
    sigma2: int
    rejected: dict[str, float]

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


def _check_shapes(e13: EquivariantForm, e22: EquivariantForm,
                  mu: EquivariantForm) -> None:
    if (e13.level, e13.form_degree, e13.poly_degree) != (1, 3, 0):
        raise ValueError("first cochain must be a 3-form at level 1")
    if (e22.level, e22.form_degree, e22.poly_degree) != (2, 2, 0):
        raise ValueError("second cochain must be a 2-form at level 2")
    if (mu.level, mu.form_degree, mu.poly_degree) != (1, 1, 1):
        raise ValueError("third cochain must be a polynomial 1-form at level 1")


def equivariant_total_check(e13: EquivariantForm, e22: EquivariantForm,
                            mu: EquivariantForm, X: np.ndarray,
                            samples: Sequence[CocycleSample],
                            fd_step: float = 1e-5) -> TotalCheckResult:
    """Max-abs residuals of the five cocycle component identities.

    a: d e13 = 0                        (4-form, one factor; finite difference)
    b: i_{X#} e13 = d mu(X)             (2-form, one factor; finite difference)
    c: i_{X#} mu(X) = 0                 (scalar, one factor; exact algebra)
    d: d' e13 + sigma1 * d e22 = 0      (3-form, two factors; finite difference)
    e: d' mu(X) = sigma2 * i_{X##} e22  (1-form, two factors; exact algebra)

    The signs sigma1, sigma2 in {+1, -1} are chosen per run to minimize the
    residual; the rejected sign's residual is reported so callers can assert
    the choice is forced.
    """
    _check_shapes(e13, e22, mu)
    e13_form = e13(X)
    e22_form = e22(X)
    mu_form = mu(X)

    d_e13 = exterior_d(e13_form, fd_step)
    d_mu = exterior_d(mu_form, fd_step)
    i_e13 = contract(e13_form, fundamental_field(X, 1))
    i_mu = contract(mu_form, fundamental_field(X, 1))
    dp_e13 = d_prime(e13_form)
    d_e22 = exterior_d(e22_form, fd_step)
    dp_mu = d_prime(mu_form)
    i_e22 = contract(e22_form, fundamental_field(X, 2))

    res = {k: 0.0 for k in "abcde"}
    d_plus = d_minus = 0.0
    e_plus = e_minus = 0.0
    for s in samples:
        if s.h1.level != 1 or s.h2.level != 2:
            raise ValueError("sample points must have levels 1 and 2")
        if len(s.v) != 4 or len(s.t) != 3:
            raise ValueError(
                "sample needs 4 tangents at the level-1 point and 3 at the"
                " level-2 point")
        res["a"] = max(res["a"], abs(d_e13.fn(s.h1, s.v)))
        pair = s.v[:2]
        res["b"] = max(res["b"], abs(i_e13.fn(s.h1, pair) - d_mu.fn(s.h1, pair)))
        res["c"] = max(res["c"], abs(i_mu.fn(s.h1, ())))
        lhs_d = dp_e13.fn(s.h2, s.t)
        rhs_d = d_e22.fn(s.h2, s.t)
        d_plus = max(d_plus, abs(lhs_d + rhs_d))
        d_minus = max(d_minus, abs(lhs_d - rhs_d))
        single = s.t[:1]
        lhs_e = dp_mu.fn(s.h2, single)
        rhs_e = i_e22.fn(s.h2, single)
        e_plus = max(e_plus, abs(lhs_e - rhs_e))
        e_minus = max(e_minus, abs(lhs_e + rhs_e))

    sigma1, res["d"], rej_d = (1, d_plus, d_minus) if d_plus <= d_minus \
        else (-1, d_minus, d_plus)
    sigma2, res["e"], rej_e = (1, e_plus, e_minus) if e_plus <= e_minus \
        else (-1, e_minus, e_plus)
    return TotalCheckResult(
        residuals=res, sigma1=sigma1, sigma2=sigma2,
        rejected={"d": rej_d, "e": rej_e})
