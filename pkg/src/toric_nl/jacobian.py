"""Graded pieces of the Jacobian ring and the Noether-Lefschetz test.

All dimensions are computed inside the Cox ring: ``J(f)_gamma`` is spanned
by the products ``m * df/dz_i`` with ``m`` running over the monomials of
class ``gamma - deg(df/dz_i)``, and ``R(f)_gamma = S_gamma / J(f)_gamma``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterator

from .cox import CoxPolynomial, NotHomogeneousError, graded_basis, partial_derivative
from .divisor import anticanonical_class, is_ample_class, is_fano
from .exact_linalg import rank_of_vectors
from .fan import DivisorClass, Fan, checked, class_group, picard_number

VERY_GENERAL_CAVEAT = (
    "predicted Picard number of the very general member of the linear system; "
    "this specific hypersurface may have a larger Picard number"
)


class NotAmpleError(ValueError):
    pass


class UnsupportedDimensionError(ValueError):
    pass


def default_rank_method() -> str:
    return os.environ.get("TORIC_NL_RANK_METHOD", "exact")


@dataclass(frozen=True)
class GradedDims:
    degree: DivisorClass
    dim_S: int
    dim_J: int

    @property
    def dim_R(self) -> int:
        return self.dim_S - self.dim_J

    def to_dict(self) -> dict:
        return {"class": self.degree.to_list(), "dim_S": self.dim_S,
                "dim_J": self.dim_J, "dim_R": self.dim_R}


@dataclass(frozen=True)
class HodgeEntry:
    p: int
    q: int
    degree: DivisorClass
    valid: bool
    dim: int | None

    def to_dict(self) -> dict:
        return {"p": self.p, "q": self.q, "class": self.degree.to_list(),
                "valid": self.valid, "dim": self.dim}


@dataclass(frozen=True)
class HodgeSummary:
    dim: int
    entries: tuple[HodgeEntry, ...]
    graded: tuple[GradedDims, ...]

    def dims(self) -> dict[int, int | None]:
        return {e.p: e.dim for e in self.entries}

    def to_dict(self) -> dict:
        return {"entries": [e.to_dict() for e in self.entries],
                "graded_pieces": [g.to_dict() for g in self.graded]}


@dataclass(frozen=True)
class NLReport:
    surjective: bool
    dim_source_T: int
    dim_source_PH20: int
    dim_target: int
    dim_S_target: int
    rank_achieved: int | None
    predicted_picard: int | None
    shortcut: bool

    def to_dict(self) -> dict:
        return {
            "surjective": self.surjective,
            "dim_source_T": self.dim_source_T,
            "dim_source_PH20": self.dim_source_PH20,
            "dim_target": self.dim_target,
            "dim_S_target": self.dim_S_target,
            "rank_achieved": self.rank_achieved,
            "predicted_picard": (self.predicted_picard if self.surjective
                                 else "criterion not satisfied"),
            "decided_by": "anticanonical Fano shortcut" if self.shortcut else "rank computation",
            "caveat": VERY_GENERAL_CAVEAT,
        }


@dataclass(frozen=True)
class K3Summary:
    h20: int
    h11: int
    primitive_h11: int
    ambient_h11: int

    def to_dict(self) -> dict:
        return {"h20": self.h20, "h11": self.h11,
                "primitive_h11": self.primitive_h11, "ambient_h11": self.ambient_h11}


def _check_homogeneous(fan: Fan, f: CoxPolynomial) -> None:
    cg = class_group(fan)
    for m in f.terms:
        if len(m) != fan.n:
            raise ValueError(f"monomial {m} does not match the {fan.n} rays of the fan")
        if cg.degree(m) != f.degree:
            raise NotHomogeneousError(f"term {m} has class {cg.degree(m)}, polynomial has {f.degree}")


def _jacobian_columns(fan: Fan, f: CoxPolynomial, gamma: DivisorClass,
                      index: dict) -> Iterator[dict[int, object]]:
    for i in range(fan.n):
        df = partial_derivative(fan, f, i)
        if df.is_zero():
            continue
        for m in graded_basis(fan, gamma - df.degree).monomials:
            col = {}
            for mono, c in df.terms.items():
                col[index[tuple(x + y for x, y in zip(m, mono))]] = c
            yield col


def jacobian_dims(fan: Fan, f: CoxPolynomial, gamma: DivisorClass,
                  method: str | None = None) -> GradedDims:
    checked(fan)
    _check_homogeneous(fan, f)
    basis = graded_basis(fan, gamma)
    index = basis.index()
    rank = rank_of_vectors(_jacobian_columns(fan, f, gamma, index), len(basis),
                           method or default_rank_method())
    return GradedDims(gamma, len(basis), rank)


def _require_ample(fan: Fan, f: CoxPolynomial) -> None:
    if f.degree.is_zero() or not is_ample_class(fan, f.degree).ample:
        raise NotAmpleError(f"class {f.degree} is not ample")


def primitive_hodge_dims(fan: Fan, f: CoxPolynomial, method: str | None = None) -> HodgeSummary:
    """``dim PH^{p,d-1-p} = dim R(f)_{(d-p) beta - beta_0}`` for ``p != d/2 - 1``.

    The excluded ``p`` gets ``valid=False`` and no number.
    """
    checked(fan)
    _check_homogeneous(fan, f)
    _require_ample(fan, f)
    d = fan.dim
    beta0 = anticanonical_class(fan)
    entries, graded = [], []
    for p in range(d):
        gamma = (d - p) * f.degree - beta0
        if 2 * p == d - 2:
            entries.append(HodgeEntry(p, d - 1 - p, gamma, False, None))
            continue
        gd = jacobian_dims(fan, f, gamma, method)
        graded.append(gd)
        entries.append(HodgeEntry(p, d - 1 - p, gamma, True, gd.dim_R))
    return HodgeSummary(d, tuple(entries), tuple(graded))


def multiplication_surjective(fan: Fan, f: CoxPolynomial, beta1: DivisorClass,
                              gamma: DivisorClass, method: str | None = None) -> tuple[bool, int]:
    """Whether ``R(f)_beta1 x R(f)_gamma -> R(f)_{beta1+gamma}`` is onto.

    Decided in S: the products of the two monomial bases together with
    ``J(f)_{beta1+gamma}`` must span ``S_{beta1+gamma}``. Returns the verdict
    and the rank reached.
    """
    checked(fan)
    _check_homogeneous(fan, f)
    target = beta1 + gamma
    basis = graded_basis(fan, target)
    index = basis.index()
    left = graded_basis(fan, beta1).monomials
    right = graded_basis(fan, gamma).monomials

    def columns():
        for m1 in left:
            for m2 in right:
                yield {index[tuple(x + y for x, y in zip(m1, m2))]: 1}
        yield from _jacobian_columns(fan, f, target, index)

    rank = rank_of_vectors(columns(), len(basis), method or default_rank_method())
    return rank == len(basis), rank


def nl_check(fan: Fan, f: CoxPolynomial, method: str | None = None,
             shortcut: bool = True) -> NLReport:
    """Surjectivity of ``R(f)_beta x R(f)_{beta-beta0} -> R(f)_{2beta-beta0}``.

    When it holds, the very general member of the linear system has the
    Picard number of the ambient toric threefold. For ``beta = beta0`` on a
    Fano threefold ``R(f)_0`` is one-dimensional and the map is the identity,
    which ``shortcut`` uses instead of a rank computation.
    """
    checked(fan)
    if fan.dim != 3:
        raise UnsupportedDimensionError(f"the criterion needs a 3-dimensional fan, got {fan.dim}")
    _check_homogeneous(fan, f)
    _require_ample(fan, f)
    beta = f.degree
    beta0 = anticanonical_class(fan)
    dims_T = jacobian_dims(fan, f, beta, method)
    dims_20 = jacobian_dims(fan, f, beta - beta0, method)
    target = 2 * beta - beta0
    dims_11 = jacobian_dims(fan, f, target, method)
    if shortcut and beta == beta0 and is_fano(fan):
        surjective, rank = True, None
    else:
        surjective, rank = multiplication_surjective(fan, f, beta, beta - beta0, method)
    return NLReport(
        surjective=surjective,
        dim_source_T=dims_T.dim_R,
        dim_source_PH20=dims_20.dim_R,
        dim_target=dims_11.dim_R,
        dim_S_target=dims_11.dim_S,
        rank_achieved=rank,
        predicted_picard=picard_number(fan) if surjective else None,
        shortcut=rank is None,
    )


def k3_hodge_summary(fan: Fan, f: CoxPolynomial, method: str | None = None) -> K3Summary:
    """``h^{1,1} = rho(Sigma) + dim R(f)_beta`` for an anticanonical surface."""
    checked(fan)
    if fan.dim != 3:
        raise UnsupportedDimensionError(f"K3 summary needs a 3-dimensional fan, got {fan.dim}")
    _check_homogeneous(fan, f)
    beta0 = anticanonical_class(fan)
    if f.degree != beta0:
        raise ValueError(f"class {f.degree} is not the anticanonical class {beta0}")
    if not is_fano(fan):
        raise NotAmpleError("the fan is not Fano")
    h20 = jacobian_dims(fan, f, f.degree - beta0, method).dim_R
    prim = jacobian_dims(fan, f, f.degree, method).dim_R
    rho = picard_number(fan)
    return K3Summary(h20=h20, h11=rho + prim, primitive_h11=prim, ambient_h11=rho)
