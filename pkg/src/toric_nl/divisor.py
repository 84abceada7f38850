"""Torus-invariant divisors, their classes, and ampleness."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact_linalg import solve_integer, solve_rational
from .fan import DivisorClass, Fan, class_group

TorusDivisor = tuple[int, ...]


def class_of(fan: Fan, D: Sequence[int]) -> DivisorClass:
    if len(D) != fan.n:
        raise ValueError(f"divisor needs {fan.n} coefficients, got {len(D)}")
    return class_group(fan).degree(D)


def anticanonical_class(fan: Fan) -> DivisorClass:
    """beta_0, the class of the sum of all torus-invariant prime divisors."""
    return class_of(fan, (1,) * fan.n)


def lift_class(fan: Fan, beta: DivisorClass) -> TorusDivisor | None:
    """Some divisor ``a`` in Z^n with class ``beta``.

    Torsion coordinates become extra unknowns: ``T a - t k = beta_torsion``.
    """
    cg = class_group(fan)
    n = fan.n
    ntors = len(cg.torsion)
    rows = []
    for k, row in enumerate(cg.degree_map):
        extra = [0] * ntors
        if k >= cg.free_rank:
            extra[k - cg.free_rank] = -cg.torsion[k - cg.free_rank]
        rows.append(list(row) + extra)
    rhs = list(beta.free_part) + list(beta.torsion_part)
    sol = solve_integer(rows, rhs, n + ntors)
    if sol is None:
        return None
    return tuple(sol[:n])


def principal_divisor(fan: Fan, m: Sequence[int]) -> TorusDivisor:
    return tuple(sum(x * y for x, y in zip(m, r)) for r in fan.rays)


@dataclass(frozen=True)
class SupportFunctionData:
    """Per maximal cone: the linear datum m_sigma and the wall checks."""

    m: tuple[tuple[Fraction, ...], ...]
    integral: tuple[bool, ...]
    strict: tuple[tuple[tuple[int, bool], ...], ...]


@dataclass(frozen=True)
class AmplenessResult:
    ample: bool
    cartier: bool
    data: SupportFunctionData


def support_function(fan: Fan, D: Sequence[int]) -> SupportFunctionData:
    ms, integral, strict = [], [], []
    for cone in fan.cones:
        m = solve_rational([fan.rays[i] for i in cone], [-D[i] for i in cone])
        ms.append(m)
        integral.append(all(x.denominator == 1 for x in m))
        checks = []
        for j in range(fan.n):
            if j in cone:
                continue
            val = sum(x * y for x, y in zip(m, fan.rays[j]))
            checks.append((j, val > -D[j]))
        strict.append(tuple(checks))
    return SupportFunctionData(tuple(ms), tuple(integral), tuple(strict))


def is_ample(fan: Fan, D: Sequence[int]) -> AmplenessResult:
    """Ampleness of D as a Q-divisor, with Cartier-ness reported separately.

    D is ample iff for every maximal cone and every ray ``v_j`` off it,
    ``<m_sigma, v_j> > -a_j``. D is Cartier iff every ``m_sigma`` is integral.
    """
    class_group(fan)
    data = support_function(fan, D)
    ample = all(ok for checks in data.strict for _, ok in checks)
    return AmplenessResult(ample=ample, cartier=all(data.integral), data=data)


def is_ample_class(fan: Fan, beta: DivisorClass) -> AmplenessResult:
    D = lift_class(fan, beta)
    if D is None:
        raise ValueError(f"class {beta} is not in the image of the degree map")
    return is_ample(fan, D)


def is_fano(fan: Fan) -> bool:
    return is_ample(fan, (1,) * fan.n).ample
