"""The Cox ring: graded monomial bases and homogeneous polynomials.

A monomial is a tuple of exponents, one per ray. A ``CoxPolynomial`` maps
monomials to nonzero Fractions and carries its class in Cl.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .divisor import lift_class
from .exact_linalg import det, solve_rational
from .fan import DivisorClass, Fan, checked, class_group

Monomial = tuple[int, ...]

DEFAULT_POOL = tuple(c for c in range(-10, 11) if c)


class NotHomogeneousError(ValueError):
    pass


class EmptyGradedPieceError(ValueError):
    pass


@dataclass(frozen=True)
class GradedBasis:
    degree: DivisorClass
    monomials: tuple[Monomial, ...]

    def __len__(self) -> int:
        return len(self.monomials)

    def index(self) -> dict[Monomial, int]:
        return {m: i for i, m in enumerate(self.monomials)}


@dataclass(frozen=True, eq=True)
class CoxPolynomial:
    degree: DivisorClass
    terms: Mapping[Monomial, Fraction] = field(hash=False)

    def __post_init__(self):
        clean = {tuple(m): Fraction(c) for m, c in self.terms.items() if c}
        object.__setattr__(self, "terms", clean)

    @classmethod
    def from_terms(cls, fan: Fan, terms: Mapping[Monomial, Fraction],
                   degree: DivisorClass | None = None) -> "CoxPolynomial":
        """Build a polynomial, inferring or checking its class.

        The zero polynomial needs an explicit ``degree``.
        """
        cg = class_group(fan)
        nonzero = {m: c for m, c in terms.items() if c}
        for m in nonzero:
            if len(m) != fan.n:
                raise ValueError(f"monomial {m} has {len(m)} exponents, fan has {fan.n} rays")
            if any(e < 0 for e in m):
                raise ValueError(f"negative exponent in {m}")
        classes = {cg.degree(m) for m in nonzero}
        if len(classes) > 1:
            raise NotHomogeneousError(
                "polynomial is not homogeneous: classes " + ", ".join(sorted(map(str, classes)))
            )
        if classes:
            found = classes.pop()
            if degree is not None and degree != found:
                raise NotHomogeneousError(f"terms have class {found}, declared {degree}")
            degree = found
        elif degree is None:
            raise ValueError("the zero polynomial needs an explicit class")
        return cls(degree, nonzero)

    def scale(self, c) -> "CoxPolynomial":
        c = Fraction(c)
        return CoxPolynomial(self.degree, {m: c * v for m, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def to_text(self) -> str:
        return format_polynomial(self.terms)


def _canonical(monomials: Iterable[Monomial]) -> tuple[Monomial, ...]:
    return tuple(sorted(set(monomials), reverse=True))


def _polytope_box(fan: Fan, a: Sequence[int]) -> list[tuple[int, int]] | None:
    """Integer bounding box of ``P_a = {m : <m, v_i> >= -a_i}``; None if empty.

    The box comes from the vertices of ``P_a``: solutions of ``d`` tight
    inequalities with independent rays that satisfy all the others.
    """
    d = fan.dim
    lo: list[Fraction | None] = [None] * d
    hi: list[Fraction | None] = [None] * d
    for sub in combinations(range(fan.n), d):
        rows = [fan.rays[i] for i in sub]
        if det(rows) == 0:
            continue
        m = solve_rational(rows, [-a[i] for i in sub])
        if any(sum(x * y for x, y in zip(m, v)) < -ai for v, ai in zip(fan.rays, a)):
            continue
        for k in range(d):
            if lo[k] is None or m[k] < lo[k]:
                lo[k] = m[k]
            if hi[k] is None or m[k] > hi[k]:
                hi[k] = m[k]
    if lo[0] is None:
        return None
    return [(math.ceil(l), math.floor(h)) for l, h in zip(lo, hi)]


def monomials_from_divisor(fan: Fan, a: Sequence[int]) -> tuple[Monomial, ...]:
    """Monomials ``a + div(m)`` for the lattice points ``m`` of ``P_a``.

    These are exactly the monomials linearly equivalent to ``a``, since the
    kernel of the degree map is the lattice of principal divisors.
    """
    box = _polytope_box(fan, a)
    if box is None or any(l > h for l, h in box):
        return ()
    axes = [np.arange(l, h + 1, dtype=np.int64) for l, h in box]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, fan.dim)
    R = np.array(fan.rays, dtype=np.int64)
    exps = grid @ R.T + np.array(a, dtype=np.int64)
    exps = exps[(exps >= 0).all(axis=1)]
    return _canonical(tuple(int(x) for x in row) for row in exps)


@lru_cache(maxsize=4096)
def graded_basis(fan: Fan, beta: DivisorClass) -> GradedBasis:
    """All monomials of class ``beta``, in descending lexicographic order."""
    checked(fan)
    cg = class_group(fan)
    a = lift_class(fan, beta)
    if a is None:
        return GradedBasis(beta, ())
    monos = monomials_from_divisor(fan, a)
    for mono in monos:
        if cg.degree(mono) != beta:
            raise AssertionError(f"enumeration produced {mono} outside class {beta}")
    return GradedBasis(beta, monos)


def monomial(*exponents: int) -> Monomial:
    return tuple(exponents)


def multiply(f: CoxPolynomial, g: CoxPolynomial) -> CoxPolynomial:
    out: dict[Monomial, Fraction] = {}
    for m1, c1 in f.terms.items():
        for m2, c2 in g.terms.items():
            m = tuple(x + y for x, y in zip(m1, m2))
            out[m] = out.get(m, 0) + c1 * c2
    return CoxPolynomial(f.degree + g.degree, out)


def partial_derivative(fan: Fan, f: CoxPolynomial, i: int) -> CoxPolynomial:
    """d f / d z_i (``i`` is 0-based)."""
    var_deg = class_group(fan).variable_degrees()[i]
    out = {}
    for m, c in f.terms.items():
        e = m[i]
        if e:
            out[m[:i] + (e - 1,) + m[i + 1 :]] = c * e
    return CoxPolynomial(f.degree - var_deg, out)


def euler_identity_check(fan: Fan, f: CoxPolynomial) -> bool:
    """For each free coordinate psi of Cl: sum psi(deg z_i) z_i df/dz_i == psi(beta) f."""
    cg = class_group(fan)
    degs = cg.variable_degrees()
    for k in range(cg.free_rank):
        lhs: dict[Monomial, Fraction] = {}
        for m, c in f.terms.items():
            # z_i * d/dz_i m = m_i * m
            w = sum(degs[i].free_part[k] * m[i] for i in range(fan.n))
            if w:
                lhs[m] = lhs.get(m, 0) + w * c
        rhs = {m: f.degree.free_part[k] * c for m, c in f.terms.items()}
        if {m: c for m, c in lhs.items() if c} != {m: c for m, c in rhs.items() if c}:
            return False
    return True


def random_section(fan: Fan, beta: DivisorClass, seed: int,
                   coefficient_pool: Sequence[int] = DEFAULT_POOL) -> CoxPolynomial:
    """Every basis monomial of ``S_beta`` with a coefficient drawn from the pool."""
    basis = graded_basis(fan, beta)
    if not basis.monomials:
        raise EmptyGradedPieceError(f"no monomials of class {beta}")
    rng = random.Random(seed)
    terms = {m: Fraction(rng.choice(coefficient_pool)) for m in basis.monomials}
    return CoxPolynomial(beta, terms)


# ---------------------------------------------------------------------------
# Term syntax: ``c * z1^a1 z2^a2 ... `` joined by + and -
# ---------------------------------------------------------------------------


class PolynomialSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\s*/\s*\d+)?)|(?P<var>z(?P<idx>\d+))|(?P<op>[-+*^]))")


def _tokens(text: str):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        mt = _TOKEN.match(text, pos)
        if not mt:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            out.append(("bad", text[bad], bad))
            break
        start = mt.start(mt.lastgroup) if mt.lastgroup != "idx" else mt.start("var")
        if mt.group("num"):
            out.append(("num", mt.group("num").replace(" ", ""), start))
        elif mt.group("var"):
            out.append(("var", int(mt.group("idx")), start))
        else:
            out.append(("op", mt.group("op"), start))
        pos = mt.end()
    return out


def parse_polynomial(text: str, nvars: int) -> dict[Monomial, Fraction]:
    """Parse the term syntax into a monomial -> coefficient dict.

    Whitespace is ignored, ``*`` between factors is optional, a missing
    coefficient is 1 and a missing exponent is 1. Variables are ``z1..zn``.
    """
    toks = _tokens(text)

    def where(offset):
        line = text.count("\n", 0, offset) + 1
        col = offset - (text.rfind("\n", 0, offset) + 1) + 1
        return line, col

    def fail(msg, offset):
        raise PolynomialSyntaxError(msg, *where(offset))

    terms: dict[Monomial, Fraction] = {}
    i = 0
    if not toks:
        fail("empty polynomial", 0)
    first = True
    while i < len(toks):
        sign = 1
        kind, val, off = toks[i]
        if kind == "bad":
            fail(f"unexpected character {val!r}", off)
        if kind == "op" and val in "+-":
            sign = -1 if val == "-" else 1
            i += 1
        elif not first:
            fail("expected + or -", off)
        first = False
        coef = Fraction(1)
        expo = [0] * nvars
        seen_factor = False
        if i < len(toks) and toks[i][0] == "num":
            try:
                coef = Fraction(toks[i][1])
            except ZeroDivisionError:
                fail("zero denominator", toks[i][2])
            seen_factor = True
            i += 1
            if i < len(toks) and toks[i] [:2] == ("op", "*"):
                i += 1
                if i >= len(toks) or toks[i][0] != "var":
                    fail("expected a variable after *", toks[i][2] if i < len(toks) else len(text))
        while i < len(toks) and toks[i][0] == "var":
            idx, off = toks[i][1], toks[i][2]
            if not 1 <= idx <= nvars:
                fail(f"variable z{idx} out of range 1..{nvars}", off)
            i += 1
            e = 1
            if i < len(toks) and toks[i][:2] == ("op", "^"):
                i += 1
                if i >= len(toks) or toks[i][0] != "num" or "/" in toks[i][1]:
                    fail("expected an integer exponent", toks[i][2] if i < len(toks) else len(text))
                e = int(toks[i][1])
                i += 1
            expo[idx - 1] += e
            seen_factor = True
            if i < len(toks) and toks[i][:2] == ("op", "*"):
                i += 1
                if i >= len(toks) or toks[i][0] != "var":
                    fail("expected a variable after *", toks[i][2] if i < len(toks) else len(text))
        if not seen_factor:
            fail("expected a term", toks[i][2] if i < len(toks) else len(text))
        key = tuple(expo)
        terms[key] = terms.get(key, Fraction(0)) + sign * coef
    return {m: c for m, c in terms.items() if c}


def format_monomial(m: Monomial) -> str:
    parts = [f"z{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(m) if e]
    return " ".join(parts) if parts else "1"


def format_polynomial(terms: Mapping[Monomial, Fraction]) -> str:
    items = [(m, c) for m, c in sorted(terms.items(), reverse=True) if c]
    if not items:
        return "0"
    out = []
    for k, (m, c) in enumerate(items):
        sign = "-" if c < 0 else "+"
        c = abs(c)
        body = format_monomial(m)
        if any(m):
            text = body if c == 1 else f"{c} * {body}"
        else:
            text = str(c)
        if k == 0:
            out.append(text if sign == "+" else "-" + text)
        else:
            out.append(f"{sign} {text}")
    return " ".join(out)
