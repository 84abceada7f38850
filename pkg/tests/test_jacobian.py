import itertools
from fractions import Fraction

import pytest
import sympy

from toric_nl.cox import CoxPolynomial, random_section
from toric_nl.divisor import anticanonical_class
from toric_nl.fan import class_group
from toric_nl.jacobian import (
    NotAmpleError,
    UnsupportedDimensionError,
    jacobian_dims,
    k3_hodge_summary,
    multiplication_surjective,
    nl_check,
    primitive_hodge_dims,
)

from conftest import load_fan, load_poly


def sympy_jacobian_dims(fan, f, gamma, bound):
    """dim S_gamma and dim J_gamma via sympy, with brute-force monomial enumeration."""
    cg = class_group(fan)
    zs = sympy.symbols(f"z1:{fan.n + 1}")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * sympy.Mul(*[z**e for z, e in zip(zs, m)])
               for m, c in f.terms.items())

    def basis(beta):
        return [e for e in itertools.product(range(bound + 1), repeat=fan.n) if cg.degree(e) == beta]

    target = basis(gamma)
    index = {e: k for k, e in enumerate(target)}
    cols = []
    for i, z in enumerate(zs):
        df = sympy.Poly(sympy.diff(expr, z), *zs)
        if df.is_zero:
            continue
        for m in basis(gamma - f.degree + cg.variable_degrees()[i]):
            col = [0] * len(target)
            for mono, c in df.terms():
                col[index[tuple(a + b for a, b in zip(m, mono))]] += c
            cols.append(col)
    rank = sympy.Matrix(cols).rank() if cols else 0
    return len(target), rank


def test_fermat_quartic_pieces(p3, fermat4):
    g = jacobian_dims(p3, fermat4, fermat4.degree)
    assert (g.dim_S, g.dim_J, g.dim_R) == (35, 16, 19)
    zero = jacobian_dims(p3, fermat4, class_group(p3).zero())
    assert (zero.dim_S, zero.dim_J, zero.dim_R) == (1, 0, 1)


def test_fermat_quartic_ring_by_counting(p3, fermat4):
    # R(Fermat) has the monomials with all exponents <= 2 as a basis
    for k in range(0, 9):
        expected = sum(1 for e in itertools.product(range(3), repeat=4) if sum(e) == k)
        assert jacobian_dims(p3, fermat4, class_group(p3).make([k])).dim_R == expected


def test_weighted_sextic_pieces(p111_3, sextic):
    g = jacobian_dims(p111_3, sextic, sextic.degree)
    assert (g.dim_S, g.dim_J, g.dim_R) == (39, 20, 19)


def test_hodge_quartic(p3, fermat4):
    assert primitive_hodge_dims(p3, fermat4).dims() == {0: 1, 1: 19, 2: 1}


def test_hodge_fermat_quintic_fourfold(p4):
    f = load_poly(p4, "fermat5_p4")
    summary = primitive_hodge_dims(p4, f)
    dims = summary.dims()
    count = sum(1 for e in itertools.product(range(4), repeat=5) if sum(e) == 5)
    assert count == 101
    assert dims == {0: 1, 1: None, 2: count, 3: 1}
    invalid = [e for e in summary.entries if not e.valid]
    assert [e.p for e in invalid] == [1]


def test_not_ample_rejected(p3):
    const = CoxPolynomial(class_group(p3).zero(), {(0, 0, 0, 0): 1})
    with pytest.raises(NotAmpleError):
        primitive_hodge_dims(p3, const)


def test_nl_check_needs_threefold(p4):
    with pytest.raises(UnsupportedDimensionError):
        nl_check(p4, load_poly(p4, "fermat5_p4"))


@pytest.mark.parametrize("seed", [0, 1])
def test_cube_anticanonical_against_sympy(cube, seed):
    beta = class_group(cube).make([2, 2, 2])
    f = random_section(cube, beta, seed)
    g = jacobian_dims(cube, f, beta)
    assert (g.dim_S, g.dim_J) == sympy_jacobian_dims(cube, f, beta, 2)
    assert g.dim_R == 17


def test_f2xp1_against_sympy(f2xp1):
    beta = class_group(f2xp1).make([3, 1, 1])
    f = random_section(f2xp1, beta, 3)
    gamma = 2 * beta - anticanonical_class(f2xp1)
    g = jacobian_dims(f2xp1, f, gamma)
    assert (g.dim_S, g.dim_J) == sympy_jacobian_dims(f2xp1, f, gamma, 2)


def test_multiplication_examples(p3, fermat4):
    cg = class_group(p3)
    # R_0 x R_4 -> R_4 is onto: the constant is in R_0
    ok, rank = multiplication_surjective(p3, fermat4, cg.zero(), cg.make([4]))
    assert ok and rank == 35
    # R_1 x R_1 -> R_2 is onto for the Fermat quartic (J_2 = 0, S_1 S_1 = S_2)
    assert multiplication_surjective(p3, fermat4, cg.make([1]), cg.make([1]))[0]


@pytest.mark.parametrize("seed", [11, 12])
def test_generic_quintic_surface(p3, seed):
    f = random_section(p3, class_group(p3).make([5]), seed)
    report = nl_check(p3, f)
    assert report.surjective and report.predicted_picard == 1 and not report.shortcut
    assert report.dim_S_target == 84 and report.rank_achieved == 84
    assert (report.dim_source_T, report.dim_source_PH20, report.dim_target) == (40, 4, 44)


def test_k3_shortcut_agrees_with_rank(p3, fermat4, cube):
    for fan, f in [(p3, fermat4), (cube, random_section(cube, class_group(cube).make([2, 2, 2]), 2))]:
        fast = nl_check(fan, f)
        slow = nl_check(fan, f, shortcut=False)
        assert fast.shortcut and not slow.shortcut
        assert fast.surjective == slow.surjective is True


def test_k3_summary(p3, fermat4, p111_3, sextic):
    for fan, f in [(p3, fermat4), (p111_3, sextic)]:
        s = k3_hodge_summary(fan, f)
        assert (s.h20, s.h11) == (1, 20)
        # h20 + h11 + h02 for the primitive part plus the ambient class adds up to 22
        assert 2 * s.h20 + s.h11 == 22


@pytest.mark.parametrize("c", [Fraction(-3), Fraction(2, 7)])
def test_scaling_invariance(cube, c):
    beta = class_group(cube).make([2, 2, 2])
    f = random_section(cube, beta, 4)
    assert jacobian_dims(cube, f.scale(c), beta) == jacobian_dims(cube, f, beta)


def test_diagonal_rescaling_invariance(cube):
    beta = class_group(cube).make([2, 2, 2])
    f = random_section(cube, beta, 4)
    lam = [2, -1, 3, Fraction(1, 2), 5, -2]
    terms = {}
    for m, c in f.terms.items():
        w = c
        for l, e in zip(lam, m):
            w *= Fraction(l) ** e
        terms[m] = w
    g = CoxPolynomial(beta, terms)
    assert jacobian_dims(cube, g, beta).dim_R == jacobian_dims(cube, f, beta).dim_R


def test_modular_method_agrees(cube):
    beta = class_group(cube).make([2, 2, 2])
    f = random_section(cube, beta, 7)
    assert jacobian_dims(cube, f, beta, "modular") == jacobian_dims(cube, f, beta, "exact")


def test_nl_report_not_surjective_wording():
    from toric_nl.jacobian import NLReport
    d = NLReport(False, 1, 1, 1, 1, 0, None, False).to_dict()
    assert d["predicted_picard"] == "criterion not satisfied"
