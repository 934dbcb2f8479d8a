"""
Test jet arithmetic, reliable-order bookkeeping, division and gcd
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import random
from fractions import Fraction

import pytest

from src.errors import (
    BadIndex, DegreeOverflow, DimensionMismatch, NonzeroConstantTerm, NotAUnit, NotDivisible,
    PrecisionExhausted, TruncMismatch, UnsupportedDimension,
)
from src.jets import (
    add, agree, constant, differentiate, divide_exact, gcd_poly, integrate, invert_unit, make_jet,
    monomials_of_degree, mul, scale, series_divmod, substitute, variable, zero_jet,
)


def random_jet(rng, dim, trunc, start=0, density=0.5):
    terms = []
    for d in range(start, trunc + 1):
        for m in monomials_of_degree(dim, d):
            if rng.random() < density:
                terms.append((m, Fraction(rng.randint(-9, 9), rng.randint(1, 5))))
    return make_jet(dim, trunc, terms)


def test_make_jet_is_canonical():
    a = make_jet(2, 4, [((1, 0), '3/2'), ((0, 2), -1), ((1, 0), '-3/2'), ((1, 1), 0)])
    assert a.coeffs == {(0, 2): Fraction(-1)}
    assert a.reliable == 4
    assert a.pretty() == '-x2^2'


def test_make_jet_rejects_bad_terms():
    with pytest.raises(DegreeOverflow):
        make_jet(2, 2, [((2, 1), 1)])
    with pytest.raises(DimensionMismatch):
        make_jet(2, 2, [((1,), 1)])


def test_terms_print_in_graded_lex_order():
    a = make_jet(2, 3, [((2, 0), 1), ((0, 2), 2), ((1, 1), 3), ((0, 0), 5)])
    assert [m for m, _ in a.terms()] == [(0, 0), (0, 2), (1, 1), (2, 0)]


def test_product_and_truncation():
    x1 = variable(2, 3, 1)
    one = constant(2, 3, 1)
    p = mul(add(one, x1), add(one, scale(x1, -1)))
    assert p.coeffs == {(0, 0): 1, (2, 0): -1}
    cube = mul(mul(x1, x1), mul(x1, x1))
    assert cube.is_zero()


def test_product_reliable_order():
    a = make_jet(1, 6, [((1,), 1), ((3,), 2)], reliable=3)
    b = make_jet(1, 6, [((2,), 1)])
    # min(3 + 2, 6 + 1, 6)
    assert mul(a, b).reliable == 5
    c = make_jet(1, 6, [((0,), 1)])
    assert mul(a, c).reliable == 3


def test_add_takes_smaller_reliable():
    a = make_jet(1, 5, [((1,), 1)], reliable=2)
    b = make_jet(1, 5, [((2,), 1)])
    assert add(a, b).reliable == 2


def test_mismatched_operands():
    with pytest.raises(DimensionMismatch):
        add(zero_jet(1, 3), zero_jet(2, 3))
    with pytest.raises(TruncMismatch):
        mul(zero_jet(2, 3), zero_jet(2, 4))


def test_differentiate_lowers_reliable():
    a = make_jet(2, 4, [((3, 1), 2), ((0, 2), 1)])
    da = differentiate(a, 1)
    assert da.coeffs == {(2, 1): 6}
    assert da.reliable == 3
    with pytest.raises(BadIndex):
        differentiate(a, 3)
    with pytest.raises(PrecisionExhausted):
        differentiate(make_jet(1, 2, [((1,), 1)], reliable=0), 1)


def test_integrate_inverts_differentiate():
    a = make_jet(2, 5, [((0, 0), 1), ((1, 2), 3)])
    back = differentiate(integrate(a, 1), 1)
    assert agree(back, a, 4)


def test_substitute_polynomial_arguments():
    f = make_jet(2, 4, [((2, 0), 1), ((0, 1), 1)])
    u = make_jet(2, 4, [((1, 0), 1), ((0, 1), 1)])
    v = make_jet(2, 4, [((1, 1), 1)])
    g = substitute(f, [u, v])
    assert g.coeffs == {(2, 0): 1, (1, 1): 3, (0, 2): 1}


def test_substitute_into_a_curve():
    f = make_jet(2, 4, [((1, 1), 1), ((0, 2), -1)])
    t = variable(1, 6, 1)
    t2 = make_jet(1, 6, [((2,), 1)])
    g = substitute(f, [t, t2])
    assert g.dim == 1 and g.trunc == 6
    assert g.coeffs == {(3,): 1, (4,): -1}


def test_substitute_requires_vanishing_arguments():
    f = variable(1, 3, 1)
    with pytest.raises(NonzeroConstantTerm):
        substitute(f, [constant(1, 3, 1)])


def test_invert_unit_geometric_series():
    a = make_jet(1, 5, [((0,), 1), ((1,), -1)])
    inv = invert_unit(a)
    assert inv.coeffs == {(k,): 1 for k in range(6)}
    assert agree(mul(a, inv), constant(1, 5, 1))
    with pytest.raises(NotAUnit):
        invert_unit(variable(1, 5, 1))


def test_series_divmod_exact_quotient():
    b = variable(2, 5, 1)
    a = make_jet(2, 5, [((2, 0), 1), ((2, 1), 1)])
    q, r = series_divmod(a, b)
    assert q.coeffs == {(1, 0): 1, (1, 1): 1}
    assert r.is_zero()
    assert q.reliable == 4


def test_series_divmod_reconstructs_dividend():
    rng = random.Random(7)
    for _ in range(10):
        a = random_jet(rng, 2, 5)
        b = add(variable(2, 5, 1), random_jet(rng, 2, 5, start=2, density=0.3))
        q, r = series_divmod(a, b)
        assert agree(add(mul(b, q), r), a, q.reliable)


def test_divide_exact_detects_remainder():
    with pytest.raises(NotDivisible):
        divide_exact(variable(2, 4, 2), variable(2, 4, 1))


def test_divide_exact_difference_of_squares():
    a = make_jet(2, 4, [((2, 0), 1), ((0, 2), -1)])
    b = make_jet(2, 4, [((1, 0), 1), ((0, 1), -1)])
    assert divide_exact(a, b).coeffs == {(1, 0): 1, (0, 1): 1}


def test_substitution_is_functorial():
    rng = random.Random(31)
    for _ in range(10):
        f = random_jet(rng, 2, 4)
        g = [random_jet(rng, 2, 4, start=1) for _ in range(2)]
        h = [random_jet(rng, 2, 4, start=1) for _ in range(2)]
        lhs = substitute(substitute(f, g), h)
        rhs = substitute(f, [substitute(gi, h) for gi in g])
        assert agree(lhs, rhs)


def test_gcd_poly():
    a = make_jet(2, 6, [((2, 1), 1)])
    b = make_jet(2, 6, [((1, 2), 2)])
    assert gcd_poly(a, b).coeffs == {(1, 1): 1}
    c = make_jet(2, 6, [((1, 0), 2)])
    d = make_jet(2, 6, [((1, 1), 4)])
    assert gcd_poly(c, d).coeffs == {(1, 0): 1}
    assert gcd_poly(zero_jet(2, 6), zero_jet(2, 6)).is_zero()
    with pytest.raises(UnsupportedDimension):
        gcd_poly(variable(3, 2, 1), variable(3, 2, 2))


def test_ring_axioms_on_random_jets():
    rng = random.Random(2024)
    for _ in range(40):
        dim = rng.choice([2, 3])
        a, b, c = (random_jet(rng, dim, 4) for _ in range(3))
        assert agree(mul(mul(a, b), c), mul(a, mul(b, c)))
        assert agree(mul(a, add(b, c)), add(mul(a, b), mul(a, c)))
        assert agree(mul(a, b), mul(b, a))


def test_leibniz_rule_on_random_jets():
    rng = random.Random(11)
    for _ in range(40):
        dim = rng.choice([2, 3])
        a, b = random_jet(rng, dim, 5), random_jet(rng, dim, 5)
        i = rng.randint(1, dim)
        lhs = differentiate(mul(a, b), i)
        rhs = add(mul(differentiate(a, i), b), mul(a, differentiate(b, i)))
        assert agree(lhs, rhs)


if __name__ == "__main__":
    pytest.main([__file__])
