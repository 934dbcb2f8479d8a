"""
Test vector field calculus and the formal diffeomorphism group
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import random
from fractions import Fraction

import pytest

from src import fields
from src.errors import (
    NonSingularityViolated, NonzeroConstantTerm, NotPeriodic, SingularLinearPart, ZeroWithinReliable,
)
from src.fields import DiffeoJet, VectorFieldJet
from src.jets import agree, make_jet, monomials_of_degree, scale, variable, zero_jet


def random_jet(rng, dim, trunc, start=0, stop=None, density=0.5):
    terms = []
    for d in range(start, (trunc if stop is None else stop) + 1):
        for m in monomials_of_degree(dim, d):
            if rng.random() < density:
                terms.append((m, Fraction(rng.randint(-5, 5), rng.randint(1, 3))))
    return make_jet(dim, trunc, terms)


def random_field(rng, dim, trunc, start=1):
    return VectorFieldJet(tuple(random_jet(rng, dim, trunc, start) for _ in range(dim)))


def random_tangent_diffeo(rng, dim, trunc):
    return DiffeoJet(tuple(variable(dim, trunc, i + 1) + random_jet(rng, dim, trunc, 2, 3, 0.4)
                           for i in range(dim)))


def planar(trunc, comp1, comp2):
    return VectorFieldJet((make_jet(2, trunc, comp1), make_jet(2, trunc, comp2)))


def test_apply_is_euler_on_homogeneous_jets():
    R = fields.radial_field(2, 5)
    f = make_jet(2, 5, [((2, 1), 3), ((0, 3), -1)])
    assert agree(fields.apply(R, f), scale(f, 3))


def test_bracket_of_coordinate_fields():
    X = planar(4, [((0, 0), 1)], [])
    Y = planar(4, [], [((1, 0), 1)])
    B = fields.bracket(X, Y)
    # [d1, x1 d2] = d2
    assert B.components[0].is_zero()
    assert B.components[1].coeffs == {(0, 0): 1}


def test_lie_axioms_on_random_fields():
    rng = random.Random(5)
    for _ in range(25):
        dim = rng.choice([2, 3])
        X, Y, Z = (random_field(rng, dim, 5) for _ in range(3))
        assert (fields.bracket(X, Y) + fields.bracket(Y, X)).is_zero_within_reliable()
        jacobi = (fields.bracket(X, fields.bracket(Y, Z)) + fields.bracket(Y, fields.bracket(Z, X))
                  + fields.bracket(Z, fields.bracket(X, Y)))
        assert jacobi.is_zero_within_reliable()


def test_euler_identity_for_radial_bracket():
    rng = random.Random(9)
    for d in range(1, 5):
        for _ in range(5):
            dim = rng.choice([2, 3])
            comps = []
            for _ in range(dim):
                comps.append(make_jet(dim, 6, [(m, rng.randint(-4, 4)) for m in monomials_of_degree(dim, d + 1)]))
            X = VectorFieldJet(tuple(comps))
            R = fields.radial_field(dim, 6)
            assert fields.agree_fields(fields.bracket(R, X), X.scale(d))


def test_linear_part_and_order():
    X = planar(4, [((1, 0), 2), ((0, 2), 1)], [((1, 0), 1), ((0, 1), -1)])
    assert fields.linear_part(X) == [[2, 0], [1, -1]]
    assert fields.vanishing_order(X) == 1
    with pytest.raises(NonSingularityViolated):
        fields.linear_part(planar(4, [((0, 0), 1)], []))
    with pytest.raises(ZeroWithinReliable):
        fields.vanishing_order(fields.zero_field(2, 4))


def test_diffeo_validation():
    with pytest.raises(SingularLinearPart):
        DiffeoJet((variable(2, 3, 1), variable(2, 3, 1)))
    with pytest.raises(NonzeroConstantTerm):
        DiffeoJet((variable(2, 3, 1) + make_jet(2, 3, [((0, 0), 1)]), variable(2, 3, 2)))


def test_inverse_composes_to_identity():
    rng = random.Random(3)
    for _ in range(10):
        f = random_tangent_diffeo(rng, 2, 6)
        g = fields.inverse(f)
        assert fields.compose(f, g).is_identity()
        assert fields.compose(g, f).is_identity()


def test_inverse_of_linear_diffeo():
    f = DiffeoJet.linear([[2, 1], [0, 1]], 4)
    g = fields.inverse(f)
    assert g.linear_part() == [[Fraction(1, 2), Fraction(-1, 2)], [0, 1]]


def test_inverse_of_quadratic_on_the_line():
    x = variable(1, 6, 1)
    g = fields.inverse(DiffeoJet((x + make_jet(1, 6, [((2,), 1)]),)))
    coeffs = g.components[0].coeffs
    assert [coeffs[(k,)] for k in range(1, 7)] == [1, -1, 2, -5, 14, -42]


def test_pushforward_is_a_group_action():
    rng = random.Random(13)
    for _ in range(5):
        f, g = random_tangent_diffeo(rng, 2, 5), random_tangent_diffeo(rng, 2, 5)
        X = random_field(rng, 2, 5)
        lhs = fields.pushforward(fields.compose(f, g), X)
        rhs = fields.pushforward(f, fields.pushforward(g, X))
        assert fields.agree_fields(lhs, rhs)


def test_pushforward_matches_transport_solution():
    rng = random.Random(21)
    for _ in range(8):
        f = random_tangent_diffeo(rng, 2, 6)
        X = random_field(rng, 2, 6)
        assert fields.agree_fields(fields.pushforward(f, X), fields.pushforward_by_transport(f, X))


def test_pushforward_preserves_brackets():
    rng = random.Random(8)
    for _ in range(5):
        f = random_tangent_diffeo(rng, 2, 5)
        X, Y = random_field(rng, 2, 5), random_field(rng, 2, 5)
        lhs = fields.pushforward(f, fields.bracket(X, Y))
        rhs = fields.bracket(fields.pushforward(f, X), fields.pushforward(f, Y))
        assert fields.agree_fields(lhs, rhs)


def test_linear_conjugate_of_linear_field():
    X = fields.linear_field([[1, 0], [0, 2]], 3)
    P = [[1, 1], [0, 1]]
    Y = fields.linear_conjugate(P, X)
    # P D P^-1
    assert fields.linear_part(Y) == [[1, 1], [0, 2]]


def test_reduce_and_invert_words():
    assert fields.reduce_word(((1, 1), (1, -1), (2, 2), (2, 0))) == ((2, 2),)
    assert fields.reduce_word(((1, 2), (1, 1), (2, -1))) == ((1, 3), (2, -1))
    w = ((1, 1), (2, -1))
    assert fields.word_inverse(w) == ((2, 1), (1, -1))
    assert fields.commutator_word(1, 2) == ((1, 1), (2, 1), (1, -1), (2, -1))


def test_words_in_non_commuting_generators_are_nontrivial():
    a = DiffeoJet((variable(2, 6, 1) + make_jet(2, 6, [((0, 2), 1)]), variable(2, 6, 2)))
    b = DiffeoJet((variable(2, 6, 1), variable(2, 6, 2) + make_jet(2, 6, [((2, 0), 1)])))
    words = [
        ((1, 1),), ((2, -1),), ((1, 1), (2, 1)), ((1, 2), (2, -1)),
        fields.commutator_word(1, 2), ((1, 1), (2, 1), (1, -1)),
        ((1, 1), (2, 2), (1, -1), (2, -2)), ((1, 2), (2, 1), (1, -2), (2, -1)),
    ]
    for w in words:
        assert not fields.evaluate_word(w, [a, b]).is_identity()
    w = ((1, 1), (2, 1), (1, -2))
    assert fields.evaluate_word(w + fields.word_inverse(w), [a, b]).is_identity()


def test_iterate_and_periodicity():
    f = DiffeoJet.linear([[0, -1], [1, 0]], 4)
    assert fields.is_periodic(f, 4)
    assert not fields.is_periodic(f, 2)
    assert fields.iterate(f, 0).is_identity()


def test_bochner_linearizes_order_two_involution():
    x = variable(1, 8, 1)
    # -x/(1+x)
    f = DiffeoJet((make_jet(1, 8, [((k,), (-1) ** k) for k in range(1, 9)]),))
    assert fields.is_periodic(f, 2)
    h = fields.bochner_linearize(f, 2)
    assert agree(h.components[0].truncated(1), x.truncated(1))
    conjugated = fields.compose(h, f)
    assert agree(conjugated.components[0], scale(h.components[0], -1))
    with pytest.raises(NotPeriodic):
        fields.bochner_linearize(f, 3)


def test_zero_field_is_zero():
    Z = fields.zero_field(3, 2)
    assert Z.is_zero()
    assert all(c == zero_jet(3, 2) for c in Z.components)


if __name__ == "__main__":
    pytest.main([__file__])
