"""
Test exterior calculus, logarithmic forms and planar separatrices
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import random
from fractions import Fraction

import pytest

from src import fields
from src.errors import (
    DegenerateLinearPart, DegreeOverflow, DegreeZero, NonCoprimeFactors, NonSingularityViolated,
    NonzeroConstantTerm, NotClosed, NotSimplePole, TopDegree, ZeroDirection,
)
from src.fields import VectorFieldJet
from src.jets import constant, make_jet, monomials_of_degree, variable
from src.oneforms import (
    CurveJet, LogSpec, MeromorphicFormJet, contract, coordinate_form, curve_pullback, dual_field_dim2,
    exterior_d, find_separatrix, from_jet_differential, function_form, is_closed, is_integrable,
    log_synthesize, make_form, pullback, residue_extract, wedge,
)


def random_jet(rng, dim, trunc, start=0):
    terms = []
    for d in range(start, trunc + 1):
        for m in monomials_of_degree(dim, d):
            if rng.random() < 0.4:
                terms.append((m, Fraction(rng.randint(-4, 4), rng.randint(1, 3))))
    return make_jet(dim, trunc, terms)


def random_one_form(rng, dim, trunc):
    return make_form(dim, 1, {(i,): random_jet(rng, dim, trunc) for i in range(dim)})


def planar_form(trunc, c1, c2):
    return make_form(2, 1, {(0,): make_jet(2, trunc, c1), (1,): make_jet(2, trunc, c2)})


def test_make_form_sorts_keys_with_sign():
    x1 = variable(3, 3, 1)
    w = make_form(3, 2, {(2, 0): x1})
    assert set(w.coeffs) == {(0, 2)}
    assert w.coefficient((0, 2)).coeffs == {(1, 0, 0): -1}


def test_d_of_rotation_form():
    omega = planar_form(4, [((0, 1), 1)], [((1, 0), -1)])
    d_omega = exterior_d(omega)
    assert d_omega.degree == 2
    assert d_omega.coefficient((0, 1)).coeffs == {(0, 0): -2}


def test_d_squared_vanishes():
    rng = random.Random(13)
    for _ in range(10):
        f = random_jet(rng, 3, 5)
        assert exterior_d(from_jet_differential(f)).is_zero_within_reliable()
        omega = random_one_form(rng, 3, 5)
        assert exterior_d(exterior_d(omega)).is_zero_within_reliable()


def test_d_is_an_antiderivation():
    rng = random.Random(19)
    for _ in range(10):
        alpha, beta = random_one_form(rng, 3, 5), random_one_form(rng, 3, 5)
        lhs = exterior_d(wedge(alpha, beta))
        rhs = wedge(exterior_d(alpha), beta) - wedge(alpha, exterior_d(beta))
        assert (lhs - rhs).is_zero_within_reliable()


def test_dual_field_inverts_contraction_with_area():
    rng = random.Random(23)
    area = make_form(2, 2, {(0, 1): constant(2, 5, 1)})
    for _ in range(5):
        X = VectorFieldJet((random_jet(rng, 2, 5, 1), random_jet(rng, 2, 5, 1)))
        omega = contract(X, area)
        assert fields.agree_fields(dual_field_dim2(omega), X)


def test_contract_radial_field_into_dual_form():
    R = fields.radial_field(2, 3)
    area = make_form(2, 2, {(0, 1): constant(2, 3, 1)})
    omega = contract(R, area)
    # -x2 dx1 + x1 dx2
    assert omega.coefficient((0,)).coeffs == {(0, 1): -1}
    assert omega.coefficient((1,)).coeffs == {(1, 0): 1}


def test_integrability():
    rng = random.Random(29)
    for _ in range(5):
        F = [random_jet(rng, 3, 4, 1) for _ in range(2)]
        omega = random_one_form(rng, 2, 4)
        assert is_integrable(pullback(F, omega))
    # dx3 - x2 dx1
    contact = make_form(3, 1, {(2,): constant(3, 4, 1), (0,): make_jet(3, 4, [((0, 1, 0), -1)])})
    assert not is_integrable(contact)
    assert is_integrable(random_one_form(rng, 2, 4))


def test_pullback_of_coordinate_form():
    F = [make_jet(2, 4, [((1, 0), 1), ((0, 2), 1)]), variable(2, 4, 2)]
    dF1 = pullback(F, coordinate_form(2, 4, 1))
    assert dF1.coefficient((0,)).coeffs == {(0, 0): 1}
    assert dF1.coefficient((1,)).coeffs == {(0, 1): 2}
    with pytest.raises(NonzeroConstantTerm):
        pullback([constant(2, 4, 1), variable(2, 4, 2)], coordinate_form(2, 4, 1))


def test_degree_errors():
    dx1 = coordinate_form(2, 3, 1)
    area = make_form(2, 2, {(0, 1): constant(2, 3, 1)})
    with pytest.raises(TopDegree):
        exterior_d(area)
    with pytest.raises(DegreeOverflow):
        wedge(dx1, area)
    with pytest.raises(DegreeZero):
        contract(fields.radial_field(2, 3), function_form(variable(2, 3, 1)))
    x1, x2 = variable(2, 3, 1), variable(2, 3, 2)
    with pytest.raises(NonzeroConstantTerm):
        log_synthesize(LogSpec(pair_factors=((constant(2, 3, 1) + x1, x2, Fraction(1), Fraction(0)),)))


def test_log_form_round_trip():
    x1, x2 = variable(2, 5, 1), variable(2, 5, 2)
    omega = log_synthesize(LogSpec(real_factors=((x1, Fraction(1)), (x2, Fraction(-1)))))
    assert omega.denominator.coeffs == {(1, 1): 1}
    assert is_closed(omega)
    assert residue_extract(omega, [x1, x2]) == [1, -1]


def test_log_forms_with_pairs_and_exact_parts_are_closed():
    x1, x2 = variable(2, 5, 1), variable(2, 5, 2)
    assert is_closed(log_synthesize(LogSpec(pair_factors=((x1, x2, Fraction(1), Fraction(1)),))))
    with_ham = log_synthesize(LogSpec(real_factors=((x1, Fraction(2)),), ham=(x2, (1,))))
    assert is_closed(with_ham)
    # the exact part doubles the pole along x1
    with pytest.raises(NotSimplePole):
        residue_extract(with_ham, [x1])


def test_residue_extract_rejections():
    x1, x2 = variable(2, 5, 1), variable(2, 5, 2)
    not_closed = MeromorphicFormJet(planar_form(5, [((0, 1), 1)], []), x1)
    with pytest.raises(NotClosed):
        residue_extract(not_closed, [x1])
    omega = log_synthesize(LogSpec(real_factors=((x1, Fraction(1)), (x2, Fraction(-1)))))
    with pytest.raises(NonCoprimeFactors):
        residue_extract(omega, [x1, make_jet(2, 5, [((1, 0), 1), ((1, 1), 1)])])


def test_curve_pullback():
    omega = planar_form(4, [((0, 1), 1)], [((1, 0), -1)])
    gamma = CurveJet((make_jet(1, 5, [((1,), 1)]), make_jet(1, 5, [((2,), 1)])))
    assert curve_pullback(omega, gamma).coeffs == {(2,): -1}


def test_separatrices_of_a_saddle_node():
    # dual form of x1 d1 + (-x2 + x1^2) d2
    omega = planar_form(5, [((0, 1), 1), ((2, 0), -1)], [((1, 0), 1)])
    gamma = find_separatrix(omega, (1, 0), 4)
    assert gamma.components[0].coeffs == {(1,): 1}
    assert gamma.components[1].coeffs == {(2,): Fraction(1, 3)}
    assert curve_pullback(omega, gamma).truncated(4).is_zero()
    gamma = find_separatrix(omega, (0, 1), 4)
    assert gamma.components[0].is_zero()
    assert gamma.components[1].coeffs == {(1,): 1}


def test_every_line_is_a_separatrix_of_the_radial_foliation():
    omega = planar_form(4, [((0, 1), -1)], [((1, 0), 1)])
    gamma = find_separatrix(omega, (1, 2), 3)
    assert gamma.components[0].coeffs == {(1,): 1}
    assert gamma.components[1].coeffs == {(1,): 2}


def test_centre_has_no_separatrix():
    omega = planar_form(4, [((1, 0), 1)], [((0, 1), 1)])
    assert find_separatrix(omega, (1, 0), 3) is None


def test_separatrix_rejections():
    omega = planar_form(4, [((1, 0), 1)], [((0, 1), 1)])
    with pytest.raises(ZeroDirection):
        find_separatrix(omega, (0, 0), 3)
    with pytest.raises(DegenerateLinearPart):
        find_separatrix(planar_form(4, [((2, 0), 1)], []), (1, 0), 3)
    with pytest.raises(NonSingularityViolated):
        find_separatrix(coordinate_form(2, 4, 1), (1, 0), 3)


if __name__ == "__main__":
    pytest.main([__file__])
