"""
Test algebras of vector field jets: closure, rank, saturation and classification
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from fractions import Fraction

import pytest

from src import fields
from src.errors import (
    DependentGenerators, DimensionMismatch, GcdUnsupported, NilpotentPencil, NotAbelian, NotClosed,
    NotInvariant, NotRank1, NotRank2, StarConditionFails, UnsupportedDimension,
)
from src.fields import DiffeoJet, VectorFieldJet
from src.jets import make_jet, variable
from src.liealg import (
    ClassificationTag, Family, classify_abelian_rank2, classify_dim1, closure_check,
    coefficient_functions, derivation_matrix, family_basis, first_integral_jet, generic_rank,
    is_abelian, is_nilpotent, presentation, radial_algebra, radial_extended_algebra, saturate_rank1,
    solve_linear_ode_jet, structure_constant,
)


def line(trunc, terms):
    return VectorFieldJet((make_jet(1, trunc, [((k,), c) for k, c in terms]),))


def planar(trunc, comp1, comp2):
    return VectorFieldJet((make_jet(2, trunc, comp1), make_jet(2, trunc, comp2)))


def test_projective_algebra_structure_constants():
    A = closure_check([line(4, [(0, 1)]), line(4, [(1, 1)]), line(4, [(2, 1)])])
    assert structure_constant(A, 1, 2) == [1, 0, 0]
    assert structure_constant(A, 1, 3) == [0, 2, 0]
    assert structure_constant(A, 2, 3) == [0, 0, 1]
    assert structure_constant(A, 3, 2) == [0, 0, -1]
    assert not is_abelian(A)


def test_closure_failures():
    with pytest.raises(NotClosed) as info:
        closure_check([line(4, [(0, 1)]), line(4, [(2, 1)])])
    assert (info.value.i, info.value.j) == (0, 1)
    # [d, x^2 d] = 2x d
    assert info.value.residual.components[0].coeffs == {(1,): 2}
    with pytest.raises(DependentGenerators):
        closure_check([line(4, [(0, 1)]), line(4, [(0, 2)])])


def test_radial_algebras():
    A = radial_algebra(2, 1, 4)
    assert A.size == 2
    assert is_abelian(A)
    assert generic_rank(A) == 1
    B = radial_extended_algebra(2, 1, 4)
    # [R, h R] = h R
    assert structure_constant(B, 1, 2) == [0, 1, 0]
    assert not is_abelian(B)
    assert not is_nilpotent(B)


def test_generic_rank_two():
    A = presentation([fields.radial_field(2, 4), planar(4, [], [((1, 0), 1)])])
    assert generic_rank(A) == 2


def test_saturation_of_radial_algebras():
    S = saturate_rank1(radial_algebra(2, 1, 4))
    assert fields.agree_fields(S.director, fields.radial_field(2, 4), 3)
    assert [f.coeffs for f in S.coefficient_space] == [{(0, 1): 1}, {(1, 0): 1}]
    assert not S.saturable
    assert saturate_rank1(radial_algebra(2, 0, 4)).saturable


def test_saturation_rejections():
    with pytest.raises(GcdUnsupported):
        saturate_rank1(radial_algebra(3, 1, 3))
    with pytest.raises(NotRank1):
        saturate_rank1(presentation([fields.radial_field(2, 4), planar(4, [], [((1, 0), 1)])]))
    # x1 d1 x1^2 - x1^2 d1 1 = 2 x1 is outside span(1, x1^2)
    with pytest.raises(StarConditionFails) as info:
        saturate_rank1(presentation([planar(4, [((0, 0), 1)], []), planar(4, [((2, 0), 1)], [])]))
    assert info.value.pair == (1, 2)


def test_rank_two_nilpotent_fixture():
    x0 = VectorFieldJet(tuple(make_jet(4, 4, [((1, 1, 0, 0), 1)] if i == 2 else []) for i in range(4)))
    x1 = VectorFieldJet(tuple(make_jet(4, 4, [((0, 1, 1, 0), 1)] if i == 3 else []) for i in range(4)))
    with pytest.raises(NotClosed) as info:
        closure_check([x0, x1])
    assert info.value.residual.components[3].coeffs == {(1, 2, 0, 0): 1}
    x2 = fields.bracket(x0, x1)
    A = closure_check([x0, x1, x2])
    assert structure_constant(A, 1, 2) == [0, 0, 1]
    assert is_nilpotent(A)
    assert generic_rank(A) == 2


def test_nilpotency():
    heisenberg = [planar(3, [((0, 0), 1)], []), planar(3, [], [((0, 0), 1)]), planar(3, [], [((1, 0), 1)])]
    assert is_nilpotent(presentation(heisenberg))
    affine = [line(3, [(0, 1)]), line(3, [(1, 1)])]
    assert not is_nilpotent(presentation(affine))


def test_first_integrals():
    saddle = planar(4, [((1, 0), 1)], [((0, 1), -1)])
    assert first_integral_jet(saddle, 4).coeffs == {(1, 1): 1}
    # q x1 d1 - p x2 d2 with p = 2, q = 1
    resonant = planar(4, [((1, 0), 1)], [((0, 1), -2)])
    assert first_integral_jet(resonant, 4).coeffs == {(2, 1): 1}
    rotation = planar(4, [((0, 1), 1)], [((1, 0), -1)])
    assert first_integral_jet(rotation, 4).coeffs == {(2, 0): 1, (0, 2): 1}
    assert first_integral_jet(fields.radial_field(2, 4), 4) is None


def test_coefficient_functions_of_a_frame():
    g1 = planar(4, [((0, 0), 1)], [])
    g2 = planar(4, [((0, 1), 1)], [((0, 0), 1)])
    Y = planar(4, [((1, 0), 1), ((0, 2), 1)], [((0, 1), 1)])
    f1, f2 = coefficient_functions((g1, g2), Y)
    assert f1.coeffs == {(1, 0): 1}
    assert f2.coeffs == {(0, 1): 1}
    with pytest.raises(UnsupportedDimension):
        coefficient_functions((line(3, [(0, 1)]), line(3, [(1, 1)])), line(3, [(2, 1)]))


def test_derivation_matrix_and_linear_ode():
    E = [make_jet(1, 3, [((0,), 1)]), variable(1, 3, 1)]
    assert derivation_matrix(line(3, [(1, 1)]), E) == [[0, 0], [0, 1]]
    with pytest.raises(NotInvariant):
        derivation_matrix(line(3, [(0, 1)]), [variable(1, 3, 1)])
    columns = solve_linear_ode_jet([[0, 1], [0, 0]], 3)
    assert columns[1][0].coeffs == {(1,): 1}
    assert columns[1][1].coeffs == {(0,): 1}
    assert columns[0][0].coeffs == {(0,): 1}
    assert columns[0][1].is_zero()


def test_classify_translation_on_the_line():
    tag = classify_dim1(presentation([line(5, [(0, 1), (1, 1)])]))
    assert tag.family is Family.DIM1_TRANSLATION


def test_classify_power_family_round_trip():
    tag = ClassificationTag(Family.DIM1_POWER, {'p': 1, 'lambda': Fraction(2)})
    X = family_basis(tag, 1, 6)[0]
    assert X.components[0].coeffs == {(2,): 1, (3,): 2, (4,): 4, (5,): 8, (6,): 16}
    found = classify_dim1(presentation([X]))
    assert found.family is Family.DIM1_POWER
    assert found.parameters == {'p': 1, 'lambda': 2}


def test_classify_power_family_after_conjugation():
    x = variable(1, 6, 1)
    h = DiffeoJet((x + make_jet(1, 6, [((2,), 1)]),))
    X = fields.pushforward(h, line(6, [(2, 1)]))
    found = classify_dim1(presentation([X]))
    assert found.family is Family.DIM1_POWER
    assert found.parameters['p'] == 1
    assert found.parameters['lambda'] == 0


@pytest.mark.parametrize("exponents,family", [
    ([0, 1], Family.DIM1_AFFINE_TRANSLATION),
    ([1, 3], Family.DIM1_AFFINE_POWER),
    ([0, 1, 2], Family.DIM1_PROJECTIVE),
])
def test_classify_line_spans(exponents, family):
    tag = classify_dim1(presentation([line(4, [(e, 1)]) for e in exponents]))
    assert tag.family is family
    if family is Family.DIM1_AFFINE_POWER:
        assert tag.parameters == {'p': 3}


@pytest.mark.parametrize("family,params", [
    (Family.ABELIAN_1, {}),
    (Family.ABELIAN_2, {'n': 2}),
    (Family.ABELIAN_3, {'p': 1, 'q': 1, 'lambda1': 1, 'lambda2': 1, 'a_hat': ((1, 1),)}),
    (Family.ABELIAN_4, {}),
    (Family.ABELIAN_5, {}),
    (Family.ABELIAN_7, {'a_hat': ((2, 1),)}),
])
def test_abelian_family_round_trip(family, params):
    gens = family_basis(ClassificationTag(family, params), 2, 6)
    tag = classify_abelian_rank2(presentation(gens))
    assert tag.family is family
    assert tag.parameters == params


def test_abelian_classification_rejections():
    with pytest.raises(NotAbelian):
        classify_abelian_rank2(presentation([planar(4, [((0, 0), 1)], []), planar(4, [((1, 0), 1)], [])]))
    with pytest.raises(NotRank2):
        classify_abelian_rank2(radial_algebra(2, 1, 4))
    # x2 d1 and x2 R commute; both one-jets are nilpotent
    pencil = [planar(4, [((0, 1), 1)], []), planar(4, [((1, 1), 1)], [((0, 2), 1)])]
    with pytest.raises(NilpotentPencil):
        classify_abelian_rank2(presentation(pencil))
    with pytest.raises(DimensionMismatch):
        family_basis(ClassificationTag(Family.ABELIAN_1), 1, 4)
    with pytest.raises(UnsupportedDimension):
        classify_dim1(radial_algebra(2, 0, 3))


if __name__ == "__main__":
    pytest.main([__file__])
