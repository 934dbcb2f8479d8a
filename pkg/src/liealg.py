"""
Lie algebras - Finite-dimensional algebras of formal vector fields
Closure and structure constants, generic rank, rank-1 saturation, first
integrals, nilpotency and the classification of small algebras up to
formal change of coordinates
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from src import linalg
from src.errors import (
    ConsistencyError, DependentGenerators, DimensionMismatch, GcdUnsupported, IrrationalSpectrum,
    NilpotentPencil, NotAbelian, NotClosed, NotInvariant, NotRank1, NotRank2, StarConditionFails,
    TruncMismatch, Unclassifiable, UnsupportedDimension, ZeroWithinReliable, DegreeOverflow,
    BadParameter,
)
from src.fields import (
    DiffeoJet, VectorFieldJet, apply, bracket, compose, inverse, linear_part,
    pushforward, radial_field, vanishing_order, vector_field,
)
from src.jets import (
    Jet, Multidegree, _jet, add, agree, as_rational, divide_exact, gcd_poly, integrate,
    invert_unit, make_jet, monomial, monomials_of_degree, monomials_up_to, mul, power, scale,
    sub, variable, zero_jet,
)
from src.normalform import jordan_linear, linearize_nonresonant, poincare_dulac_normalize
from src.runlog import log

Structure = Tuple[Tuple[Tuple[Fraction, ...], ...], ...]
Coordinate = Tuple[int, Multidegree]


@dataclass(frozen=True)
class AlgebraPresentation:
    """
    Generators of a finite-dimensional Lie algebra of vector field jets

    structure[i][j][k] is the coefficient of g_k in [g_i, g_j] (0-based), set
    once closure has been verified.
    """
    generators: Tuple[VectorFieldJet, ...]
    structure: Optional[Structure] = None

    @property
    def size(self) -> int:
        return len(self.generators)

    @property
    def dim(self) -> int:
        return self.generators[0].dim

    @property
    def trunc(self) -> int:
        return self.generators[0].trunc

    @property
    def reliable(self) -> int:
        return min(g.reliable for g in self.generators)


@dataclass(frozen=True)
class Rank1Saturation:
    """Every generator is f * director with f in span(coefficient_space)"""
    director: VectorFieldJet
    coefficient_space: Tuple[Jet, ...]
    saturable: bool


class Family(str, Enum):
    DIM1_TRANSLATION = 'dim1-translation'
    DIM1_POWER = 'dim1-power'
    DIM1_AFFINE_TRANSLATION = 'dim1-affine-translation'
    DIM1_AFFINE_POWER = 'dim1-affine-power'
    DIM1_PROJECTIVE = 'dim1-projective'
    ABELIAN_1 = 'abelian-1'
    ABELIAN_2 = 'abelian-2'
    ABELIAN_3 = 'abelian-3'
    ABELIAN_4 = 'abelian-4'
    ABELIAN_5 = 'abelian-5'
    ABELIAN_6 = 'abelian-6'
    ABELIAN_7 = 'abelian-7'


@dataclass(frozen=True)
class ClassificationTag:
    """
    Family membership with a witness

    pushforward(certificate, g) lies in span(family_basis(tag)) for every input
    generator g. Series parameters ('a_hat') are tuples of (power, coefficient).
    """
    family: Family
    parameters: Dict[str, object] = field(default_factory=dict)
    certificate: Optional[DiffeoJet] = None


# --- coefficient vectors ---

def _field_coordinates(n: int, order: int) -> List[Coordinate]:
    return [(j, m) for j in range(n) for m in monomials_up_to(n, order)]


def _field_vector(X: VectorFieldJet, coords: Sequence[Coordinate]) -> linalg.Vector:
    return [X.components[j].coefficient(m) for j, m in coords]


def _field_from(vec: linalg.Vector, coords: Sequence[Coordinate], n: int, trunc: int,
                reliable: int) -> VectorFieldJet:
    comps: List[Dict[Multidegree, Fraction]] = [{} for _ in range(n)]
    for c, (j, m) in zip(vec, coords):
        if c:
            comps[j][m] = c
    return VectorFieldJet(tuple(_jet(n, trunc, comp, reliable) for comp in comps))


def _combination(gens: Sequence[VectorFieldJet], coeffs: Sequence[Fraction]) -> VectorFieldJet:
    total = None
    for g, c in zip(gens, coeffs):
        term = g.scale(c)
        total = term if total is None else total + term
    return total


def _check_shared(gens: Sequence[VectorFieldJet]):
    first = gens[0]
    for g in gens[1:]:
        if g.dim != first.dim:
            raise DimensionMismatch(f"generator dims {first.dim} vs {g.dim}")
        if g.trunc != first.trunc:
            raise TruncMismatch(f"generator truncs {first.trunc} vs {g.trunc}")


def presentation(gens: Sequence[VectorFieldJet]) -> AlgebraPresentation:
    """Unchecked presentation (no structure constants yet)"""
    if not gens:
        raise DependentGenerators("empty generator list")
    _check_shared(gens)
    return AlgebraPresentation(tuple(gens))


# --- closure ---

def closure_check(gens: Sequence[VectorFieldJet]) -> AlgebraPresentation:
    """
    Verify that the span of gens is closed under the bracket

    Each bracket [g_i, g_j] is expressed in the generator span by an exact
    linear solve on coefficient vectors up to the common reliable order.

    Returns:
        AlgebraPresentation with structure constants

    Raises:
        DependentGenerators: gens are linearly dependent over Q
        NotClosed: some bracket leaves the span (carries the residual field)
    """
    gens = list(gens)
    if not gens:
        raise DependentGenerators("empty generator list")
    _check_shared(gens)
    n, trunc = gens[0].dim, gens[0].trunc
    order = min(g.reliable for g in gens)
    coords = _field_coordinates(n, order)
    rows = [_field_vector(g, coords) for g in gens]
    if linalg.rank(rows) < len(gens):
        raise DependentGenerators(f"{len(gens)} generators span a space of dimension {linalg.rank(rows)}")

    size = len(gens)
    log(f"Closure check on {size} generator(s), dim {n}, reliable order {order}")
    zero = tuple(Fraction(0) for _ in range(size))
    structure = [[zero for _ in range(size)] for _ in range(size)]
    for i, j in combinations(range(size), 2):
        b = bracket(gens[i], gens[j])
        top = min(order, b.reliable)
        coords_b = _field_coordinates(n, top)
        rows_b = [_field_vector(g, coords_b) for g in gens]
        coeffs, remainder = linalg.reduce_against(rows_b, _field_vector(b, coords_b))
        if coeffs is None:
            log(f"❌ [g{i + 1}, g{j + 1}] leaves the span")
            raise NotClosed(i, j, _field_from(remainder, coords_b, n, trunc, top))
        structure[i][j] = tuple(coeffs)
        structure[j][i] = tuple(-c for c in coeffs)
    log("✓ closed")
    return AlgebraPresentation(tuple(gens), tuple(tuple(row) for row in structure))


def _closed(A: AlgebraPresentation) -> AlgebraPresentation:
    return A if A.structure is not None else closure_check(A.generators)


def structure_constant(A: AlgebraPresentation, i: int, j: int) -> List[Fraction]:
    """Coefficients of [g_i, g_j] in the generators (1-based indices)"""
    A = _closed(A)
    return list(A.structure[i - 1][j - 1])


def ad_matrices(A: AlgebraPresentation) -> List[linalg.Matrix]:
    """ad(g_i) in the generator basis: column j holds the coefficients of [g_i, g_j]"""
    A = _closed(A)
    m = A.size
    return [[[A.structure[i][j][k] for j in range(m)] for k in range(m)] for i in range(m)]


def is_abelian(A: AlgebraPresentation) -> bool:
    A = _closed(A)
    return not any(c for plane in A.structure for row in plane for c in row)


# --- generic rank ---

def _jet_det(M: List[List[Jet]]) -> Jet:
    """Determinant of a square matrix of jets by cofactor expansion along the first row"""
    if len(M) == 1:
        return M[0][0]
    total = None
    for c, entry in enumerate(M[0]):
        if entry.is_zero():
            continue
        minor = [row[:c] + row[c + 1:] for row in M[1:]]
        term = mul(entry, _jet_det(minor))
        if c % 2:
            term = scale(term, -1)
        total = term if total is None else add(total, term)
    return total if total is not None else scale(M[0][0], 0)


def generic_rank(A: AlgebraPresentation) -> int:
    """
    Largest k with a nonvanishing k x k minor of the component matrix

    Nonvanishing is decided within the reliable order of each minor.
    """
    gens = A.generators
    n, m = A.dim, A.size
    for k in range(min(n, m), 0, -1):
        for cols in combinations(range(m), k):
            for rows in combinations(range(n), k):
                minor = _jet_det([[gens[c].components[r] for c in cols] for r in rows])
                if not minor.is_zero_within_reliable():
                    return k
        log(f"  every {k}x{k} minor vanishes up to its reliable order")
    return 0


# --- rank one ---

def saturate_rank1(A: AlgebraPresentation) -> Rank1Saturation:
    """
    Write a rank-1 algebra as E * X with X a director field of gcd 1

    The director is a nonzero generator divided by the gcd of its components;
    the algebra is saturable when E contains a unit, i.e. when a gcd-1 field
    lies in the algebra itself.

    Raises:
        GcdUnsupported: ambient dimension > 2
        NotRank1: generic rank is not 1
        StarConditionFails: f X(g) - g X(f) leaves span E for some basis pair
    """
    if A.dim > 2:
        raise GcdUnsupported(f"componentwise gcd needs dim <= 2, got {A.dim}")
    rank = generic_rank(A)
    if rank != 1:
        raise NotRank1(f"generic rank is {rank}")
    gens = A.generators
    Y = next(g for g in gens if not g.is_zero_within_reliable())
    g = zero_jet(A.dim, A.trunc)
    for comp in Y.components:
        g = gcd_poly(g, comp)
    director = vector_field([divide_exact(comp, g) for comp in Y.components])
    lead = min((k for k in range(A.dim) if not director[k].is_zero_within_reliable()),
               key=lambda k: director[k].order())

    coefficients = []
    for gi in gens:
        f = divide_exact(gi[lead], director[lead])
        for comp, d in zip(gi.components, director.components):
            if not agree(mul(f, d), comp):
                raise NotRank1("generators are not proportional to a common director")
        coefficients.append(f)

    order = min(f.reliable for f in coefficients)
    for (a, fa), (b, fb) in combinations(enumerate(coefficients), 2):
        h = sub(mul(fa, apply(director, fb)), mul(fb, apply(director, fa)))
        top = min(order, h.reliable)
        monos = monomials_up_to(A.dim, top)
        rows = [[f.coefficient(m) for m in monos] for f in coefficients]
        coeffs, remainder = linalg.reduce_against(rows, [h.coefficient(m) for m in monos])
        if coeffs is None:
            residual = _jet(A.dim, A.trunc, {m: c for m, c in zip(monos, remainder) if c}, top)
            raise StarConditionFails((a + 1, b + 1), residual)

    saturable = any(f.constant_term() != 0 for f in coefficients)
    log(f"Rank-1 saturation: director {director.pretty()}, saturable={saturable}")
    return Rank1Saturation(director, tuple(coefficients), saturable)


def derivation_matrix(X: VectorFieldJet, E: Sequence[Jet]) -> linalg.Matrix:
    """
    Matrix of the derivation X restricted to span(E)

    Row i holds the coefficients of X(f_i) in the basis E.

    Raises:
        NotInvariant: some X(f_i) leaves the span (carries the residual jet)
    """
    images = [apply(X, f) for f in E]
    n, trunc = X.dim, X.trunc
    order = min([f.reliable for f in E] + [img.reliable for img in images])
    monos = monomials_up_to(n, order)
    rows = [[f.coefficient(m) for m in monos] for f in E]
    matrix = []
    for i, img in enumerate(images):
        coeffs, remainder = linalg.reduce_against(rows, [img.coefficient(m) for m in monos])
        if coeffs is None:
            raise NotInvariant(i, _jet(n, trunc, {m: c for m, c in zip(monos, remainder) if c}, order))
        matrix.append(coeffs)
    return matrix


def solve_linear_ode_jet(L: linalg.Matrix, upto: int) -> List[List[Jet]]:
    """
    Fundamental solutions of g' = L g as one-variable jets

    Returns:
        Columns of exp(L x) truncated at `upto`; column k is the solution with
        g(0) = e_k, given as a list of dim-1 jets
    """
    if upto < 0:
        raise BadParameter(f"negative truncation {upto}")
    L = linalg.as_matrix(L)
    size = len(L)
    coeff = linalg.identity(size)
    series: List[linalg.Matrix] = [coeff]
    for t in range(upto):
        coeff = linalg.mat_scale(linalg.mat_mul(L, coeff), Fraction(1, t + 1))
        series.append(coeff)
    return [[make_jet(1, upto, [((t,), series[t][i][k]) for t in range(upto + 1)]) for i in range(size)]
            for k in range(size)]


def is_nilpotent(A: AlgebraPresentation) -> bool:
    """
    Nilpotency via the lower central series L, [L, L], [L, [L, L]], ...

    Cross-checked against the ad matrices of the generators, and against the
    fact that an algebra of fields vanishing to order 2 is nilpotent.
    """
    A = _closed(A)
    ads = ad_matrices(A)
    current = linalg.identity(A.size)
    while current:
        images = [linalg.mat_vec(ad, v) for ad in ads for v in current]
        images = [v for v in images if any(v)]
        if not images:
            current = []
            break
        echelon, _, _ = linalg.rref_basis(images)
        if len(echelon) == len(current):
            break
        current = echelon
    nilpotent = not current

    if nilpotent and not all(linalg.is_nilpotent(ad) for ad in ads):
        raise ConsistencyError("lower central series terminates but some ad(g_i) is not nilpotent")
    if not nilpotent and all(vanishing_order(g) >= 2 for g in A.generators):
        raise ConsistencyError("fields vanishing to order 2 generate a non-nilpotent algebra")
    return nilpotent


def first_integral_jet(X: VectorFieldJet, upto: int) -> Optional[Jet]:
    """
    Nonconstant f with X(f) = 0 and f(0) = 0 up to degree `upto`

    Solves the graded linear system on the coefficients of f; the answer has
    minimal vanishing order and graded-lex-minimal leading monomial with
    coefficient 1. Returns None when only f = 0 solves it.
    """
    linear_part(X)
    n, trunc = X.dim, X.trunc
    top = min(upto, trunc, X.reliable)
    if top < 1:
        return None
    unknowns = monomials_up_to(n, top, start=1)
    columns = []
    for u in unknowns:
        image = apply(X, monomial(n, trunc, u))
        columns.append([image.coefficient(m) for m in unknowns])
    basis = linalg.nullspace(linalg.transpose(columns))
    if not basis:
        log(f"No first integral up to degree {top}")
        return None
    echelon, _, _ = linalg.rref_basis(basis)
    f = _jet(n, trunc, {u: c for u, c in zip(unknowns, echelon[0]) if c}, top)
    log(f"First integral up to degree {top}: {f.pretty()}")
    return f


def coefficient_functions(pair: Sequence[VectorFieldJet], Y: VectorFieldJet) -> Tuple[Jet, Jet]:
    """
    Functions (f1, f2) with Y = f1 g1 + f2 g2 for a planar pair of generic rank 2

    Cramer's rule over the jet ring; raises NotDivisible when Y is not in the
    module spanned by the pair.
    """
    g1, g2 = pair
    if g1.dim != 2:
        raise UnsupportedDimension(f"planar pairs only, got dim {g1.dim}")
    det = sub(mul(g1[0], g2[1]), mul(g1[1], g2[0]))
    f1 = divide_exact(sub(mul(Y[0], g2[1]), mul(Y[1], g2[0])), det)
    f2 = divide_exact(sub(mul(g1[0], Y[1]), mul(g1[1], Y[0])), det)
    return f1, f2


def radial_algebra(dim: int, d: int, trunc: int) -> AlgebraPresentation:
    """
    The commutative algebra of fields h R_n, h homogeneous of degree d

    [h R, k R] = (d - d) h k R = 0; generic rank 1, saturable only for d = 0.
    """
    if d < 0:
        raise BadParameter(f"negative degree {d}")
    if d + 1 > trunc:
        raise DegreeOverflow(f"degree {d + 1} fields need trunc >= {d + 1}")
    R = radial_field(dim, trunc)
    gens = [R.times(monomial(dim, trunc, m)) for m in monomials_of_degree(dim, d)]
    return closure_check(gens)


def radial_extended_algebra(dim: int, d: int, trunc: int) -> AlgebraPresentation:
    """radial_algebra(dim, d) with R_n adjoined; [R, h R] = d h R"""
    if d < 1:
        raise BadParameter(f"degree must be >= 1 to extend, got {d}")
    base = radial_algebra(dim, d, trunc)
    return closure_check([radial_field(dim, trunc)] + list(base.generators))


# --- family bases ---

def _series_terms(params: Dict[str, object]) -> List[Tuple[int, Fraction]]:
    return [(int(k), as_rational(c)) for k, c in params.get('a_hat', ())]


def _power_coefficient(p: int, lam: Fraction, e: int) -> Fraction:
    """Coefficient of x^e in x^(p+1) / (1 - lam x^p)"""
    if e < p + 1 or (e - p - 1) % p:
        return Fraction(0)
    return lam ** ((e - p - 1) // p)


def _planar(trunc: int, comp1, comp2) -> VectorFieldJet:
    keep = lambda terms: [(m, c) for m, c in terms if sum(m) <= trunc]
    return vector_field([make_jet(2, trunc, keep(comp1)), make_jet(2, trunc, keep(comp2))])


def family_basis(tag: ClassificationTag, dim: int, trunc: int) -> List[VectorFieldJet]:
    """Canonical generators of the tagged family at the given truncation"""
    family, params = tag.family, tag.parameters
    expected = 1 if family.value.startswith('dim1') else 2
    if dim != expected:
        raise DimensionMismatch(f"family {family.value} lives in dimension {expected}, not {dim}")

    if expected == 1:
        one = lambda terms: vector_field([make_jet(1, trunc, [((k,), c) for k, c in terms if k <= trunc])])
        if family is Family.DIM1_TRANSLATION:
            return [one([(0, 1)])]
        if family is Family.DIM1_POWER:
            p, lam = int(params['p']), as_rational(params.get('lambda', 0))
            if p == 0:
                return [one([(1, 1)])]
            return [one([(e, _power_coefficient(p, lam, e)) for e in range(p + 1, trunc + 1)])]
        if family is Family.DIM1_AFFINE_TRANSLATION:
            return [one([(0, 1)]), one([(1, 1)])]
        if family is Family.DIM1_AFFINE_POWER:
            return [one([(1, 1)]), one([(int(params['p']), 1)])]
        return [one([(0, 1)]), one([(1, 1)]), one([(2, 1)])]

    if family is Family.ABELIAN_1:
        return [_planar(trunc, [((1, 0), 1)], []), _planar(trunc, [], [((0, 1), 1)])]
    if family is Family.ABELIAN_2:
        n = int(params['n'])
        return [_planar(trunc, [((1, 0), 1)], [((0, 1), n)]), _planar(trunc, [], [((n, 0), 1)])]
    if family is Family.ABELIAN_3:
        p, q = int(params['p']), int(params['q'])
        l1, l2 = as_rational(params['lambda1']), as_rational(params['lambda2'])
        series = _series_terms(params)
        return [_planar(trunc, [((1, 0), q)], [((0, 1), -p)]),
                _planar(trunc, [((1 + s * p, s * q), l1 * c) for s, c in series],
                        [((s * p, 1 + s * q), l2 * c) for s, c in series])]
    if family is Family.ABELIAN_4:
        return [radial_field(2, trunc), _planar(trunc, [], [((1, 0), 1)])]
    if family is Family.ABELIAN_5:
        return [radial_field(2, trunc), _planar(trunc, [((0, 1), 1)], [((1, 0), -1)])]
    if family is Family.ABELIAN_6:
        alpha, beta = as_rational(params['alpha']), as_rational(params['beta'])
        x1, x2 = variable(2, trunc, 1), variable(2, trunc, 2)
        rho = x1 * x1 + x2 * x2
        a = zero_jet(2, trunc)
        for s, c in _series_terms(params):
            if 2 * s <= trunc:
                a = a + power(rho, s) * c
        rot = _planar(trunc, [((0, 1), 1)], [((1, 0), -1)])
        return [rot, vector_field([a * (x1 * alpha + x2 * beta), a * (x2 * alpha - x1 * beta)])]
    if family is Family.ABELIAN_7:
        return [_planar(trunc, [((1, 0), 1)], []),
                _planar(trunc, [], [((0, k), c) for k, c in _series_terms(params)])]
    raise Unclassifiable(f"unknown family {family}")


def _in_span(fields: Sequence[VectorFieldJet], basis: Sequence[VectorFieldJet]) -> bool:
    n = basis[0].dim
    order = min(f.reliable for f in list(fields) + list(basis))
    coords = _field_coordinates(n, order)
    rows = [_field_vector(b, coords) for b in basis]
    if linalg.rank([_field_vector(f, coords) for f in fields]) < len(basis):
        return False
    return all(linalg.reduce_against(rows, _field_vector(f, coords))[0] is not None for f in fields)


def _push_all(phi: DiffeoJet, gens: Sequence[VectorFieldJet]) -> List[VectorFieldJet]:
    phi_inv = inverse(phi)
    return [pushforward(phi, g, f_inverse=phi_inv) for g in gens]


def verify_certificate(tag: ClassificationTag, A: AlgebraPresentation) -> bool:
    """Pushed generators span exactly the tagged family's span up to reliable order"""
    pushed = _push_all(tag.certificate, A.generators)
    return _in_span(pushed, family_basis(tag, A.dim, A.trunc))


def _certified(tag: ClassificationTag, A: AlgebraPresentation) -> ClassificationTag:
    if not verify_certificate(tag, A):
        raise ConsistencyError(f"certificate does not map the input into family {tag.family.value}")
    log(f"✓ classified as {tag.family.value} {_format_params(tag.parameters)}")
    return tag


def _format_params(params: Dict[str, object]) -> str:
    return ' '.join(f"{k}={v}" for k, v in params.items() if k != 'a_hat')


def _probe_step(current: VectorFieldJet, conj: DiffeoJet, make_step: Callable[[Fraction], DiffeoJet],
                measure: Callable[[VectorFieldJet], Fraction], target: Fraction
                ) -> Tuple[VectorFieldJet, DiffeoJet]:
    """
    One coefficient-fixing change of coordinates

    The measured coefficient is affine in the step parameter c; probing with
    c = 1 gives the slope.
    """
    have = measure(current)
    slope = measure(pushforward(make_step(Fraction(1)), current)) - have
    if slope == 0:
        raise Unclassifiable("coordinate change does not reach the coefficient")
    step = make_step((target - have) / slope)
    return pushforward(step, current), compose(step, conj)


def _linearizer(Z: VectorFieldJet) -> DiffeoJet:
    if Z.trunc < 2:
        return DiffeoJet.identity(Z.dim, Z.trunc)
    return linearize_nonresonant(Z, Z.trunc).conjugator


# --- one-dimensional classification ---

def _classify_single_dim1(X: VectorFieldJet) -> ClassificationTag:
    trunc = X.trunc
    comp = X[0]
    if comp.constant_term() != 0:
        # phi' X = 1
        phi = integrate(invert_unit(comp), 1)
        return ClassificationTag(Family.DIM1_TRANSLATION, {}, DiffeoJet((phi,)))

    try:
        k = vanishing_order(X)
    except ZeroWithinReliable:
        raise Unclassifiable("generator vanishes up to its reliable order")
    Z = X.scale(1 / comp.coefficient((k,)))
    p = k - 1
    if p == 0:
        return ClassificationTag(Family.DIM1_POWER, {'p': 0, 'lambda': Fraction(0)}, _linearizer(Z))

    top = min(trunc, Z.reliable)
    if top < 2 * p + 1:
        raise Unclassifiable(f"reliable order {top} is too small to read the invariant at degree {2 * p + 1}")
    x = variable(1, trunc, 1)
    current, conj = Z, DiffeoJet.identity(1, trunc)
    lam: Optional[Fraction] = None
    for e in range(p + 2, top + 1):
        step_degree = e - p
        measure = lambda F, e=e: F[0].coefficient((e,))
        if step_degree == p + 1:
            lam = measure(current)
            continue
        target = Fraction(0) if lam is None else _power_coefficient(p, lam, e)
        if measure(current) == target:
            continue
        make = lambda c, k=step_degree: DiffeoJet((x + monomial(1, trunc, (k,), c),))
        current, conj = _probe_step(current, conj, make, measure, target)
    log(f"  vanishing order {k}, invariant lambda = {lam}")
    return ClassificationTag(Family.DIM1_POWER, {'p': p, 'lambda': lam}, conj)


def _classify_span_dim1(gens: Sequence[VectorFieldJet]) -> ClassificationTag:
    size = len(gens)
    constants = [g[0].constant_term() for g in gens]
    linear = [g[0].coefficient((1,)) for g in gens]
    H = None
    for v in linalg.nullspace([constants]):
        lin = sum((a * b for a, b in zip(v, linear)), Fraction(0))
        if lin:
            H = _combination(gens, v).scale(1 / lin)
            break
    if H is None:
        raise Unclassifiable("no element of the isotropy algebra has a nonzero linear part")

    conj = _linearizer(H)
    pushed = _push_all(conj, gens)
    top = min(g.reliable for g in pushed)
    support = sorted({m[0] for g in pushed for m in g[0].coeffs if m[0] <= top})
    log(f"  monomial support after linearizing x d/dx: {support}")
    if len(support) != size:
        raise Unclassifiable(f"support {support} does not match dimension {size}")
    if support == [0, 1]:
        return ClassificationTag(Family.DIM1_AFFINE_TRANSLATION, {}, conj)
    if size == 2 and support[0] == 1:
        return ClassificationTag(Family.DIM1_AFFINE_POWER, {'p': support[1]}, conj)
    if support == [0, 1, 2]:
        return ClassificationTag(Family.DIM1_PROJECTIVE, {}, conj)
    raise Unclassifiable(f"support {support} matches no one-dimensional family")


def classify_dim1(A: AlgebraPresentation) -> ClassificationTag:
    """
    Classify an algebra of fields on the line (dimension <= 3)

    One generator: d/dx or x^(p+1)/(1 - lambda x^p) d/dx. Two or three: the
    isotropy algebra is linearized to x d/dx, after which the algebra is
    spanned by monomial fields whose exponents name the family.
    """
    if A.dim != 1:
        raise UnsupportedDimension(f"line algebras only, got dim {A.dim}")
    if A.size > 3:
        raise Unclassifiable(f"algebras of fields on the line have dimension <= 3, got {A.size}")
    A = _closed(A)
    log(f"Classifying a {A.size}-dimensional algebra on the line")
    if A.size == 1:
        tag = _classify_single_dim1(A.generators[0])
    else:
        tag = _classify_span_dim1(A.generators)
    return _certified(tag, A)


# --- abelian rank-2 classification ---

def _flat(M: linalg.Matrix) -> linalg.Vector:
    return [c for row in M for c in row]


def _rational_sqrt(c: Fraction) -> Optional[Fraction]:
    if c < 0:
        return None
    num, den = math.isqrt(c.numerator), math.isqrt(c.denominator)
    if num * num != c.numerator or den * den != c.denominator:
        return None
    return Fraction(num, den)


def _eigenvector(M: linalg.Matrix, root: Fraction) -> linalg.Vector:
    shifted = linalg.mat_sub(M, linalg.mat_scale(linalg.identity(len(M)), root))
    return linalg.nullspace(shifted)[0]


def _rotation_basis(M: linalg.Matrix, beta: Fraction) -> linalg.Matrix:
    """P with P^-1 M P = beta [[0, 1], [-1, 0]] for traceless M with det M = beta^2"""
    p1 = [Fraction(1), Fraction(0)]
    p2 = [-c / beta for c in linalg.mat_vec(M, p1)]
    return linalg.transpose([p1, p2])


def _is_linear(X: VectorFieldJet) -> bool:
    return all(d == 1 for d in X.truncated(X.reliable).degrees())


def _classify_full_pencil(g1: VectorFieldJet, g2: VectorFieldJet, A1: linalg.Matrix,
                          A2: linalg.Matrix) -> ClassificationTag:
    """Types 1, 4, 5: the one-jets span a plane containing the identity"""
    trunc = g1.trunc
    sol = linalg.solve(linalg.transpose([_flat(A1), _flat(A2)]), _flat(linalg.identity(2)))
    if sol is None:
        raise Unclassifiable("one-jet pencil does not contain the identity")
    c, d = sol
    Z = g1.scale(c) + g2.scale(d)
    W = g1 if d != 0 else g2
    conj = _linearizer(Z)
    W1 = pushforward(conj, W)
    if not _is_linear(W1):
        raise Unclassifiable("second generator is not linear once the radial one is")
    M = linear_part(W1)
    half = linalg.trace(M) / 2
    M0 = linalg.mat_sub(M, linalg.mat_scale(linalg.identity(2), half))
    det0 = linalg.det(M0)
    if det0 < 0:
        e = _rational_sqrt(-det0)
        if e is None:
            raise Unclassifiable(f"eigenvalues +-sqrt({-det0}) are irrational")
        P = linalg.transpose([_eigenvector(M0, e), _eigenvector(M0, -e)])
        family = Family.ABELIAN_1
    elif det0 == 0:
        e1 = [Fraction(1), Fraction(0)]
        v = e1 if any(linalg.mat_vec(M0, e1)) else [Fraction(0), Fraction(1)]
        P = linalg.transpose([v, linalg.mat_vec(M0, v)])
        family = Family.ABELIAN_4
    else:
        beta = _rational_sqrt(det0)
        if beta is None:
            raise Unclassifiable(f"rotation speed sqrt({det0}) is irrational")
        P = _rotation_basis(M0, beta)
        family = Family.ABELIAN_5
    T = DiffeoJet.linear(linalg.inverse(P), trunc)
    return ClassificationTag(family, {}, compose(T, conj))


def _linearizing_multiple(Z: VectorFieldJet, W: VectorFieldJet) -> Fraction:
    """t with Z - t W linear up to the common reliable order"""
    top = min(Z.reliable, W.reliable)
    nonlinear = [(j, m) for m in monomials_up_to(Z.dim, top, start=2) for j in range(Z.dim)
                 if Z[j].coefficient(m)]
    t = Fraction(0)
    if nonlinear:
        j, m = nonlinear[0]
        w = W[j].coefficient(m)
        if not w:
            raise Unclassifiable("nonlinear part is not carried by the second generator")
        t = Z[j].coefficient(m) / w
    if not _is_linear((Z - W.scale(t)).with_reliable(top)):
        raise Unclassifiable("no combination of the pair has a linear distinguished generator")
    return t


def _check_support(W: VectorFieldJet, allowed: Callable[[int, Multidegree], bool]):
    top = W.reliable
    for j, comp in enumerate(W.components):
        for m in comp.coeffs:
            if sum(m) <= top and not allowed(j, m):
                raise Unclassifiable(f"term {m} in component {j + 1} is not resonant")


def _align_power_resonance(W: VectorFieldJet, n: int) -> Dict[str, object]:
    _check_support(W, lambda j, m: j == 1 and m == (n, 0))
    if not W[1].coefficient((n, 0)):
        raise Unclassifiable(f"resonant monomial x1^{n} is absent")
    return {'n': n}


def _align_saddle(W: VectorFieldJet, conj: DiffeoJet, p: int, q: int
                  ) -> Tuple[Dict[str, object], DiffeoJet]:
    """Make W = a_hat(u) (l1 x1 d1 + l2 x2 d2), u = x1^p x2^q, by steps x1 -> x1 (1 + c u^m)"""
    trunc = W.trunc
    top = W.reliable
    # x1 u^s d1 and x2 u^s d2
    _check_support(W, lambda j, m: (m[0] - 1 + j) * q == (m[1] - j) * p and m[j] >= 1)
    S = (top - 1) // (p + q)
    a_of = lambda F, s: F[0].coefficient((1 + s * p, s * q))
    b_of = lambda F, s: F[1].coefficient((s * p, 1 + s * q))
    s0 = next((s for s in range(1, S + 1) if a_of(W, s) or b_of(W, s)), None)
    if s0 is None:
        raise Unclassifiable("second generator vanishes up to its reliable order")
    l1, l2 = a_of(W, s0), b_of(W, s0)
    if p * l1 + q * l2 == 0:
        raise Unclassifiable("second generator is a multiple of the first at leading order")
    x1, x2 = variable(2, trunc, 1), variable(2, trunc, 2)
    for s in range(s0 + 1, S + 1):
        u_m = monomial(2, trunc, ((s - s0) * p, (s - s0) * q))
        if l2:
            measure = lambda F, s=s: a_of(F, s) - l1 / l2 * b_of(F, s)
            make = lambda c, u_m=u_m: DiffeoJet((x1 + x1 * u_m * c, x2))
        else:
            measure = lambda F, s=s: b_of(F, s)
            make = lambda c, u_m=u_m: DiffeoJet((x1, x2 + x2 * u_m * c))
        if measure(W):
            W, conj = _probe_step(W, conj, make, measure, Fraction(0))
    lead, pick = (l2, b_of) if l2 else (l1, a_of)
    a_hat = tuple((s, pick(W, s) / lead) for s in range(s0, S + 1) if pick(W, s))
    return {'p': p, 'q': q, 'lambda1': l1, 'lambda2': l2, 'a_hat': a_hat}, conj


def _focus_defect(parts: Tuple[Jet, Jet], s: int, ratio: Fraction) -> Fraction:
    """b_s - ratio * a_s read off rho^(s+1) in (x.W, Jx.W)"""
    key = (2 * (s + 1), 0)
    return parts[1].coefficient(key) - ratio * parts[0].coefficient(key)


def _align_focus(W: VectorFieldJet, conj: DiffeoJet) -> Tuple[Dict[str, object], DiffeoJet]:
    """Make W = a_hat(rho) (alpha R + beta rot), rho = x1^2 + x2^2, by steps x -> x + c rho^m J x"""
    trunc = W.trunc
    top = W.reliable
    x1, x2 = variable(2, trunc, 1), variable(2, trunc, 2)
    rho = x1 * x1 + x2 * x2
    S = top // 2 - 1

    def parts(F: VectorFieldJet) -> Tuple[Jet, Jet]:
        return x1 * F[0] + x2 * F[1], x2 * F[0] - x1 * F[1]

    def series(J: Jet) -> List[Fraction]:
        coeffs = [J.coefficient((2 * (s + 1), 0)) for s in range(S + 1)]
        rebuilt = zero_jet(2, trunc)
        for s, c in enumerate(coeffs):
            if c:
                rebuilt = rebuilt + power(rho, s + 1) * c
        if not agree(J, rebuilt, top):
            raise Unclassifiable("second generator does not commute with the rotation")
        return coeffs

    a_rho, b_rho = parts(W)
    a, b = series(a_rho), series(b_rho)
    s0 = next((s for s in range(1, S + 1) if a[s] or b[s]), None)
    if s0 is None:
        raise Unclassifiable("second generator vanishes up to its reliable order")
    alpha, beta = a[s0], b[s0]
    if alpha == 0 and any(a):
        raise Unclassifiable("radial and rotational parts start at different orders")
    if alpha:
        for s in range(s0 + 1, S + 1):
            rho_m = power(rho, s - s0)
            measure = lambda F, s=s: _focus_defect(parts(F), s, beta / alpha)
            make = lambda c, r=rho_m: DiffeoJet((x1 + r * x2 * c, x2 - r * x1 * c))
            if measure(W):
                W, conj = _probe_step(W, conj, make, measure, Fraction(0))
        a_rho, b_rho = parts(W)
        a = series(a_rho)
        a_hat = tuple((s, a[s] / alpha) for s in range(s0, S + 1) if a[s])
    else:
        a_hat = tuple((s, b[s] / beta) for s in range(s0, S + 1) if b[s])
    return {'alpha': alpha, 'beta': beta, 'a_hat': a_hat}, conj


def _align_saddle_node(W: VectorFieldJet, conj: DiffeoJet) -> Tuple[Dict[str, object], DiffeoJet]:
    """Make W = a_hat(x2) d2 by steps x1 -> x1 (1 + c x2^m)"""
    trunc = W.trunc
    top = W.reliable
    _check_support(W, lambda j, m: m[0] == 1 - j)
    kb = next((k for k in range(2, top + 1) if W[1].coefficient((0, k))), None)
    if kb is None:
        raise Unclassifiable("second generator has no transverse part")
    if any(W[0].coefficient((1, k)) for k in range(1, kb)):
        raise Unclassifiable("x1 d/dx1 part starts below the transverse part")
    x1, x2 = variable(2, trunc, 1), variable(2, trunc, 2)
    for e in range(kb, top):
        measure = lambda F, e=e: F[0].coefficient((1, e))
        make = lambda c, m=e - kb + 1: DiffeoJet((x1 + x1 * monomial(2, trunc, (0, m), c), x2))
        if measure(W):
            W, conj = _probe_step(W, conj, make, measure, Fraction(0))
    a_hat = tuple((k, W[1].coefficient((0, k))) for k in range(kb, top + 1) if W[1].coefficient((0, k)))
    return {'a_hat': a_hat}, conj


def _classify_line_pencil(g1: VectorFieldJet, g2: VectorFieldJet, A1: linalg.Matrix,
                          A2: linalg.Matrix) -> ClassificationTag:
    """Types 2, 3, 6, 7: one combination of the pair has zero one-jet"""
    trunc = g1.trunc
    c, d = linalg.nullspace(linalg.transpose([_flat(A1), _flat(A2)]))[0]
    W = g1.scale(c) + g2.scale(d)
    Z0, A = (g1, A1) if not linalg.is_nilpotent(A1) else (g2, A2)

    try:
        _, N = jordan_linear(A)
    except IrrationalSpectrum:
        raise Unclassifiable("one-jet spectrum is irrational")
    if not linalg.is_zero(N):
        raise Unclassifiable("one-jet is not semisimple")

    factors = linalg.charpoly_factors(A)
    params: Dict[str, object] = {}
    if all(f.degree() == 1 for f, _ in factors):
        roots = []
        for f, mult in factors:
            lead, const = f.all_coeffs()
            roots.extend([linalg.as_rational(-const / lead)] * mult)
        r1, r2 = roots
        if r1 == r2:
            raise Unclassifiable("radial one-jet leaves no room for a commuting nonlinear field")
        if r1 == 0 or r2 == 0:
            nz = r1 or r2
            P = linalg.transpose([_eigenvector(A, nz), _eigenvector(A, Fraction(0))])
            s, D, family = 1 / nz, [[1, 0], [0, 0]], Family.ABELIAN_7
        elif (r1 > 0) == (r2 > 0):
            small, big = sorted((r1, r2), key=abs)
            ratio = big / small
            if ratio.denominator != 1 or ratio < 2:
                raise Unclassifiable(f"eigenvalue ratio {ratio} is nonresonant")
            n = ratio.numerator
            P = linalg.transpose([_eigenvector(A, small), _eigenvector(A, big)])
            s, D, family = 1 / small, [[1, 0], [0, n]], Family.ABELIAN_2
            params = {'n': n}
        else:
            pos, neg = max(r1, r2), min(r1, r2)
            ratio = pos / -neg
            q, p = ratio.numerator, ratio.denominator
            P = linalg.transpose([_eigenvector(A, pos), _eigenvector(A, neg)])
            s, D, family = q / pos, [[q, 0], [0, -p]], Family.ABELIAN_3
    else:
        if linalg.trace(A) != 0:
            raise Unclassifiable("complex one-jet with nonzero real part is nonresonant")
        beta = _rational_sqrt(linalg.det(A))
        if beta is None:
            raise Unclassifiable("rotation speed is irrational")
        P = _rotation_basis(A, beta)
        s, D, family = 1 / beta, [[0, 1], [-1, 0]], Family.ABELIAN_6
    D = linalg.as_matrix(D)

    T = DiffeoJet.linear(linalg.inverse(P), trunc)
    T_inv = DiffeoJet.linear(P, trunc)
    Z1 = pushforward(T, Z0, f_inverse=T_inv).scale(s)
    W1 = pushforward(T, W, f_inverse=T_inv)
    if linear_part(Z1) != D:
        raise ConsistencyError("linear change of coordinates missed the target one-jet")
    if trunc < 2:
        raise Unclassifiable("truncation too small to see the nonlinear generator")
    normal = poincare_dulac_normalize(Z1, trunc)
    conj = compose(normal.conjugator, T)
    W2 = pushforward(normal.conjugator, W1)
    _linearizing_multiple(normal.normal, W2)
    log(f"  distinguished one-jet {D}, aligning the second generator")

    if family is Family.ABELIAN_2:
        params = _align_power_resonance(W2, params['n'])
    elif family is Family.ABELIAN_3:
        params, conj = _align_saddle(W2, conj, p, q)
    elif family is Family.ABELIAN_6:
        params, conj = _align_focus(W2, conj)
    else:
        params, conj = _align_saddle_node(W2, conj)
    return ClassificationTag(family, params, conj)


def classify_abelian_rank2(A: AlgebraPresentation) -> ClassificationTag:
    """
    Classify a planar abelian algebra of generic rank 2

    The one-jets span L1. dim L1 = 2 gives types 1, 4, 5; dim L1 = 1 gives
    types 2, 3, 6, 7 according to the spectrum of the non-nilpotent one-jet.
    Both one-jets nilpotent is refused.

    Raises:
        NotAbelian, NotRank2, NilpotentPencil, Unclassifiable
    """
    if A.dim != 2:
        raise UnsupportedDimension(f"planar algebras only, got dim {A.dim}")
    A = _closed(A)
    if not is_abelian(A):
        raise NotAbelian("some bracket of generators is nonzero")
    rank = generic_rank(A)
    if rank != 2:
        raise NotRank2(f"generic rank is {rank}")
    if A.size != 2:
        raise Unclassifiable(f"abelian algebras of rank 2 have dimension 2, got {A.size}")
    g1, g2 = A.generators
    A1, A2 = linear_part(g1), linear_part(g2)
    if linalg.is_nilpotent(A1) and linalg.is_nilpotent(A2):
        raise NilpotentPencil("both one-jets are nilpotent")
    log("Classifying a planar abelian algebra of rank 2")
    if linalg.rank([_flat(A1), _flat(A2)]) == 2:
        tag = _classify_full_pencil(g1, g2, A1, A2)
    else:
        tag = _classify_line_pencil(g1, g2, A1, A2)
    return _certified(tag, A)
