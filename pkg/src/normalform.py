"""
Normal forms - Jordan decomposition, homological equations, Poincare-Dulac
Kills nonresonant terms degree by degree with tangent-to-identity changes of
coordinates and records exactly which monomials were removed
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from src import linalg
from src.errors import (
    ConsistencyError, DegreeBoundTooSmall, IrrationalSpectrum, NotDiagonal, NotHomogeneous,
    ResonantSpectrum, Unclassified,
)
from src.fields import (
    DiffeoJet, VectorFieldJet, compose, inverse, linear_field, linear_part, pushforward,
    zero_field,
)
from src.jets import Multidegree, _jet, monomials_of_degree, variable
from src.resonance import is_nonresonant, monomial_weight, resonant_monomials
from src.runlog import log

RemovedTerm = Tuple[int, Multidegree, int]


@dataclass(frozen=True)
class JordanPair:
    """X = S + N with S semisimple, N nilpotent and [S, N] = 0"""
    S: VectorFieldJet
    N: VectorFieldJet


@dataclass(frozen=True)
class NormalFormResult:
    """
    conjugator_* input = normal up to the reliable order

    removed holds (degree, multidegree, component) for every killed monomial,
    lowest degree first, graded-lex within a degree, component last.
    """
    conjugator: DiffeoJet
    normal: VectorFieldJet
    removed: Tuple[RemovedTerm, ...]


# --- linear algebra of the 1-jet ---

def jordan_linear(M: linalg.Matrix) -> Tuple[linalg.Matrix, linalg.Matrix]:
    """
    Additive Jordan decomposition M = S + N over Q

    S is built from projections on the generalized eigenspaces; a 2x2 matrix
    with a complex-conjugate pair is already semisimple.
    """
    n = len(M)
    factors = linalg.charpoly_factors(M)
    if all(f.degree() == 1 for f, _ in factors):
        columns: List[linalg.Vector] = []
        eigen: List[Fraction] = []
        for f, mult in factors:
            a, b = f.all_coeffs()
            root = linalg.as_rational(-b / a)
            shifted = linalg.mat_sub(M, linalg.mat_scale(linalg.identity(n), root))
            space = linalg.nullspace(linalg.mat_pow(shifted, mult))
            columns.extend(space)
            eigen.extend([root] * len(space))
        P = linalg.transpose(columns)
        D = [[eigen[i] if i == j else Fraction(0) for j in range(n)] for i in range(n)]
        S = linalg.mat_mul(linalg.mat_mul(P, D), linalg.inverse(P))
        return S, linalg.mat_sub(M, S)
    if n == 2 and len(factors) == 1 and factors[0][0].degree() == 2:
        a, b, c = factors[0][0].all_coeffs()
        if b * b - 4 * a * c < 0:
            return [row[:] for row in M], linalg.zeros(2)
    raise IrrationalSpectrum("characteristic polynomial does not split over Q")


def is_rotation_scaling(M: linalg.Matrix) -> bool:
    """[[alpha, beta], [-beta, alpha]] with beta != 0"""
    return (len(M) == 2 and M[0][0] == M[1][1] and M[0][1] == -M[1][0] and M[0][1] != 0)


def _diagonal_spectrum(S: VectorFieldJet) -> List[Fraction]:
    M = linear_part(S)
    if not linalg.is_diagonal(M):
        raise NotDiagonal("linear part is not diagonal")
    if any(sum(m) != 1 for c in S.components for m in c.coeffs):
        raise NotDiagonal("semisimple part has nonlinear terms")
    return [M[i][i] for i in range(len(M))]


def _homogeneous_degree(term: VectorFieldJet) -> Optional[int]:
    degrees = term.degrees()
    if not degrees:
        return None
    if len(degrees) > 1 or degrees[0] < 2:
        raise NotHomogeneous(f"term has degrees {degrees}; expected a single degree >= 2")
    return degrees[0]


def homological_solve(S: VectorFieldJet, term: VectorFieldJet) -> Tuple[VectorFieldJet, VectorFieldJet]:
    """
    Solve term = [S, Y] + residual for a diagonal linear S

    Args:
        S: sum lambda_i x_i d/dx_i
        term: homogeneous field of degree >= 2

    Returns:
        (Y, residual): residual keeps exactly the resonant monomials, Y vanishes on
        them and carries coefficient / (<m, lambda> - lambda_j) elsewhere
    """
    lam = _diagonal_spectrum(S)
    if _homogeneous_degree(term) is None:
        zero = zero_field(term.dim, term.trunc).with_reliable(term.reliable)
        return zero, zero
    n, trunc, rel = term.dim, term.trunc, term.reliable
    ys, residual = [], []
    for j, comp in enumerate(term.components):
        y, r = {}, {}
        for m, c in comp.coeffs.items():
            w = monomial_weight(lam, m, j + 1)
            if w:
                y[m] = c / w
            else:
                r[m] = c
        ys.append(_jet(n, trunc, y, rel))
        residual.append(_jet(n, trunc, r, rel))
    return VectorFieldJet(tuple(ys)), VectorFieldJet(tuple(residual))


# --- general semisimple solver on one graded piece ---

def _field_basis(n: int, d: int) -> List[Tuple[Multidegree, int]]:
    return [(m, j) for m in monomials_of_degree(n, d) for j in range(n)]


def _ad_matrix(A: linalg.Matrix, basis: List[Tuple[Multidegree, int]]) -> linalg.Matrix:
    """Matrix of Y -> [A x, Y] on homogeneous fields, columns indexed like basis"""
    n = len(A)
    index = {b: k for k, b in enumerate(basis)}
    size = len(basis)
    cols = []
    for m, j in basis:
        image: Dict[Tuple[Multidegree, int], Fraction] = {}
        # (A x)(x^m) e_j
        for i in range(n):
            if not m[i]:
                continue
            for l in range(n):
                if A[i][l]:
                    mm = list(m)
                    mm[i] -= 1
                    mm[l] += 1
                    key = (tuple(mm), j)
                    image[key] = image.get(key, 0) + A[i][l] * m[i]
        # - x^m A e_j
        for k in range(n):
            if A[k][j]:
                key = (m, k)
                image[key] = image.get(key, 0) - A[k][j]
        cols.append([image.get(b, Fraction(0)) for b in basis])
    return [[cols[c][r] for c in range(size)] for r in range(size)]


def _vector_of(term: VectorFieldJet, basis) -> linalg.Vector:
    return [term.components[j].coefficient(m) for m, j in basis]


def _field_of(vec: linalg.Vector, basis, n: int, trunc: int, reliable: int) -> VectorFieldJet:
    comps: List[Dict] = [{} for _ in range(n)]
    for c, (m, j) in zip(vec, basis):
        if c:
            comps[j][m] = c
    return VectorFieldJet(tuple(_jet(n, trunc, comp, reliable) for comp in comps))


def homological_solve_semisimple(S_mat: linalg.Matrix, term: VectorFieldJet,
                                 A_mat: Optional[linalg.Matrix] = None
                                 ) -> Tuple[VectorFieldJet, VectorFieldJet]:
    """
    Solve term = [A x, Y] + residual with residual in ker ad_S and Y in im ad_S

    S_mat must be semisimple (diagonalizable over Q or a planar complex pair);
    A_mat defaults to S_mat and may carry a nilpotent part commuting with S_mat.
    """
    degree = _homogeneous_degree(term)
    n, trunc, rel = term.dim, term.trunc, term.reliable
    if degree is None:
        zero = zero_field(n, trunc).with_reliable(rel)
        return zero, zero
    A_mat = A_mat or S_mat
    basis = _field_basis(n, degree)
    ad_s = _ad_matrix(S_mat, basis)
    image = linalg.columnspace(ad_s)
    kernel = linalg.nullspace(ad_s)
    t = _vector_of(term, basis)
    if not image:
        return zero_field(n, trunc).with_reliable(rel), term
    split = linalg.solve(linalg.transpose(image + kernel), t)
    if split is None:
        raise ConsistencyError("kernel and image of ad_S do not span the graded piece")
    a = split[:len(image)]
    t_im = [sum((a[k] * image[k][r] for k in range(len(image))), Fraction(0)) for r in range(len(basis))]
    t_ker = [x - y for x, y in zip(t, t_im)]
    ad_a = _ad_matrix(A_mat, basis)
    restricted = linalg.mat_mul(ad_a, linalg.transpose(image))
    coeffs = linalg.solve(restricted, t_im)
    if coeffs is None:
        raise ConsistencyError("ad_A is not invertible on the image of ad_S")
    y = [sum((coeffs[k] * image[k][r] for k in range(len(image))), Fraction(0)) for r in range(len(basis))]
    return _field_of(y, basis, n, trunc, rel), _field_of(t_ker, basis, n, trunc, rel)


# --- normalization driver ---

def _normalize(X: VectorFieldJet, upto: int, S_mat: linalg.Matrix) -> NormalFormResult:
    """Kill the im(ad_S) part of each degree 2..upto, lowest degree first"""
    n, trunc = X.dim, X.trunc
    A = linear_part(X)
    N = linalg.mat_sub(A, S_mat)
    fast = linalg.is_diagonal(S_mat) and linalg.is_zero(N)
    S_field = linear_field(S_mat, trunc)
    top = min(upto, trunc, X.reliable)
    conjugator = DiffeoJet.identity(n, trunc)
    current = X
    removed: List[RemovedTerm] = []
    for d in range(2, top + 1):
        term = current.homogeneous_part(d)
        if term.is_zero():
            continue
        if fast:
            Y, residual = homological_solve(S_field, term)
        else:
            Y, residual = homological_solve_semisimple(S_mat, term, A)
        if Y.is_zero():
            continue
        killed = term - residual
        for m in monomials_of_degree(n, d):
            for j in range(n):
                if killed.components[j].coefficient(m):
                    removed.append((d, m, j + 1))
        log(f"  degree {d}: removing {sum(len(c.coeffs) for c in killed.components)} term(s)")
        step = DiffeoJet(tuple(variable(n, trunc, i + 1) - Y.components[i] for i in range(n)))
        current = pushforward(step, current)
        conjugator = compose(step, conjugator)
    return NormalFormResult(conjugator, current, tuple(removed))


def poincare_dulac_normalize(X: VectorFieldJet, upto: int) -> NormalFormResult:
    """
    Poincare-Dulac normal form up to degree `upto`

    The linear part must be semisimple (diagonalizable over Q or a planar
    complex pair); all nonresonant monomials of degree 2..upto are removed.
    """
    if upto < 2:
        raise DegreeBoundTooSmall(f"upto = {upto} < 2")
    A = linear_part(X)
    S, N = jordan_linear(A)
    if not linalg.is_zero(N):
        raise Unclassified("linear part is not semisimple")
    log(f"Poincare-Dulac normalization up to degree {upto}")
    return _normalize(X, upto, S)


def linearize_nonresonant(X: VectorFieldJet, upto: int) -> NormalFormResult:
    """
    Formal linearization of a field with nonresonant linear part

    Accepts a diagonal linear part with nonresonant spectrum (including the
    radial field) or a planar rotation-scaling block with nonzero real part.
    """
    if upto < 2:
        raise DegreeBoundTooSmall(f"upto = {upto} < 2")
    A = linear_part(X)
    if linalg.is_diagonal(A):
        lam = [A[i][i] for i in range(len(A))]
        if len(lam) == 2:
            if not is_nonresonant(lam):
                raise ResonantSpectrum(f"lambda = ({lam[0]}, {lam[1]}) is resonant")
        elif any(resonant_monomials(lam, d) for d in range(2, upto + 1)):
            raise ResonantSpectrum(f"lambda = {[str(c) for c in lam]} is resonant below degree {upto + 1}")
    elif is_rotation_scaling(A):
        if A[0][0] == 0:
            raise ResonantSpectrum("purely imaginary spectrum is resonant")
    else:
        raise NotDiagonal("linear part must be diagonal or a rotation-scaling block")
    log(f"Linearizing up to degree {upto}")
    result = _normalize(X, upto, A)
    top = min(upto, X.trunc, X.reliable)
    if any(d >= 2 for d in result.normal.truncated(top).degrees()):
        raise ConsistencyError("nonlinear terms survived a nonresonant linearization")
    return result


def jordan_decompose(X: VectorFieldJet, upto: Optional[int] = None) -> JordanPair:
    """
    Formal Jordan decomposition X = S + N, exact up to degree `upto`

    X is normalized against the semisimple part of its 1-jet; the linear
    semisimple field is transported back by the inverse conjugator.
    """
    upto = X.trunc if upto is None else upto
    if upto < 2:
        raise DegreeBoundTooSmall(f"upto = {upto} < 2")
    S_mat, _ = jordan_linear(linear_part(X))
    result = _normalize(X, upto, S_mat)
    back = inverse(result.conjugator)
    S = pushforward(back, linear_field(S_mat, X.trunc), f_inverse=result.conjugator)
    top = min(upto, S.reliable, X.reliable)
    S = S.with_reliable(top)
    return JordanPair(S, (X - S).with_reliable(top))
