"""
Linalg - Exact linear algebra over Q
Thin layer over sympy matrices; vectors and matrices cross the boundary as
lists of Fractions so the rest of the package never handles sympy numbers
"""

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import sympy

from src.jets import as_rational

Vector = List[Fraction]
Matrix = List[List[Fraction]]


def to_sympy(rows: Sequence[Sequence[Fraction]]) -> sympy.Matrix:
    return sympy.Matrix([[sympy.Rational(c.numerator, c.denominator) for c in row] for row in rows])


def from_sympy(M: sympy.Matrix) -> Matrix:
    return [[as_rational(M[i, j]) for j in range(M.cols)] for i in range(M.rows)]


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[as_rational(c) for c in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def zeros(n: int, m: Optional[int] = None) -> Matrix:
    return [[Fraction(0)] * (n if m is None else m) for _ in range(n)]


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), Fraction(0)) for j in range(len(B[0]))]
            for i in range(len(A))]


def mat_add(A: Matrix, B: Matrix) -> Matrix:
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A: Matrix, B: Matrix) -> Matrix:
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(A: Matrix, c) -> Matrix:
    c = as_rational(c)
    return [[a * c for a in row] for row in A]


def mat_vec(A: Matrix, v: Vector) -> Vector:
    return [sum((a * x for a, x in zip(row, v)), Fraction(0)) for row in A]


def transpose(A: Matrix) -> Matrix:
    return [list(col) for col in zip(*A)]


def mat_pow(A: Matrix, k: int) -> Matrix:
    result = identity(len(A))
    for _ in range(k):
        result = mat_mul(result, A)
    return result


def det(A: Matrix) -> Fraction:
    if not A:
        return Fraction(1)
    if len(A) == 1:
        return A[0][0]
    if len(A) == 2:
        return A[0][0] * A[1][1] - A[0][1] * A[1][0]
    return as_rational(to_sympy(A).det())


def inverse(A: Matrix) -> Matrix:
    return from_sympy(to_sympy(A).inv())


def trace(A: Matrix) -> Fraction:
    return sum((A[i][i] for i in range(len(A))), Fraction(0))


def is_zero(A: Matrix) -> bool:
    return all(c == 0 for row in A for c in row)


def is_diagonal(A: Matrix) -> bool:
    return all(A[i][j] == 0 for i in range(len(A)) for j in range(len(A)) if i != j)


def is_nilpotent(A: Matrix) -> bool:
    """A^n = 0 for an n x n matrix"""
    return is_zero(mat_pow(A, len(A))) if A else True


def rank(rows: Sequence[Vector]) -> int:
    if not rows:
        return 0
    return to_sympy(rows).rank()


def nullspace(A: Matrix) -> List[Vector]:
    """Basis of {v : A v = 0}"""
    return [[as_rational(c) for c in v] for v in to_sympy(A).nullspace()]


def columnspace(A: Matrix) -> List[Vector]:
    return [[as_rational(c) for c in v] for v in to_sympy(A).columnspace()]


def solve(A: Matrix, b: Vector) -> Optional[Vector]:
    """
    One exact solution of A x = b, free parameters set to 0

    Returns:
        Solution vector, or None when the system is inconsistent
    """
    if not A:
        return None
    try:
        sol, params = to_sympy(A).gauss_jordan_solve(to_sympy([[c] for c in b]))
    except ValueError:
        return None
    if params.shape[0]:
        sol = sol.subs({p: 0 for p in params})
    return [as_rational(sol[i, 0]) for i in range(sol.rows)]


def rref_basis(rows: Sequence[Vector]) -> Tuple[Matrix, List[int], Matrix]:
    """
    Reduced row echelon form of a list of vectors

    Returns:
        (echelon rows, pivot columns, transform T) with echelon = T * rows
    """
    k = len(rows)
    width = len(rows[0])
    augmented = to_sympy(rows).row_join(sympy.eye(k))
    R, pivots = augmented.rref()
    pivots = [p for p in pivots if p < width]
    echelon = [[as_rational(R[i, j]) for j in range(width)] for i in range(len(pivots))]
    transform = [[as_rational(R[i, width + j]) for j in range(k)] for i in range(len(pivots))]
    return echelon, pivots, transform


def reduce_against(rows: Sequence[Vector], v: Vector) -> Tuple[Optional[Vector], Vector]:
    """
    Reduce v by the echelon form of `rows`

    Returns:
        (coefficients c with v = sum c_i rows_i, or None if v is outside the span;
         remainder vector, zero at every pivot column)
    """
    if not rows:
        return (None if any(v) else [], list(v))
    echelon, pivots, transform = rref_basis(rows)
    remainder = list(v)
    weights = []
    for row, p in zip(echelon, pivots):
        w = remainder[p]
        weights.append(w)
        if w:
            remainder = [r - w * e for r, e in zip(remainder, row)]
    if any(remainder):
        return None, remainder
    coeffs = [sum((weights[i] * transform[i][j] for i in range(len(weights))), Fraction(0))
              for j in range(len(rows))]
    return coeffs, remainder


def charpoly_factors(A: Matrix) -> List[Tuple[sympy.Poly, int]]:
    """Irreducible factors of the characteristic polynomial over Q with multiplicities"""
    lam = sympy.Symbol('lam')
    poly = to_sympy(A).charpoly(lam)
    _, factors = sympy.factor_list(poly.as_expr(), lam, domain=sympy.QQ)
    return [(sympy.Poly(f, lam), m) for f, m in factors]
