"""
Jets - Truncated multivariate power series with exact rational coefficients
Sparse dict-of-monomials representation in graded-lex order, with a reliable
order tracking how many low-degree coefficients are exact
"""

import operator
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import sympy

from src.errors import (
    BadIndex, BadParameter, DegreeOverflow, DimensionMismatch, NonzeroConstantTerm,
    NotAUnit, NotDivisible, PrecisionExhausted, TruncMismatch, UnsupportedDimension,
    ZeroWithinReliable,
)

Multidegree = Tuple[int, ...]
Scalar = Union[int, Fraction, str]


def as_rational(c: Scalar) -> Fraction:
    """Convert an int, Fraction, sympy Rational or 'p/q' string to a Fraction"""
    if isinstance(c, Fraction):
        return c
    if isinstance(c, bool):
        raise BadParameter(f"not a rational: {c!r}")
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, float):
        raise BadParameter(f"floating-point coefficient {c!r}; use an exact rational")
    if isinstance(c, str):
        try:
            return Fraction(c.strip())
        except ValueError:
            raise BadParameter(f"not a rational: {c!r}")
    if hasattr(c, 'p') and hasattr(c, 'q'):
        return Fraction(int(c.p), int(c.q))
    raise BadParameter(f"not a rational: {c!r}")


def grlex_key(m: Multidegree) -> Tuple[int, ...]:
    """Graded-lex sort key: total degree first, then lexicographic with x1 > x2 > ..."""
    return (sum(m),) + tuple(m)


def format_rational(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


@dataclass(frozen=True, eq=False)
class Jet:
    """
    Truncated power series in `dim` variables

    Coefficients of total degree <= trunc are stored; those of degree <= reliable
    are exact. Zero coefficients are never stored.
    """
    dim: int
    trunc: int
    coeffs: Dict[Multidegree, Fraction] = field(repr=False)
    reliable: int

    # --- inspection ---

    def coefficient(self, m: Sequence[int]) -> Fraction:
        return self.coeffs.get(tuple(m), Fraction(0))

    def terms(self) -> List[Tuple[Multidegree, Fraction]]:
        """Terms in ascending graded-lex order"""
        return sorted(self.coeffs.items(), key=lambda kv: grlex_key(kv[0]))

    def constant_term(self) -> Fraction:
        return self.coeffs.get((0,) * self.dim, Fraction(0))

    def order(self) -> int:
        """
        Vanishing order as used by the reliable-order rules

        Returns the lowest stored degree, capped at reliable + 1 since nothing
        beyond the reliable order is known to be nonzero.
        """
        lowest = self.reliable + 1
        for m in self.coeffs:
            d = sum(m)
            if d < lowest:
                lowest = d
        return lowest

    def is_zero_within_reliable(self) -> bool:
        return all(sum(m) > self.reliable for m in self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def degrees(self) -> List[int]:
        return sorted({sum(m) for m in self.coeffs})

    def homogeneous_part(self, d: int) -> 'Jet':
        return _jet(self.dim, self.trunc, {m: c for m, c in self.coeffs.items() if sum(m) == d}, self.reliable)

    def lowest_form(self) -> 'Jet':
        """Homogeneous part of lowest degree within the reliable order"""
        if self.is_zero_within_reliable():
            raise ZeroWithinReliable("jet vanishes up to its reliable order")
        return self.homogeneous_part(self.order())

    def truncated(self, order: int) -> 'Jet':
        """Drop coefficients above `order`; the result is reliable only up to `order`"""
        return _jet(self.dim, self.trunc, {m: c for m, c in self.coeffs.items() if sum(m) <= order},
                    max(0, min(self.reliable, order)))

    def with_trunc(self, trunc: int) -> 'Jet':
        """Same series viewed at another truncation order"""
        return _jet(self.dim, trunc, {m: c for m, c in self.coeffs.items() if sum(m) <= trunc},
                    min(self.reliable, trunc))

    def with_reliable(self, reliable: int) -> 'Jet':
        if reliable < 0:
            raise PrecisionExhausted("reliable order below zero")
        return _jet(self.dim, self.trunc, self.coeffs, min(self.reliable, reliable))

    # --- operators ---

    def __add__(self, other: 'Jet') -> 'Jet':
        return add(self, other)

    def __sub__(self, other: 'Jet') -> 'Jet':
        return sub(self, other)

    def __neg__(self) -> 'Jet':
        return scale(self, -1)

    def __mul__(self, other) -> 'Jet':
        if isinstance(other, Jet):
            return mul(self, other)
        return scale(self, other)

    def __rmul__(self, other) -> 'Jet':
        return scale(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Jet):
            return NotImplemented
        return (self.dim == other.dim and self.trunc == other.trunc
                and self.reliable == other.reliable and self.coeffs == other.coeffs)

    def __hash__(self) -> int:
        return hash((self.dim, self.trunc, self.reliable, frozenset(self.coeffs.items())))

    def pretty(self) -> str:
        """Human-readable polynomial, e.g. 3/2*x1 - x2^2"""
        if not self.coeffs:
            return '0'
        parts = []
        for m, c in self.terms():
            mono = '*'.join(
                f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}" for i, e in enumerate(m) if e
            )
            mag = abs(c)
            if not mono:
                body = format_rational(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{format_rational(mag)}*{mono}"
            sign = '-' if c < 0 else '+'
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ('-' if first_sign == '-' else '') + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"Jet(dim={self.dim}, trunc={self.trunc}, reliable={self.reliable}, {self.pretty()})"


def _jet(dim: int, trunc: int, coeffs: Dict[Multidegree, Fraction], reliable: int) -> Jet:
    """Internal constructor; caller guarantees canonical coefficients"""
    return Jet(dim, trunc, coeffs, reliable)


def _clean(coeffs: Dict[Multidegree, Fraction]) -> Dict[Multidegree, Fraction]:
    return {m: c for m, c in coeffs.items() if c != 0}


# --- constructors ---

def make_jet(dim: int, trunc: int, terms: Iterable[Tuple[Sequence[int], Scalar]],
             reliable: Optional[int] = None) -> Jet:
    """
    Build a canonical jet from (multidegree, coefficient) pairs

    Args:
        dim: Ambient dimension n
        trunc: Truncation order N
        terms: Iterable of (exponent vector, rational); duplicates are summed
        reliable: Optional reliable order (defaults to trunc)

    Returns:
        Jet with zero coefficients dropped
    """
    if dim < 1:
        raise DimensionMismatch(f"dimension must be positive, got {dim}")
    if trunc < 0:
        raise DegreeOverflow(f"truncation order must be non-negative, got {trunc}")
    coeffs: Dict[Multidegree, Fraction] = {}
    for exps, c in terms:
        m = tuple(int(e) for e in exps)
        if len(m) != dim:
            raise DimensionMismatch(f"exponent vector {m} has length {len(m)}, expected {dim}")
        if any(e < 0 for e in m):
            raise BadParameter(f"negative exponent in {m}")
        if sum(m) > trunc:
            raise DegreeOverflow(f"term {m} has degree {sum(m)} > trunc {trunc}")
        coeffs[m] = coeffs.get(m, Fraction(0)) + as_rational(c)
    if reliable is None:
        reliable = trunc
    if not 0 <= reliable <= trunc:
        raise BadParameter(f"reliable order {reliable} outside [0, {trunc}]")
    return _jet(dim, trunc, _clean(coeffs), reliable)


def zero_jet(dim: int, trunc: int) -> Jet:
    return _jet(dim, trunc, {}, trunc)


def constant(dim: int, trunc: int, c: Scalar) -> Jet:
    c = as_rational(c)
    return _jet(dim, trunc, {(0,) * dim: c} if c else {}, trunc)


def monomial(dim: int, trunc: int, exps: Sequence[int], c: Scalar = 1) -> Jet:
    return make_jet(dim, trunc, [(exps, c)])


def variable(dim: int, trunc: int, i: int) -> Jet:
    """Coordinate function x_i (1-based)"""
    if not 1 <= i <= dim:
        raise BadIndex(f"variable index {i} outside 1..{dim}")
    m = [0] * dim
    m[i - 1] = 1
    return monomial(dim, trunc, m)


# --- ring operations ---

def check_compatible(a: Jet, b: Jet):
    if a.dim != b.dim:
        raise DimensionMismatch(f"dim {a.dim} vs {b.dim}")
    if a.trunc != b.trunc:
        raise TruncMismatch(f"trunc {a.trunc} vs {b.trunc}")


def add(a: Jet, b: Jet) -> Jet:
    check_compatible(a, b)
    coeffs = dict(a.coeffs)
    for m, c in b.coeffs.items():
        s = coeffs.get(m, 0) + c
        if s:
            coeffs[m] = s
        else:
            coeffs.pop(m, None)
    return _jet(a.dim, a.trunc, coeffs, min(a.reliable, b.reliable))


def sub(a: Jet, b: Jet) -> Jet:
    return add(a, scale(b, -1))


def scale(a: Jet, c: Scalar) -> Jet:
    c = as_rational(c)
    if not c:
        return _jet(a.dim, a.trunc, {}, a.reliable)
    return _jet(a.dim, a.trunc, {m: v * c for m, v in a.coeffs.items()}, a.reliable)


def _by_degree(coeffs: Dict[Multidegree, Fraction]) -> Dict[int, List[Tuple[Multidegree, Fraction]]]:
    buckets: Dict[int, List[Tuple[Multidegree, Fraction]]] = {}
    for m, c in coeffs.items():
        buckets.setdefault(sum(m), []).append((m, c))
    return buckets


def _mul_coeffs(a: Dict[Multidegree, Fraction], b: Dict[Multidegree, Fraction],
                trunc: int) -> Dict[Multidegree, Fraction]:
    out: Dict[Multidegree, Fraction] = {}
    if not a or not b:
        return out
    buckets_a = _by_degree(a)
    buckets_b = _by_degree(b)
    add_exps = operator.add
    for da, terms_a in buckets_a.items():
        for db, terms_b in buckets_b.items():
            if da + db > trunc:
                continue
            for ma, ca in terms_a:
                for mb, cb in terms_b:
                    m = tuple(map(add_exps, ma, mb))
                    out[m] = out.get(m, 0) + ca * cb
    return _clean(out)


def mul(a: Jet, b: Jet) -> Jet:
    """
    Truncated product

    reliable = min(reliable a + ord b, reliable b + ord a, trunc)
    """
    check_compatible(a, b)
    reliable = min(a.reliable + b.order(), b.reliable + a.order(), a.trunc)
    return _jet(a.dim, a.trunc, _mul_coeffs(a.coeffs, b.coeffs, a.trunc), reliable)


def power(a: Jet, k: int) -> Jet:
    result = constant(a.dim, a.trunc, 1)
    for _ in range(k):
        result = mul(result, a)
    return result


def differentiate(a: Jet, i: int) -> Jet:
    """Partial derivative in x_i (1-based); reliable order drops by one"""
    if not 1 <= i <= a.dim:
        raise BadIndex(f"variable index {i} outside 1..{a.dim}")
    if a.reliable == 0:
        raise PrecisionExhausted("cannot differentiate a jet with reliable order 0")
    k = i - 1
    coeffs = {}
    for m, c in a.coeffs.items():
        e = m[k]
        if e:
            coeffs[m[:k] + (e - 1,) + m[k + 1:]] = c * e
    return _jet(a.dim, a.trunc, coeffs, a.reliable - 1)


def integrate(a: Jet, i: int) -> Jet:
    """Antiderivative in x_i vanishing on x_i = 0"""
    if not 1 <= i <= a.dim:
        raise BadIndex(f"variable index {i} outside 1..{a.dim}")
    k = i - 1
    coeffs = {}
    for m, c in a.coeffs.items():
        if sum(m) + 1 > a.trunc:
            continue
        e = m[k] + 1
        coeffs[m[:k] + (e,) + m[k + 1:]] = c / e
    return _jet(a.dim, a.trunc, coeffs, min(a.reliable + 1, a.trunc))


def substitute(f: Jet, args: Sequence[Jet]) -> Jet:
    """
    Composition f(args_1, ..., args_dim)

    Horner evaluation: f is split by the exponent of its first variable, each
    slice is evaluated recursively in the remaining variables, and the slices
    are recombined by Horner's rule in args_1. The arguments may live in
    another ambient dimension; the result takes their dim and trunc.
    """
    if len(args) != f.dim:
        raise DimensionMismatch(f"{len(args)} arguments for a jet in {f.dim} variables")
    first = args[0]
    for g in args[1:]:
        if g.dim != first.dim:
            raise DimensionMismatch(f"argument dims {first.dim} vs {g.dim}")
        if g.trunc != first.trunc:
            raise TruncMismatch(f"argument truncs {first.trunc} vs {g.trunc}")
    for g in args:
        if g.constant_term() != 0:
            raise NonzeroConstantTerm("substitution argument does not vanish at 0")
    dim, trunc = first.dim, first.trunc
    # exact arguments for the evaluation; reliability is applied once at the end
    exact_args = [_jet(dim, trunc, g.coeffs, trunc) for g in args]
    powers: Dict[Tuple[int, int], Dict[Multidegree, Fraction]] = {}

    def arg_power(var: int, e: int) -> Dict[Multidegree, Fraction]:
        if e == 1:
            return exact_args[var].coeffs
        key = (var, e)
        if key not in powers:
            powers[key] = _mul_coeffs(arg_power(var, e - 1), exact_args[var].coeffs, trunc)
        return powers[key]

    def horner(terms: List[Tuple[Multidegree, Fraction]], var: int) -> Dict[Multidegree, Fraction]:
        if var == f.dim:
            total = sum((c for _, c in terms), Fraction(0))
            return {(0,) * dim: total} if total else {}
        slices: Dict[int, List[Tuple[Multidegree, Fraction]]] = {}
        for m, c in terms:
            slices.setdefault(m[var], []).append((m, c))
        exps = sorted(slices, reverse=True)
        acc: Dict[Multidegree, Fraction] = {}
        for idx, e in enumerate(exps):
            part = horner(slices[e], var + 1)
            for m, c in part.items():
                acc[m] = acc.get(m, 0) + c
            acc = _clean(acc)
            step = e - (exps[idx + 1] if idx + 1 < len(exps) else 0)
            if step and acc:
                acc = _mul_coeffs(acc, arg_power(var, step), trunc)
        return acc

    coeffs = horner(list(f.coeffs.items()), 0) if f.coeffs else {}
    reliable = min([f.reliable, trunc] + [g.reliable for g in args])
    return _jet(dim, trunc, coeffs, reliable)


def invert_unit(a: Jet) -> Jet:
    """Multiplicative inverse of a unit, degree by degree"""
    a0 = a.constant_term()
    if a0 == 0:
        raise NotAUnit("constant term is zero")
    inv0 = 1 / a0
    parts_a = {d: terms for d, terms in _by_degree(a.coeffs).items() if d > 0}
    parts_b: Dict[int, Dict[Multidegree, Fraction]] = {0: {(0,) * a.dim: inv0}}
    for d in range(1, a.trunc + 1):
        acc: Dict[Multidegree, Fraction] = {}
        for k, terms_a in parts_a.items():
            if k > d or (d - k) not in parts_b:
                continue
            for ma, ca in terms_a:
                for mb, cb in parts_b[d - k].items():
                    m = tuple(map(operator.add, ma, mb))
                    acc[m] = acc.get(m, 0) - ca * cb * inv0
        acc = _clean(acc)
        if acc:
            parts_b[d] = acc
    coeffs = {}
    for part in parts_b.values():
        coeffs.update(part)
    return _jet(a.dim, a.trunc, coeffs, a.reliable)


# --- polynomial bridge (sympy) ---

def symbols_for(dim: int) -> Tuple[sympy.Symbol, ...]:
    return tuple(sympy.Symbol(f"x{i + 1}") for i in range(dim))


def to_poly(a: Jet, gens=None) -> sympy.Poly:
    gens = gens or symbols_for(a.dim)
    data = {m: sympy.Rational(c.numerator, c.denominator) for m, c in a.coeffs.items()}
    return sympy.Poly.from_dict(data or {(0,) * a.dim: 0}, *gens, domain=sympy.QQ)


def from_poly_dict(data, dim: int, trunc: int, reliable: int) -> Jet:
    coeffs = {}
    for m, c in data.items():
        c = as_rational(c)
        if c and sum(m) <= trunc:
            coeffs[tuple(int(e) for e in m)] = c
    return _jet(dim, trunc, coeffs, reliable)


def _divide_homogeneous(piece: Jet, lead: Jet, gens) -> Tuple[Dict, Dict]:
    """Divide a homogeneous piece by a homogeneous form; returns (quotient, remainder) dicts"""
    quotients, remainder = sympy.reduced(to_poly(piece, gens).as_expr(), [to_poly(lead, gens).as_expr()],
                                         *gens, order='grlex', domain=sympy.QQ, polys=True)
    q = quotients[0].as_dict() if not quotients[0].is_zero else {}
    r = remainder.as_dict() if not remainder.is_zero else {}
    return q, r


def series_divmod(a: Jet, b: Jet) -> Tuple[Jet, Jet]:
    """
    Division with remainder in the formal ring

    Each homogeneous piece of the running dividend is divided by the lowest
    form of b; the quotient piece times b is subtracted from the whole series
    and the remainder piece is set aside. a = b*q + r up to the reliable order.
    The remainder is linear in a.

    Returns:
        (quotient, remainder)
    """
    check_compatible(a, b)
    if b.is_zero_within_reliable():
        raise ZeroWithinReliable("division by a jet that vanishes up to its reliable order")
    o = b.order()
    lead = b.homogeneous_part(o)
    gens = symbols_for(a.dim)
    exact_b = _jet(b.dim, b.trunc, b.coeffs, b.trunc)
    work = dict(a.coeffs)
    quotient: Dict[Multidegree, Fraction] = {}
    remainder: Dict[Multidegree, Fraction] = {}
    for d in range(0, a.trunc + 1):
        piece = {m: c for m, c in work.items() if sum(m) == d}
        if not piece:
            continue
        if d < o:
            remainder.update(piece)
            continue
        q, r = _divide_homogeneous(_jet(a.dim, a.trunc, piece, a.trunc), lead, gens)
        for m, c in r.items():
            remainder[tuple(m)] = as_rational(c)
        q = {tuple(m): as_rational(c) for m, c in q.items()}
        if q:
            for m, c in q.items():
                quotient[m] = quotient.get(m, 0) + c
            for m, c in _mul_coeffs(q, exact_b.coeffs, a.trunc).items():
                work[m] = work.get(m, 0) - c
            work = _clean(work)
    base = min(a.reliable, b.reliable)
    if base - o < 0:
        raise PrecisionExhausted("divisor order exceeds the reliable order of the operands")
    return (_jet(a.dim, a.trunc, _clean(quotient), base - o),
            _jet(a.dim, a.trunc, _clean(remainder), base))


def divide_exact(a: Jet, b: Jet) -> Jet:
    """Quotient a/b; raises NotDivisible when a remainder survives within the reliable range"""
    q, r = series_divmod(a, b)
    if not r.is_zero_within_reliable():
        raise NotDivisible(f"remainder {r.truncated(r.reliable).pretty()} is nonzero")
    return q


def gcd_poly(a: Jet, b: Jet) -> Jet:
    """
    Polynomial gcd of the truncations of a and b over Q

    Normalized so that the graded-lex leading coefficient is 1; gcd(0, 0) = 0.
    """
    check_compatible(a, b)
    if a.dim > 2:
        raise UnsupportedDimension(f"gcd is implemented for dim <= 2, got {a.dim}")
    reliable = min(a.reliable, b.reliable)
    if a.is_zero() and b.is_zero():
        return _jet(a.dim, a.trunc, {}, reliable)
    gens = symbols_for(a.dim)
    g = sympy.gcd(to_poly(a, gens), to_poly(b, gens))
    g = from_poly_dict(g.as_dict(), a.dim, a.trunc, reliable)
    return normalize_leading(g)


def normalize_leading(a: Jet) -> Jet:
    """Scale so that the graded-lex leading (largest) monomial has coefficient 1"""
    if not a.coeffs:
        return a
    lead = max(a.coeffs, key=grlex_key)
    return scale(a, 1 / a.coeffs[lead])


def agree(a: Jet, b: Jet, order: Optional[int] = None) -> bool:
    """Coefficient equality up to `order` (default: the smaller reliable order)"""
    check_compatible(a, b)
    if order is None:
        order = min(a.reliable, b.reliable)
    keys = set(a.coeffs) | set(b.coeffs)
    return all(a.coefficient(m) == b.coefficient(m) for m in keys if sum(m) <= order)


def monomials_of_degree(dim: int, d: int) -> List[Multidegree]:
    """All multidegrees of total degree d in ascending graded-lex order"""
    if dim == 1:
        return [(d,)]
    out = []
    for first in range(d + 1):
        for rest in monomials_of_degree(dim - 1, d - first):
            out.append((first,) + rest)
    return sorted(out, key=grlex_key)


def monomials_up_to(dim: int, d: int, start: int = 0) -> List[Multidegree]:
    out = []
    for k in range(start, d + 1):
        out.extend(monomials_of_degree(dim, k))
    return out
