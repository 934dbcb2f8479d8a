"""
Resonance - Exact resonance relations among rational eigenvalues
Decides nonresonance, enumerates resonant multidegrees i.lambda = mu, and
describes infinite solution sets by a base point and a lattice step
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Set, Tuple

from src.errors import BadParameter, EmptyFiber, NotCoprime, UnsupportedDimension, ZeroPair
from src.jets import Multidegree, as_rational, monomials_of_degree
from src.runlog import log


class Finiteness(str, Enum):
    FINITE_COMPLETE = 'finite-complete'
    INFINITE_STRUCTURED = 'infinite-structured'
    BOUNDED_ENUMERATION = 'bounded-enumeration'


@dataclass(frozen=True)
class ResonanceQuery:
    """Equation sum_i m_i lambda_i = mu over multidegrees m != 0"""
    lam: Tuple[Fraction, ...]
    mu: Fraction
    degree_bound: Optional[int] = None

    def __post_init__(self):
        if not self.lam:
            raise BadParameter("at least one eigenvalue is required")
        object.__setattr__(self, 'lam', tuple(as_rational(c) for c in self.lam))
        object.__setattr__(self, 'mu', as_rational(self.mu))
        if self.degree_bound is not None and self.degree_bound < 0:
            raise BadParameter(f"negative degree bound {self.degree_bound}")


@dataclass(frozen=True)
class ResonanceSet:
    """
    Solutions of a resonance query

    solutions lists every solution for finite sets, and the solutions inside the
    bound box for infinite ones. generator = (base, step) describes an infinite
    set as {base + s*step : s >= 0}.
    """
    solutions: Tuple[Multidegree, ...]
    finiteness: Finiteness
    generator: Optional[Tuple[Multidegree, Multidegree]] = None
    lam: Tuple[Fraction, ...] = field(default=(), repr=False)
    mu: Fraction = field(default=Fraction(0), repr=False)

    def enumerate(self, bound: int) -> Set[Multidegree]:
        """All solutions with every exponent <= bound"""
        if self.finiteness is Finiteness.INFINITE_STRUCTURED:
            base, step = self.generator
            out = set()
            point = base
            while all(e <= bound for e in point):
                out.add(point)
                point = tuple(b + s for b, s in zip(point, step))
            return out
        return {m for m in self.solutions if all(e <= bound for e in m)}


def _in_box(m: Multidegree, bound: Optional[int]) -> bool:
    return bound is None or all(e <= bound for e in m)


def monomial_weight(lam: Sequence[Fraction], m: Multidegree, j: int) -> Fraction:
    """<m, lambda> - lambda_j for component j (1-based)"""
    return sum((e * l for e, l in zip(m, lam)), Fraction(0)) - lam[j - 1]


def resonant_monomials(lam: Sequence, degree: int) -> List[Tuple[Multidegree, int]]:
    """(multidegree, component) pairs of the given degree with zero weight"""
    lam = [as_rational(c) for c in lam]
    return [(m, j) for m in monomials_of_degree(len(lam), degree) for j in range(1, len(lam) + 1)
            if monomial_weight(lam, m, j) == 0]


def brute_force(lam: Sequence, mu, bound: int) -> Set[Multidegree]:
    """Every m != 0 with all exponents <= bound solving m.lambda = mu"""
    lam = [as_rational(c) for c in lam]
    mu = as_rational(mu)
    out = set()

    def walk(prefix: Tuple[int, ...], partial: Fraction):
        if len(prefix) == len(lam):
            if partial == mu and any(prefix):
                out.add(prefix)
            return
        for e in range(bound + 1):
            walk(prefix + (e,), partial + e * lam[len(prefix)])

    walk((), Fraction(0))
    return out


def is_nonresonant(lam: Sequence) -> bool:
    """
    No m in N^2 with |m| >= 2 and m.lambda = lambda_j for some j

    A zero eigenvalue or eigenvalues of opposite sign are always resonant; for
    eigenvalues of one sign the candidates lie in a finite range.
    """
    lam = [as_rational(c) for c in lam]
    if len(lam) != 2:
        raise UnsupportedDimension(f"nonresonance is decided for n = 2, got n = {len(lam)}")
    if lam[0] == 0 and lam[1] == 0:
        raise ZeroPair("lambda = (0, 0)")
    if lam[0] == 0 or lam[1] == 0:
        return False
    if (lam[0] > 0) != (lam[1] > 0):
        return False
    a, b = abs(lam[0]), abs(lam[1])
    top = math.ceil(max(a, b) / min(a, b))
    for d in range(2, top + 1):
        for m in monomials_of_degree(2, d):
            for j in (1, 2):
                if monomial_weight(lam, m, j) == 0:
                    return False
    return True


def fiber_decomposition(p: int, q: int, mu) -> Tuple[Multidegree, Multidegree]:
    """
    Lexicographic-minimal solution of k*q - l*p = mu in N^2 minus the origin

    Every solution is base + s*(p, q) with s >= 0.

    Returns:
        (base, step)
    """
    if p < 0 or q < 0:
        raise BadParameter(f"lattice step ({p}, {q}) must be non-negative")
    if math.gcd(p, q) != 1:
        raise NotCoprime(f"gcd({p}, {q}) = {math.gcd(p, q)}")
    mu = as_rational(mu)
    if mu.denominator != 1:
        raise EmptyFiber(f"mu = {mu} is not an integer")
    s = mu.numerator
    step = (p, q)
    if p == 0:
        if s < 0:
            raise EmptyFiber(f"k = {s} < 0")
        return ((s, 0) if s else (0, 1)), step
    if q == 0:
        if s > 0:
            raise EmptyFiber(f"l = {-s} < 0")
        return ((0, -s) if s else (1, 0)), step
    k = (s * pow(q, -1, p)) % p
    l = (k * q - s) // p
    if l < 0:
        t = -(l // q)
        k, l = k + t * p, l + t * q
    if (k, l) == (0, 0):
        k, l = p, q
    return (k, l), step


def _lattice_form(lam: Sequence[Fraction]) -> Tuple[int, int, Fraction]:
    """Write lambda = c*(q, -p) with (p, q) primitive and p, q >= 0"""
    l1, l2 = lam
    if l2 == 0:
        return 0, 1, l1
    if l1 == 0:
        return 1, 0, -l2
    ratio = -l1 / l2
    q, p = ratio.numerator, ratio.denominator
    return p, q, l1 / q


def resonant_set(query: ResonanceQuery) -> ResonanceSet:
    """
    Solve m.lambda = mu over m in N^n minus the origin

    One-signed planar spectra give finite sets enumerated completely; mixed
    signs or a zero eigenvalue give a single lattice ray base + s*step.
    """
    lam, mu, bound = query.lam, query.mu, query.degree_bound
    n = len(lam)
    log(f"Resonance query lambda={[str(c) for c in lam]} mu={mu} bound={bound}")

    if n == 1:
        if lam[0] == 0:
            if mu != 0:
                return ResonanceSet((), Finiteness.FINITE_COMPLETE, None, lam, mu)
            gen = ((1,), (1,))
            sols = tuple(sorted((k,) for k in range(1, bound + 1))) if bound is not None else ()
            return ResonanceSet(sols, Finiteness.INFINITE_STRUCTURED, gen, lam, mu)
        k = mu / lam[0]
        sols = ((k.numerator,),) if k.denominator == 1 and k > 0 else ()
        return ResonanceSet(sols, Finiteness.FINITE_COMPLETE, None, lam, mu)

    if n >= 3:
        if bound is None:
            raise UnsupportedDimension(f"structured resonance sets need n <= 2, got n = {n}")
        sols = tuple(sorted(brute_force(lam, mu, bound)))
        return ResonanceSet(sols, Finiteness.BOUNDED_ENUMERATION, None, lam, mu)

    if lam[0] == 0 and lam[1] == 0:
        raise ZeroPair("lambda = (0, 0)")

    if lam[0] != 0 and lam[1] != 0 and (lam[0] > 0) == (lam[1] > 0):
        sols = []
        top = mu / lam[0]
        if top >= 0:
            for i1 in range(0, math.floor(top) + 1):
                i2 = (mu - i1 * lam[0]) / lam[1]
                m = (i1, i2.numerator)
                if i2.denominator == 1 and i2 >= 0 and m != (0, 0) and _in_box(m, bound):
                    sols.append(m)
        return ResonanceSet(tuple(sorted(sols)), Finiteness.FINITE_COMPLETE, None, lam, mu)

    p, q, c = _lattice_form(lam)
    try:
        base, step = fiber_decomposition(p, q, mu / c)
    except EmptyFiber:
        return ResonanceSet((), Finiteness.FINITE_COMPLETE, None, lam, mu)
    result = ResonanceSet((), Finiteness.INFINITE_STRUCTURED, (base, step), lam, mu)
    if bound is not None:
        result = ResonanceSet(tuple(sorted(result.enumerate(bound))), Finiteness.INFINITE_STRUCTURED,
                              (base, step), lam, mu)
    return result
