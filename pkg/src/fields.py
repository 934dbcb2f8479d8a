"""
Fields - Formal vector fields and formal diffeomorphisms
Vector fields act as derivations on jets; diffeomorphism jets compose, invert,
push fields forward, and evaluate words in a finitely generated group
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from src import linalg
from src.errors import (
    BadIndex, DimensionMismatch, NonSingularityViolated, NonzeroConstantTerm, NotPeriodic,
    SingularLinearPart, TruncMismatch, ZeroWithinReliable,
)
from src.jets import (
    Jet, _jet, add, agree, check_compatible, constant, differentiate,
    mul, scale, substitute, variable, zero_jet,
)
from src.runlog import log

GroupWord = Tuple[Tuple[int, int], ...]


def _equalize(components: Sequence[Jet]) -> Tuple[Jet, ...]:
    """Check shared dim/trunc and lower every component to the common reliable order"""
    if not components:
        raise DimensionMismatch("a field needs at least one component")
    first = components[0]
    for c in components[1:]:
        check_compatible(first, c)
    reliable = min(c.reliable for c in components)
    return tuple(c if c.reliable == reliable else _jet(c.dim, c.trunc, c.coeffs, reliable)
                 for c in components)


def _apply_matrix(M: linalg.Matrix, jets: Sequence[Jet]) -> List[Jet]:
    out = []
    for row in M:
        acc = zero_jet(jets[0].dim, jets[0].trunc).with_reliable(min(j.reliable for j in jets))
        for c, j in zip(row, jets):
            if c:
                acc = add(acc, scale(j, c))
        out.append(acc)
    return out


def _linear_matrix(components: Sequence[Jet]) -> linalg.Matrix:
    n = components[0].dim
    M = []
    for comp in components:
        row = []
        for j in range(n):
            m = [0] * n
            m[j] = 1
            row.append(comp.coefficient(m))
        M.append(row)
    return M


@dataclass(frozen=True)
class VectorFieldJet:
    """
    Formal vector field sum_i X_i d/dx_i

    Components share dim and trunc; all carry the field's reliable order.
    """
    components: Tuple[Jet, ...]

    def __post_init__(self):
        comps = _equalize(tuple(self.components))
        if len(comps) != comps[0].dim:
            raise DimensionMismatch(f"{len(comps)} components in dimension {comps[0].dim}")
        object.__setattr__(self, 'components', comps)

    @property
    def dim(self) -> int:
        return self.components[0].dim

    @property
    def trunc(self) -> int:
        return self.components[0].trunc

    @property
    def reliable(self) -> int:
        return self.components[0].reliable

    def __getitem__(self, i: int) -> Jet:
        return self.components[i]

    def __add__(self, other: 'VectorFieldJet') -> 'VectorFieldJet':
        return VectorFieldJet(tuple(add(a, b) for a, b in zip(self.components, other.components)))

    def __sub__(self, other: 'VectorFieldJet') -> 'VectorFieldJet':
        return self + other.scale(-1)

    def __neg__(self) -> 'VectorFieldJet':
        return self.scale(-1)

    def scale(self, c) -> 'VectorFieldJet':
        return VectorFieldJet(tuple(scale(a, c) for a in self.components))

    def times(self, f: Jet) -> 'VectorFieldJet':
        """Product f * X with a function jet"""
        return VectorFieldJet(tuple(mul(f, a) for a in self.components))

    def homogeneous_part(self, d: int) -> 'VectorFieldJet':
        return VectorFieldJet(tuple(a.homogeneous_part(d) for a in self.components))

    def truncated(self, order: int) -> 'VectorFieldJet':
        return VectorFieldJet(tuple(a.truncated(order) for a in self.components))

    def with_reliable(self, reliable: int) -> 'VectorFieldJet':
        return VectorFieldJet(tuple(a.with_reliable(reliable) for a in self.components))

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.components)

    def is_zero_within_reliable(self) -> bool:
        return all(a.is_zero_within_reliable() for a in self.components)

    def degrees(self) -> List[int]:
        return sorted({d for a in self.components for d in a.degrees()})

    def pretty(self) -> str:
        return '[' + ', '.join(a.pretty() for a in self.components) + ']'


@dataclass(frozen=True)
class DiffeoJet:
    """
    Formal diffeomorphism jet: components vanish at 0, linear part invertible
    """
    components: Tuple[Jet, ...]

    def __post_init__(self):
        comps = _equalize(tuple(self.components))
        if len(comps) != comps[0].dim:
            raise DimensionMismatch(f"{len(comps)} components in dimension {comps[0].dim}")
        if any(c.constant_term() != 0 for c in comps):
            raise NonzeroConstantTerm("diffeomorphism components must vanish at 0")
        if linalg.det(_linear_matrix(comps)) == 0:
            raise SingularLinearPart("linear part is not invertible")
        object.__setattr__(self, 'components', comps)

    @classmethod
    def identity(cls, dim: int, trunc: int) -> 'DiffeoJet':
        return cls(tuple(variable(dim, trunc, i + 1) for i in range(dim)))

    @classmethod
    def linear(cls, M: linalg.Matrix, trunc: int) -> 'DiffeoJet':
        n = len(M)
        return cls(tuple(_apply_matrix(M, [variable(n, trunc, i + 1) for i in range(n)])))

    @property
    def dim(self) -> int:
        return self.components[0].dim

    @property
    def trunc(self) -> int:
        return self.components[0].trunc

    @property
    def reliable(self) -> int:
        return self.components[0].reliable

    def linear_part(self) -> linalg.Matrix:
        return _linear_matrix(self.components)

    def is_identity(self, order: Optional[int] = None) -> bool:
        ident = DiffeoJet.identity(self.dim, self.trunc)
        return all(agree(a, b, order) for a, b in zip(self.components, ident.components))

    def pretty(self) -> str:
        return '(' + ', '.join(a.pretty() for a in self.components) + ')'


# --- field constructors ---

def vector_field(components: Sequence[Jet]) -> VectorFieldJet:
    return VectorFieldJet(tuple(components))


def zero_field(dim: int, trunc: int) -> VectorFieldJet:
    return VectorFieldJet(tuple(zero_jet(dim, trunc) for _ in range(dim)))


def coordinate_field(dim: int, trunc: int, i: int) -> VectorFieldJet:
    """The constant field d/dx_i (1-based)"""
    if not 1 <= i <= dim:
        raise BadIndex(f"variable index {i} outside 1..{dim}")
    return VectorFieldJet(tuple(constant(dim, trunc, int(j == i - 1)) for j in range(dim)))


def linear_field(M: linalg.Matrix, trunc: int) -> VectorFieldJet:
    """The linear field x -> M x"""
    n = len(M)
    return VectorFieldJet(tuple(_apply_matrix(M, [variable(n, trunc, i + 1) for i in range(n)])))


def radial_field(dim: int, trunc: int) -> VectorFieldJet:
    """R_n = sum x_i d/dx_i"""
    return linear_field(linalg.identity(dim), trunc)


def _check_field_jet(X: VectorFieldJet, f: Jet):
    if X.dim != f.dim:
        raise DimensionMismatch(f"field dim {X.dim} vs jet dim {f.dim}")
    if X.trunc != f.trunc:
        raise TruncMismatch(f"field trunc {X.trunc} vs jet trunc {f.trunc}")


# --- derivation calculus ---

def apply(X: VectorFieldJet, f: Jet) -> Jet:
    """The derivation X(f) = sum_i X_i df/dx_i"""
    _check_field_jet(X, f)
    result = None
    for i, Xi in enumerate(X.components):
        term = mul(Xi, differentiate(f, i + 1))
        result = term if result is None else add(result, term)
    return result


def bracket(X: VectorFieldJet, Y: VectorFieldJet) -> VectorFieldJet:
    """[X, Y]_j = X(Y_j) - Y(X_j)"""
    if X.dim != Y.dim:
        raise DimensionMismatch(f"field dims {X.dim} vs {Y.dim}")
    if X.trunc != Y.trunc:
        raise TruncMismatch(f"field truncs {X.trunc} vs {Y.trunc}")
    return VectorFieldJet(tuple(
        add(apply(X, Yj), scale(apply(Y, Xj), -1)) for Xj, Yj in zip(X.components, Y.components)
    ))


def linear_part(X: VectorFieldJet) -> linalg.Matrix:
    """Matrix M with M[i][j] = coefficient of x_j in component i"""
    if any(c.constant_term() != 0 for c in X.components):
        raise NonSingularityViolated("field has a nonzero constant component")
    return _linear_matrix(X.components)


def vanishing_order(X: VectorFieldJet) -> int:
    """Lowest total degree carrying a nonzero coefficient within the reliable order"""
    if X.is_zero_within_reliable():
        raise ZeroWithinReliable("field vanishes up to its reliable order")
    return min(c.order() for c in X.components)


def agree_fields(X: VectorFieldJet, Y: VectorFieldJet, order: Optional[int] = None) -> bool:
    return all(agree(a, b, order) for a, b in zip(X.components, Y.components))


# --- diffeomorphism group ---

def compose(f: DiffeoJet, g: DiffeoJet) -> DiffeoJet:
    """f o g"""
    if f.dim != g.dim:
        raise DimensionMismatch(f"diffeo dims {f.dim} vs {g.dim}")
    if f.trunc != g.trunc:
        raise TruncMismatch(f"diffeo truncs {f.trunc} vs {g.trunc}")
    return DiffeoJet(tuple(substitute(fi, g.components) for fi in f.components))


def substitute_field(X: VectorFieldJet, g: DiffeoJet) -> VectorFieldJet:
    """Componentwise X o g (no Jacobian factor)"""
    return VectorFieldJet(tuple(substitute(c, g.components) for c in X.components))


def inverse(f: DiffeoJet) -> DiffeoJet:
    """
    Compositional inverse

    Fixed-point iteration g <- L^-1 (y - h(g)) where f = L x + h(x); pass k fixes
    degree k, so each pass only needs the composition truncated at k.
    """
    n, trunc = f.dim, f.trunc
    L = f.linear_part()
    if linalg.det(L) == 0:
        raise SingularLinearPart("linear part is not invertible")
    Linv = linalg.inverse(L)
    exact = [_jet(c.dim, trunc, c.coeffs, trunc) for c in f.components]
    lin = _apply_matrix(L, [variable(n, trunc, i + 1) for i in range(n)])
    h = [add(c, scale(l, -1)) for c, l in zip(exact, lin)]
    ys = [variable(n, trunc, i + 1) for i in range(n)]
    g = _apply_matrix(Linv, ys)
    for k in range(2, trunc + 1):
        low = [gi.with_trunc(k) for gi in g]
        hk = [substitute(hi.with_trunc(k), low).with_trunc(trunc) for hi in h]
        rhs = [_jet(n, trunc, add(y, scale(v, -1)).coeffs, trunc) for y, v in zip(ys, hk)]
        g = _apply_matrix(Linv, rhs)
    return DiffeoJet(tuple(gi.with_reliable(f.reliable) for gi in g))


def pushforward(f: DiffeoJet, X: VectorFieldJet, f_inverse: Optional[DiffeoJet] = None) -> VectorFieldJet:
    """
    f_* X = (Df . X) o f^-1

    The inverse is computed once (or supplied by the caller).
    """
    if f.dim != X.dim:
        raise DimensionMismatch(f"diffeo dim {f.dim} vs field dim {X.dim}")
    if f.trunc != X.trunc:
        raise TruncMismatch(f"diffeo trunc {f.trunc} vs field trunc {X.trunc}")
    finv = f_inverse or inverse(f)
    return VectorFieldJet(tuple(substitute(apply(X, fi), finv.components) for fi in f.components))


def pushforward_by_transport(f: DiffeoJet, X: VectorFieldJet) -> VectorFieldJet:
    """
    f_* X by solving the transport equation Y o f = Df . X degree by degree

    Never inverts f; used as an independent check of `pushforward`.
    """
    n, trunc = f.dim, f.trunc
    target = [apply(X, fi) for fi in f.components]
    reliable = min(t.reliable for t in target)
    target = [_jet(n, trunc, t.coeffs, trunc) for t in target]
    Linv = linalg.inverse(f.linear_part())
    lin_inv = _apply_matrix(Linv, [variable(n, trunc, i + 1) for i in range(n)])
    exact_f = [_jet(n, trunc, c.coeffs, trunc) for c in f.components]
    Y = [zero_jet(n, trunc) for _ in range(n)]
    for d in range(0, trunc + 1):
        composed = [substitute(y, exact_f) for y in Y]
        for i in range(n):
            residual = add(target[i], scale(composed[i], -1)).homogeneous_part(d)
            if residual.coeffs:
                Y[i] = add(Y[i], substitute(residual, lin_inv))
    return VectorFieldJet(tuple(y.with_reliable(reliable) for y in Y))


def iterate(f: DiffeoJet, k: int) -> DiffeoJet:
    result = DiffeoJet.identity(f.dim, f.trunc)
    for _ in range(k):
        result = compose(f, result)
    return result


def is_periodic(f: DiffeoJet, m: int) -> bool:
    """f^m = Id within the reliable order"""
    return iterate(f, m).is_identity()


def reduce_word(word: Sequence[Tuple[int, int]]) -> GroupWord:
    """Free reduction: merge adjacent equal generators and drop zero exponents"""
    stack: List[Tuple[int, int]] = []
    for index, exponent in word:
        if exponent == 0:
            continue
        if stack and stack[-1][0] == index:
            merged = stack[-1][1] + exponent
            stack.pop()
            if merged:
                stack.append((index, merged))
        else:
            stack.append((index, exponent))
    return tuple(stack)


def word_inverse(word: Sequence[Tuple[int, int]]) -> GroupWord:
    return tuple((i, -e) for i, e in reversed(word))


def commutator_word(i: int, j: int) -> GroupWord:
    """[f_i, f_j] = f_i f_j f_i^-1 f_j^-1"""
    return ((i, 1), (j, 1), (i, -1), (j, -1))


def evaluate_word(word: Sequence[Tuple[int, int]], gens: Sequence[DiffeoJet]) -> DiffeoJet:
    """
    Compose the generators along a word (leftmost factor applied last)

    Generator indices are 1-based; the word is reduced first.
    """
    if not gens:
        raise BadIndex("no generators")
    reduced = reduce_word(word)
    for index, _ in reduced:
        if not 1 <= index <= len(gens):
            raise BadIndex(f"generator index {index} outside 1..{len(gens)}")
    inverses: Dict[int, DiffeoJet] = {}
    result = DiffeoJet.identity(gens[0].dim, gens[0].trunc)
    for index, exponent in reduced:
        if exponent > 0:
            step = gens[index - 1]
        else:
            if index not in inverses:
                inverses[index] = inverse(gens[index - 1])
            step = inverses[index]
        for _ in range(abs(exponent)):
            result = compose(result, step)
    return result


def bochner_linearize(f: DiffeoJet, m: int) -> DiffeoJet:
    """
    Averaging conjugator for a periodic diffeomorphism

    h = (1/m) sum_{k<m} a^-k o f^k with a = J^1 f, so that h o f = a o h and J^1 h = Id.
    """
    if m < 1:
        raise NotPeriodic(f"period must be positive, got {m}")
    log(f"Bochner averaging over period {m}")
    powers = [DiffeoJet.identity(f.dim, f.trunc)]
    for _ in range(m):
        powers.append(compose(f, powers[-1]))
    if not powers[m].is_identity():
        raise NotPeriodic(f"f^{m} is not the identity within reliable order {f.reliable}")
    a_inv = linalg.inverse(f.linear_part())
    total = None
    a_inv_k = linalg.identity(f.dim)
    for k in range(m):
        term = _apply_matrix(a_inv_k, powers[k].components)
        total = term if total is None else [add(t, s) for t, s in zip(total, term)]
        a_inv_k = linalg.mat_mul(a_inv, a_inv_k)
    return DiffeoJet(tuple(scale(t, Fraction(1, m)) for t in total))


def linear_conjugate(M: linalg.Matrix, X: VectorFieldJet) -> VectorFieldJet:
    """Pushforward by the linear map x -> M x"""
    return pushforward(DiffeoJet.linear(M, X.trunc), X)
