"""
One-forms - Formal differential forms and their duality with plane fields
Exterior calculus on jets, integrability, pullbacks, logarithmic forms with
their residues, and formal separatrices of planar foliations
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from src.errors import (
    BadParameter, DegenerateLinearPart, DegreeOverflow, DegreeZero, DimensionMismatch,
    NonSingularityViolated, NonCoprimeFactors, NonzeroConstantTerm, NotClosed, NotDivisible,
    NotSimplePole, PrecisionExhausted, TopDegree, TruncMismatch, ZeroDirection, ZeroWithinReliable,
)
from src.fields import VectorFieldJet, vector_field
from src.jets import (
    Jet, add, as_rational, check_compatible, constant, differentiate, divide_exact,
    gcd_poly, make_jet, mul, power, scale, series_divmod, substitute, zero_jet,
)
from src.runlog import log

Indices = Tuple[int, ...]


def _merge_sign(left: Indices, right: Indices) -> int:
    """Sign of the permutation sorting left + right (disjoint index tuples)"""
    inversions = sum(1 for a in left for b in right if a > b)
    return -1 if inversions % 2 else 1


@dataclass(frozen=True)
class FormJet:
    """
    Formal k-form sum_I f_I dx_I

    Keys are increasing 0-based index tuples; zero coefficients are not stored.
    `reliable` is shared by every coefficient.
    """
    dim: int
    degree: int
    trunc: int
    coeffs: Dict[Indices, Jet] = field(repr=False)
    reliable: int

    def coefficient(self, indices: Sequence[int]) -> Jet:
        key = tuple(indices)
        if key in self.coeffs:
            return self.coeffs[key]
        return zero_jet(self.dim, self.trunc).with_reliable(self.reliable)

    def __add__(self, other: 'FormJet') -> 'FormJet':
        _check_forms(self, other)
        if self.degree != other.degree:
            raise DegreeOverflow(f"adding forms of degree {self.degree} and {other.degree}")
        keys = set(self.coeffs) | set(other.coeffs)
        return _form(self.dim, self.degree, self.trunc,
                     {k: add(self.coefficient(k), other.coefficient(k)) for k in keys},
                     min(self.reliable, other.reliable))

    def __sub__(self, other: 'FormJet') -> 'FormJet':
        return self + other.scale(-1)

    def __neg__(self) -> 'FormJet':
        return self.scale(-1)

    def scale(self, c) -> 'FormJet':
        return _form(self.dim, self.degree, self.trunc, {k: scale(f, c) for k, f in self.coeffs.items()},
                     self.reliable)

    def times(self, f: Jet) -> 'FormJet':
        """Product with a function jet"""
        return _form(self.dim, self.degree, self.trunc, {k: mul(f, g) for k, g in self.coeffs.items()},
                     min(self.reliable, f.reliable))

    def is_zero_within_reliable(self) -> bool:
        return all(f.is_zero_within_reliable() for f in self.coeffs.values())

    def with_reliable(self, reliable: int) -> 'FormJet':
        return _form(self.dim, self.degree, self.trunc, self.coeffs, min(self.reliable, reliable))

    def pretty(self) -> str:
        if not self.coeffs:
            return '0'
        parts = []
        for key in sorted(self.coeffs):
            basis = '^'.join(f"dx{i + 1}" for i in key)
            parts.append(f"({self.coeffs[key].pretty()})" + (f" {basis}" if basis else ''))
        return ' + '.join(parts)


def _form(dim: int, degree: int, trunc: int, coeffs: Dict[Indices, Jet], reliable: int) -> FormJet:
    """Canonical form: drop zero coefficients and lower every reliable order to the shared one"""
    for f in coeffs.values():
        reliable = min(reliable, f.reliable)
    kept = {k: f.with_reliable(reliable) for k, f in coeffs.items() if not f.is_zero()}
    return FormJet(dim, degree, trunc, kept, reliable)


def _check_forms(a: FormJet, b: FormJet):
    if a.dim != b.dim:
        raise DimensionMismatch(f"form dims {a.dim} vs {b.dim}")
    if a.trunc != b.trunc:
        raise TruncMismatch(f"form truncs {a.trunc} vs {b.trunc}")


# --- constructors ---

def make_form(dim: int, degree: int, coeffs: Dict[Sequence[int], Jet]) -> FormJet:
    """
    Build a form from coefficient jets keyed by 0-based index tuples

    Unsorted keys are sorted with the permutation sign; repeated indices are rejected.
    """
    if not 0 <= degree <= dim:
        raise DegreeOverflow(f"degree {degree} outside 0..{dim}")
    jets = list(coeffs.values())
    if not jets:
        raise BadParameter("use zero_form for the zero form")
    for f in jets:
        check_compatible(jets[0], f)
        if f.dim != dim:
            raise DimensionMismatch(f"coefficient dim {f.dim} vs form dim {dim}")
    canonical: Dict[Indices, Jet] = {}
    for key, f in coeffs.items():
        key = tuple(key)
        if len(key) != degree or len(set(key)) != degree or any(not 0 <= i < dim for i in key):
            raise BadParameter(f"bad index tuple {key} for a {degree}-form in dimension {dim}")
        ordered = tuple(sorted(key))
        inversions = sum(1 for a, b in combinations(key, 2) if a > b)
        term = scale(f, -1) if inversions % 2 else f
        canonical[ordered] = add(canonical[ordered], term) if ordered in canonical else term
    return _form(dim, degree, jets[0].trunc, canonical, min(f.reliable for f in jets))


def zero_form(dim: int, degree: int, trunc: int) -> FormJet:
    return FormJet(dim, degree, trunc, {}, trunc)


def function_form(f: Jet) -> FormJet:
    return _form(f.dim, 0, f.trunc, {(): f}, f.reliable)


def coordinate_form(dim: int, trunc: int, i: int) -> FormJet:
    """dx_i (1-based)"""
    return _form(dim, 1, trunc, {(i - 1,): constant(dim, trunc, 1)}, trunc)


def from_jet_differential(f: Jet) -> FormJet:
    """df"""
    return exterior_d(function_form(f))


# --- exterior calculus ---

def exterior_d(omega: FormJet) -> FormJet:
    """
    Exterior derivative; reliable order drops by one

    Raises:
        TopDegree: degree == dim
    """
    if omega.degree >= omega.dim:
        raise TopDegree(f"d of a {omega.degree}-form in dimension {omega.dim}")
    out: Dict[Indices, Jet] = {}
    reliable = omega.reliable - 1
    if reliable < 0:
        raise PrecisionExhausted("cannot differentiate a form with reliable order 0")
    for key, f in omega.coeffs.items():
        for i in range(omega.dim):
            if i in key:
                continue
            part = differentiate(f, i + 1)
            if part.is_zero():
                reliable = min(reliable, part.reliable)
                continue
            new = tuple(sorted(key + (i,)))
            if _merge_sign((i,), key) < 0:
                part = scale(part, -1)
            out[new] = add(out[new], part) if new in out else part
    return _form(omega.dim, omega.degree + 1, omega.trunc, out, reliable)


def wedge(alpha: FormJet, beta: FormJet) -> FormJet:
    """
    Exterior product

    Raises:
        DegreeOverflow: degree alpha + degree beta > dim
    """
    _check_forms(alpha, beta)
    degree = alpha.degree + beta.degree
    if degree > alpha.dim:
        raise DegreeOverflow(f"{alpha.degree}-form ^ {beta.degree}-form in dimension {alpha.dim}")
    out: Dict[Indices, Jet] = {}
    reliable = min(alpha.reliable, beta.reliable)
    for I, f in alpha.coeffs.items():
        for J, g in beta.coeffs.items():
            if set(I) & set(J):
                continue
            term = mul(f, g)
            if _merge_sign(I, J) < 0:
                term = scale(term, -1)
            key = tuple(sorted(I + J))
            out[key] = add(out[key], term) if key in out else term
            reliable = min(reliable, term.reliable)
    return _form(alpha.dim, degree, alpha.trunc, out, reliable)


def contract(X: VectorFieldJet, omega: FormJet) -> FormJet:
    """
    Interior product i_X omega

    i_X dx_I = sum_r (-1)^r X_{i_r} dx_{I minus i_r}
    """
    if omega.degree == 0:
        raise DegreeZero("contraction of a 0-form")
    if X.dim != omega.dim:
        raise DimensionMismatch(f"field dim {X.dim} vs form dim {omega.dim}")
    if X.trunc != omega.trunc:
        raise TruncMismatch(f"field trunc {X.trunc} vs form trunc {omega.trunc}")
    out: Dict[Indices, Jet] = {}
    reliable = min(omega.reliable, X.reliable)
    for key, f in omega.coeffs.items():
        for r, i in enumerate(key):
            term = mul(X[i], f)
            if r % 2:
                term = scale(term, -1)
            rest = key[:r] + key[r + 1:]
            out[rest] = add(out[rest], term) if rest in out else term
            reliable = min(reliable, term.reliable)
    return _form(omega.dim, omega.degree - 1, omega.trunc, out, reliable)


def dual_field_dim2(omega: FormJet) -> VectorFieldJet:
    """The field X with i_X (dx1 ^ dx2) = omega: X1 = omega_2, X2 = -omega_1"""
    if omega.dim != 2 or omega.degree != 1:
        raise DimensionMismatch(f"planar 1-forms only, got a {omega.degree}-form in dimension {omega.dim}")
    return vector_field([omega.coefficient((1,)), scale(omega.coefficient((0,)), -1)])


def is_integrable(omega: FormJet) -> bool:
    """omega ^ d omega = 0 within the reliable order (always true in dimension <= 2)"""
    if omega.degree != 1:
        raise BadParameter(f"integrability is tested on 1-forms, got degree {omega.degree}")
    if omega.dim <= 2:
        return True
    return wedge(omega, exterior_d(omega)).is_zero_within_reliable()


def pullback(F: Sequence[Jet], omega: FormJet) -> FormJet:
    """
    F^* omega for F: source -> target with target coordinates F_1..F_m

    Coefficients are substituted along F and each dx_i becomes dF_i.
    """
    if len(F) != omega.dim:
        raise DimensionMismatch(f"{len(F)} component map into dimension {omega.dim}")
    for f in F:
        check_compatible(F[0], f)
        if f.constant_term() != 0:
            raise NonzeroConstantTerm("pullback map must vanish at 0")
    src_dim, trunc = F[0].dim, F[0].trunc
    differentials = [from_jet_differential(f) for f in F]
    reliable = min([omega.reliable] + [f.reliable for f in F])
    total = zero_form(src_dim, omega.degree, trunc).with_reliable(reliable)
    for key, coeff in omega.coeffs.items():
        term = function_form(substitute(coeff, F))
        for i in key:
            term = wedge(term, differentials[i])
        total = total + term
    return total


# --- meromorphic and logarithmic forms ---

@dataclass(frozen=True)
class MeromorphicFormJet:
    """numerator / denominator with a 1-form numerator and a nonzero function denominator"""
    numerator: FormJet
    denominator: Jet

    def __post_init__(self):
        if self.numerator.degree != 1:
            raise BadParameter(f"numerator must be a 1-form, got degree {self.numerator.degree}")
        if self.numerator.dim != self.denominator.dim:
            raise DimensionMismatch(f"numerator dim {self.numerator.dim} vs denominator dim {self.denominator.dim}")
        if self.denominator.is_zero_within_reliable():
            raise ZeroWithinReliable("denominator vanishes up to its reliable order")

    def pretty(self) -> str:
        return f"[{self.numerator.pretty()}] / ({self.denominator.pretty()})"


@dataclass(frozen=True)
class LogSpec:
    """
    Data of sum l_i df_i/f_i + sum (a_j dN_j/N_j + b_j (P_j dQ_j - Q_j dP_j)/N_j) + d(H/G)

    N_j = P_j^2 + Q_j^2 and G = prod f_i^n_i prod N_j^m_j with the exponent
    vector listing n_i for the real factors, then m_j for the pairs.
    """
    real_factors: Tuple[Tuple[Jet, Fraction], ...] = ()
    pair_factors: Tuple[Tuple[Jet, Jet, Fraction, Fraction], ...] = ()
    ham: Optional[Tuple[Jet, Tuple[int, ...]]] = None

    def jets(self) -> List[Jet]:
        out = [f for f, _ in self.real_factors]
        for P, Q, _, _ in self.pair_factors:
            out.extend([P, Q])
        if self.ham is not None:
            out.append(self.ham[0])
        return out


def _product(jets: Sequence[Jet], dim: int, trunc: int) -> Jet:
    result = constant(dim, trunc, 1)
    for f in jets:
        result = mul(result, f)
    return result


def log_synthesize(spec: LogSpec) -> MeromorphicFormJet:
    """
    Assemble the logarithmic form of `spec` over its cleared denominator

    D = G prod f_i prod N_j; every term is multiplied out so the numerator
    is a polynomial-jet 1-form.
    """
    jets = spec.jets()
    if not jets:
        raise BadParameter("a logarithmic form needs at least one factor")
    for f in jets:
        check_compatible(jets[0], f)
    for f, _ in spec.real_factors:
        if f.constant_term() != 0:
            raise NonzeroConstantTerm("factors must vanish at 0")
    for P, Q, _, _ in spec.pair_factors:
        if P.constant_term() != 0 or Q.constant_term() != 0:
            raise NonzeroConstantTerm("pair factors must vanish at 0")
    dim, trunc = jets[0].dim, jets[0].trunc

    reals = [f for f, _ in spec.real_factors]
    norms = [add(mul(P, P), mul(Q, Q)) for P, Q, _, _ in spec.pair_factors]
    poles = reals + norms
    exponents: Tuple[int, ...] = ()
    if spec.ham is not None:
        exponents = tuple(spec.ham[1])
        if len(exponents) != len(poles):
            raise BadParameter(f"{len(exponents)} exponents for {len(poles)} factors")
        if any(e < 0 for e in exponents):
            raise BadParameter("exponents must be non-negative")
    G = _product([power(f, e) for f, e in zip(poles, exponents)], dim, trunc)

    def others(k: int) -> Jet:
        return _product(poles[:k] + poles[k + 1:], dim, trunc)

    numerator = zero_form(dim, 1, trunc)
    for k, (f, lam) in enumerate(spec.real_factors):
        numerator = numerator + from_jet_differential(f).times(mul(G, others(k))).scale(as_rational(lam))
    for j, (P, Q, a, b) in enumerate(spec.pair_factors):
        k = len(reals) + j
        weight = mul(G, others(k))
        numerator = numerator + from_jet_differential(norms[j]).times(weight).scale(as_rational(a))
        rotation = from_jet_differential(Q).times(P) - from_jet_differential(P).times(Q)
        numerator = numerator + rotation.times(weight).scale(as_rational(b))
    if spec.ham is not None:
        H = spec.ham[0]
        numerator = numerator + from_jet_differential(H).times(_product(poles, dim, trunc))
        for k, e in enumerate(exponents):
            if e:
                numerator = numerator - from_jet_differential(poles[k]).times(mul(H, others(k))).scale(e)
    denominator = mul(G, _product(poles, dim, trunc))
    log(f"Logarithmic form with {len(reals)} real and {len(norms)} pair factor(s)")
    return MeromorphicFormJet(numerator, denominator)


def closedness_defect(omega: MeromorphicFormJet) -> FormJet:
    """D dTheta - dD ^ Theta, zero exactly when Theta / D is closed"""
    theta, D = omega.numerator, omega.denominator
    return wedge(function_form(D), exterior_d(theta)) - wedge(from_jet_differential(D), theta)


def is_closed(omega: MeromorphicFormJet) -> bool:
    if omega.numerator.dim < 2:
        return True
    return closedness_defect(omega).is_zero_within_reliable()


def _is_constant(g: Jet) -> bool:
    return all(sum(m) == 0 for m in g.coeffs)


def residue_extract(omega: MeromorphicFormJet, factors: Sequence[Jet]) -> List[Fraction]:
    """
    Residues l_i of a closed form with simple poles along the given factors

    l_i is fixed by Theta = l_i (D/f_i) df_i modulo f_i componentwise, read
    off series remainders (remainders are linear in the dividend).

    Raises:
        NotClosed, NonCoprimeFactors, NotSimplePole
    """
    if not factors:
        raise BadParameter("no pole factors given")
    theta, D = omega.numerator, omega.denominator
    if not is_closed(omega):
        raise NotClosed(message="meromorphic form is not closed")
    for i, j in combinations(range(len(factors)), 2):
        if not _is_constant(gcd_poly(factors[i], factors[j])):
            raise NonCoprimeFactors(f"factors {i + 1} and {j + 1} share a common divisor")
    for i, f in enumerate(factors):
        g = f
        for k in range(f.dim):
            g = gcd_poly(g, differentiate(f, k + 1).with_trunc(f.trunc))
        if not _is_constant(g):
            raise NotSimplePole(f"factor {i + 1} is not reduced")

    product = _product(factors, D.dim, D.trunc)
    if product.is_zero():
        raise NotSimplePole("product of the factors vanishes at this truncation")
    lead, lead_c = product.terms()[0]
    unit = D.coefficient(lead) / lead_c
    if unit == 0 or not _agree_jets(D, scale(product, unit)):
        raise NotSimplePole("denominator is not the product of the given factors")

    residues = []
    for i, f in enumerate(factors):
        cofactor = scale(_product(list(factors[:i]) + list(factors[i + 1:]), D.dim, D.trunc), unit)
        lam = None
        pairs = []
        for k in range(theta.dim):
            _, r_theta = series_divmod(theta.coefficient((k,)), f)
            _, r_pole = series_divmod(mul(cofactor, differentiate(f, k + 1)), f)
            pairs.append((r_theta, r_pole))
            if lam is None:
                for m, c in r_pole.terms():
                    if sum(m) <= r_pole.reliable and c:
                        lam = r_theta.coefficient(m) / c
                        break
        if lam is None:
            raise NotSimplePole(f"no pole along factor {i + 1}")
        for r_theta, r_pole in pairs:
            if not add(r_theta, scale(r_pole, -lam)).is_zero_within_reliable():
                raise NotSimplePole(f"pole along factor {i + 1} is not logarithmic")
        residues.append(lam)

    holomorphic = theta
    for i, (f, lam) in enumerate(zip(factors, residues)):
        cofactor = scale(_product(list(factors[:i]) + list(factors[i + 1:]), D.dim, D.trunc), unit)
        holomorphic = holomorphic - from_jet_differential(f).times(cofactor).scale(lam)
    try:
        for coeff in holomorphic.coeffs.values():
            divide_exact(coeff, D)
    except NotDivisible:
        raise NotSimplePole("form minus its logarithmic part still has a pole")
    log(f"Residues: {[str(c) for c in residues]}")
    return residues


def _agree_jets(a: Jet, b: Jet) -> bool:
    return add(a, scale(b, -1)).is_zero_within_reliable()


# --- curves and separatrices ---

@dataclass(frozen=True)
class CurveJet:
    """Formal parametrized curve t -> (gamma_1(t), ..., gamma_n(t)) through 0"""
    components: Tuple[Jet, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise DimensionMismatch("a curve needs at least one component")
        for c in comps:
            check_compatible(comps[0], c)
            if c.dim != 1:
                raise DimensionMismatch(f"curve components are one-variable jets, got dim {c.dim}")
            if c.constant_term() != 0:
                raise NonzeroConstantTerm("curve must pass through 0")
        reliable = min(c.reliable for c in comps)
        object.__setattr__(self, 'components', tuple(c.with_reliable(reliable) for c in comps))

    @property
    def dim(self) -> int:
        return len(self.components)

    @property
    def trunc(self) -> int:
        return self.components[0].trunc

    @property
    def reliable(self) -> int:
        return self.components[0].reliable

    def is_trivial(self) -> bool:
        return all(c.is_zero_within_reliable() for c in self.components)

    def pretty(self) -> str:
        return '(' + ', '.join(c.pretty() for c in self.components) + ')'


def curve_substitute(f: Jet, gamma: CurveJet) -> Jet:
    """f(gamma(t)) as a one-variable jet"""
    if f.dim != gamma.dim:
        raise DimensionMismatch(f"function dim {f.dim} vs curve dim {gamma.dim}")
    return substitute(f, gamma.components)


def curve_pullback(omega: FormJet, gamma: CurveJet) -> Jet:
    """a(t) with gamma^* omega = a(t) dt"""
    if omega.degree != 1:
        raise BadParameter(f"curves pull back 1-forms, got degree {omega.degree}")
    if omega.dim != gamma.dim:
        raise DimensionMismatch(f"form dim {omega.dim} vs curve dim {gamma.dim}")
    total = zero_jet(1, gamma.trunc)
    for k in range(omega.dim):
        coeff = omega.coefficient((k,))
        if coeff.is_zero():
            continue
        total = add(total, mul(curve_substitute(coeff, gamma), differentiate(gamma.components[k], 1)))
    return total.with_reliable(min(gamma.reliable - 1, omega.reliable))


def _form_linear_part(omega: FormJet) -> List[List[Fraction]]:
    """L with omega_k = sum_l L[k][l] x_l + higher order"""
    n = omega.dim
    return [[omega.coefficient((k,)).coefficient(tuple(int(i == l) for i in range(n))) for l in range(n)]
            for k in range(n)]


def find_separatrix(omega: FormJet, direction: Sequence, upto: int) -> Optional[CurveJet]:
    """
    Smooth formal curve gamma(t) = t v + sum_k c_k t^k with gamma^* omega = 0

    c_k is kept orthogonal to v (the reparametrization gauge); each order is a
    single linear equation in the remaining scalar. Returns None when an order
    is obstructed.

    Raises:
        ZeroDirection, DegenerateLinearPart
    """
    if omega.dim != 2 or omega.degree != 1:
        raise DimensionMismatch(f"planar 1-forms only, got a {omega.degree}-form in dimension {omega.dim}")
    v = [as_rational(c) for c in direction]
    if len(v) != 2:
        raise DimensionMismatch(f"direction must have 2 entries, got {len(v)}")
    if not any(v):
        raise ZeroDirection("direction is the zero vector")
    if any(omega.coefficient((k,)).constant_term() for k in range(2)):
        raise NonSingularityViolated("form does not vanish at the origin")
    L = _form_linear_part(omega)
    if not any(c for row in L for c in row):
        raise DegenerateLinearPart("linear part of the form is zero")

    if sum(v[k] * sum(L[k][l] * v[l] for l in range(2)) for k in range(2)) != 0:
        log("Order 1 obstructs the direction")
        return None

    trunc = upto + 1
    w = [-v[1], v[0]]
    coeffs: List[List[Fraction]] = [[Fraction(0), Fraction(0)] for _ in range(trunc + 1)]
    coeffs[1] = v

    def curve(extra: Optional[Tuple[int, Fraction]] = None) -> CurveJet:
        comps = []
        for i in range(2):
            terms = [((k,), coeffs[k][i]) for k in range(1, trunc + 1)]
            if extra is not None:
                k, s = extra
                terms.append(((k,), s * w[i]))
            comps.append(make_jet(1, trunc, terms))
        return CurveJet(tuple(comps))

    top = min(upto, curve_pullback(omega, curve()).reliable)
    log(f"Separatrix search along {[str(c) for c in v]} up to order {top}")
    for k in range(2, top + 1):
        base = curve_pullback(omega, curve()).coefficient((k,))
        slope = curve_pullback(omega, curve((k, Fraction(1)))).coefficient((k,)) - base
        if slope == 0:
            if base != 0:
                log(f"⚠️  order {k} is obstructed")
                return None
            continue
        s = -base / slope
        coeffs[k] = [s * w[0], s * w[1]]
    gamma = curve()
    residual = curve_pullback(omega, gamma)
    if not residual.truncated(top).is_zero():
        log(f"❌ pullback does not vanish up to order {top}")
        return None
    return gamma
