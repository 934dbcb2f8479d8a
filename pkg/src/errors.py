"""
Errors - Exception hierarchy for jet computations
Every domain error raised by the package derives from JetError so the CLI can
map it to exit code 2 and print the class name on one line
"""

from typing import Optional, Tuple


class JetError(Exception):
    """Base class for all domain errors"""
    pass


# --- jets ---

class DimensionMismatch(JetError):
    """Operands live in different ambient dimensions"""
    pass


class TruncMismatch(JetError):
    """Operands carry different truncation orders"""
    pass


class DegreeOverflow(JetError):
    """A term or form degree exceeds what the container can hold"""
    pass


class BadIndex(JetError):
    """Variable index out of range"""
    pass


class NonzeroConstantTerm(JetError):
    """Substitution argument does not vanish at the origin"""
    pass


class NotAUnit(JetError):
    """Jet has zero constant term and cannot be inverted"""
    pass


class NotDivisible(JetError):
    """Exact division left a nonzero remainder within the reliable range"""
    pass


class UnsupportedDimension(JetError):
    """Operation is only implemented for small ambient dimensions"""
    pass


class PrecisionExhausted(JetError):
    """Reliable order would drop below zero"""
    pass


# --- fields ---

class NonSingularityViolated(JetError):
    """Vector field has a nonzero constant component"""
    pass


class ZeroWithinReliable(JetError):
    """Object has no nonzero coefficient up to its reliable order"""
    pass


class SingularLinearPart(JetError):
    """Diffeomorphism jet has a non-invertible linear part"""
    pass


class NotPeriodic(JetError):
    """f composed m times is not the identity within reliable order"""
    pass


# --- resonance ---

class ZeroPair(JetError):
    """All eigenvalues vanish"""
    pass


class EmptyFiber(JetError):
    """No admissible multidegree solves the lattice equation"""
    pass


class NotCoprime(JetError):
    """Lattice step (p, q) is not a primitive vector"""
    pass


class BadParameter(JetError):
    """Scalar argument outside its admissible range"""
    pass


# --- normalform ---

class IrrationalSpectrum(JetError):
    """Eigenvalues are irrational and not a planar complex pair"""
    pass


class NotDiagonal(JetError):
    """Semisimple part is not a diagonal linear field"""
    pass


class NotHomogeneous(JetError):
    """Term is not homogeneous of a single degree >= 2"""
    pass


class DegreeBoundTooSmall(JetError):
    """Normalization bound below 2"""
    pass


class ResonantSpectrum(JetError):
    """Linearization requested for a resonant linear part"""
    pass


class Unclassified(JetError):
    """Input falls outside the implemented normal-form list"""
    pass


# --- liealg ---

class NotClosed(JetError):
    """Bracket of two generators leaves their span, or a form is not closed"""

    def __init__(self, i: Optional[int] = None, j: Optional[int] = None, residual=None,
                 message: Optional[str] = None):
        self.i = i
        self.j = j
        self.residual = residual
        if message is None:
            message = f"[g{i + 1}, g{j + 1}] is not in the span"
        super().__init__(message)


class DependentGenerators(JetError):
    """Generators are linearly dependent over Q"""
    pass


class NotRank1(JetError):
    """Saturation requested for an algebra of generic rank != 1"""
    pass


class GcdUnsupported(JetError):
    """Componentwise gcd needs ambient dimension <= 2"""
    pass


class StarConditionFails(JetError):
    """Coefficient space violates f X(g) - g X(f) in E"""

    def __init__(self, pair: Tuple[int, int], residual=None):
        self.pair = pair
        self.residual = residual
        super().__init__(f"condition fails on coefficient pair {pair}")


class NotInvariant(JetError):
    """X(f_i) is not in the span of E"""

    def __init__(self, i: int, residual=None):
        self.i = i
        self.residual = residual
        super().__init__(f"X(f{i + 1}) leaves the span")


class Unclassifiable(JetError):
    """Presentation matches none of the known families"""
    pass


class NotAbelian(JetError):
    """Some structure constant is nonzero"""
    pass


class NotRank2(JetError):
    """Generic rank is not 2"""
    pass


class NilpotentPencil(JetError):
    """Every generator has a nilpotent linear part"""
    pass


class ConsistencyError(JetError):
    """Two independent computations of the same quantity disagree"""
    pass


# --- oneforms ---

class TopDegree(JetError):
    """Exterior derivative of a top-degree form"""
    pass


class DegreeZero(JetError):
    """Contraction of a 0-form"""
    pass


class NotSimplePole(JetError):
    """Form has a pole of order > 1 or an unlisted pole"""
    pass


class NonCoprimeFactors(JetError):
    """Pole factors share a common divisor"""
    pass


class ZeroDirection(JetError):
    """Separatrix direction is the zero vector"""
    pass


class DegenerateLinearPart(JetError):
    """Form has zero linear part, every direction is obstructed"""
    pass


# --- literals ---

class ParseError(JetError):
    """Malformed object literal"""

    def __init__(self, message: str, position: Optional[int] = None):
        self.position = position
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)
