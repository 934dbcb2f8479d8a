"""
CLI - Batch front end for the jet engine
Usage: python -m src.cli <jet|field|resonance|normalize|algebra|forms> --dim N --trunc N [options]

Exit codes: 0 success, 1 usage error, 2 domain error (one `error:` line on stderr).
"""

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from src import fields, jets, liealg, normalform, oneforms, resonance, runlog, settings
from src.errors import DimensionMismatch, JetError, ParseError, TruncMismatch
from src.fields import DiffeoJet, VectorFieldJet
from src.jets import Jet, format_rational
from src.literals import (
    Value, format_value, parse_as, parse_many, parse_rational, parse_rational_list, read_literals, to_json,
)
from src.oneforms import CurveJet, FormJet, LogSpec, MeromorphicFormJet

Report = List[Tuple[str, object]]


class UsageError(Exception):
    """Bad or missing flag; exit code 1"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class Session:
    """Ambient dim/trunc shared by every object in one invocation"""
    dim: int
    trunc: Optional[int]
    version: str = settings.FORMAT_VERSION

    def check(self, value: Value) -> Value:
        if isinstance(value, MeromorphicFormJet):
            self.check(value.numerator)
            self.check(value.denominator)
            return value
        if isinstance(value, CurveJet):
            if value.dim != self.dim:
                raise DimensionMismatch(f"curve has {value.dim} components, session dim is {self.dim}")
            return value
        if value.dim != self.dim:
            raise DimensionMismatch(f"object dim {value.dim}, session dim {self.dim}")
        if self.trunc is not None and value.trunc != self.trunc:
            raise TruncMismatch(f"object trunc {value.trunc}, session trunc {self.trunc}")
        return value


# --- rendering ---

def _text(value) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if value is None:
        return 'none'
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, (list, tuple)):
        return '[' + ', '.join(_text(v) for v in value) + ']'
    if isinstance(value, (int, str)):
        return str(value)
    return format_value(value)


def _json(value):
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, (list, tuple)):
        return [_json(v) for v in value]
    return to_json(value)


def render(command: str, report: Report, out: str) -> str:
    """Text: header line then `key: value` lines. JSON: one object with the same keys under `result`"""
    if out == 'json':
        return json.dumps({'format': settings.FORMAT_VERSION, 'command': command,
                           'result': {k: _json(v) for k, v in report}}, sort_keys=False)
    lines = [f"# {settings.FORMAT_VERSION} {command}"]
    lines.extend(f"{k}: {_text(v)}" for k, v in report)
    return '\n'.join(lines)


# --- argument helpers ---

def _need(args, name: str):
    value = getattr(args, name.replace('-', '_'))
    if value is None:
        raise UsageError(f"--{name} is required for --op {args.op}")
    return value


def _literal(session: Session, args, name: str, kind: type) -> Value:
    return session.check(parse_as(_need(args, name), kind))


def _literal_file(session: Session, args, name: str, kind: type) -> List[Value]:
    values = read_literals(_need(args, name))
    for v in values:
        if not isinstance(v, kind):
            raise ParseError(f"{args.__dict__[name.replace('-', '_')]}: expected {kind.__name__} literals")
        session.check(v)
    if not values:
        raise ParseError(f"no literals in {_need(args, name)}")
    return values


def _int_pair(text: str, flag: str) -> Tuple[int, int]:
    try:
        p, q = (int(part) for part in text.split(','))
    except ValueError:
        raise UsageError(f"--{flag} expects two integers like 1,2")
    return p, q


def _word(text: str) -> Tuple[Tuple[int, int], ...]:
    """'1,-2,1' -> ((1, 1), (2, -1), (1, 1))"""
    out = []
    for part in text.split(','):
        try:
            k = int(part)
        except ValueError:
            raise UsageError(f"--word entries must be nonzero integers, got {part!r}")
        if k == 0:
            raise UsageError("--word entries must be nonzero")
        out.append((abs(k), 1 if k > 0 else -1))
    return tuple(out)


def _matrix_rows(M) -> List[List[Fraction]]:
    return [list(row) for row in M]


# --- subcommands ---

def cmd_jet(args, session: Session) -> Report:
    a = _literal(session, args, 'a', Jet)
    op = args.op
    if op == 'parse':
        return [('jet', a)]
    if op == 'add':
        return [('jet', jets.add(a, _literal(session, args, 'b', Jet)))]
    if op == 'mul':
        return [('jet', jets.mul(a, _literal(session, args, 'b', Jet)))]
    if op == 'scale':
        return [('jet', jets.scale(a, parse_rational(_need(args, 'c'))))]
    if op == 'diff':
        return [('jet', jets.differentiate(a, _need(args, 'var')))]
    if op == 'subst':
        values = read_literals(_need(args, 'args'))
        if not all(isinstance(v, Jet) for v in values):
            raise ParseError("--args file must hold jet literals")
        return [('jet', jets.substitute(a, values))]
    if op == 'invert':
        return [('jet', jets.invert_unit(a))]
    if op == 'divide':
        q, r = jets.series_divmod(a, _literal(session, args, 'b', Jet))
        return [('quotient', q), ('remainder', r)]
    if op == 'gcd':
        return [('gcd', jets.gcd_poly(a, _literal(session, args, 'b', Jet)))]
    raise UsageError(f"unknown jet op {op}")


def cmd_field(args, session: Session) -> Report:
    op = args.op
    if op == 'parse':
        return [('field', _literal(session, args, 'x', VectorFieldJet))]
    if op == 'apply':
        return [('jet', fields.apply(_literal(session, args, 'x', VectorFieldJet), _literal(session, args, 'f', Jet)))]
    if op == 'bracket':
        return [('field', fields.bracket(_literal(session, args, 'x', VectorFieldJet),
                                         _literal(session, args, 'y', VectorFieldJet)))]
    if op == 'linear':
        return [('linear_part', _matrix_rows(fields.linear_part(_literal(session, args, 'x', VectorFieldJet))))]
    if op == 'order':
        return [('order', fields.vanishing_order(_literal(session, args, 'x', VectorFieldJet)))]
    if op == 'compose':
        return [('diffeo', fields.compose(_literal(session, args, 'phi', DiffeoJet),
                                          _literal(session, args, 'psi', DiffeoJet)))]
    if op == 'inverse':
        return [('diffeo', fields.inverse(_literal(session, args, 'phi', DiffeoJet)))]
    if op == 'pushforward':
        return [('field', fields.pushforward(_literal(session, args, 'phi', DiffeoJet),
                                             _literal(session, args, 'x', VectorFieldJet)))]
    if op == 'word':
        gens = _literal_file(session, args, 'gens', DiffeoJet)
        word = fields.reduce_word(_word(_need(args, 'word')))
        result = fields.evaluate_word(word, gens)
        return [('word', [i * e for i, e in word]), ('diffeo', result), ('identity', result.is_identity())]
    if op == 'bochner':
        phi = _literal(session, args, 'phi', DiffeoJet)
        h = fields.bochner_linearize(phi, _need(args, 'period'))
        return [('conjugator', h)]
    raise UsageError(f"unknown field op {op}")


def cmd_resonance(args, session: Session) -> Report:
    lam = parse_rational_list(_need(args, 'lambda'))
    if len(lam) != session.dim:
        raise UsageError(f"--lambda has {len(lam)} entries, --dim is {session.dim}")
    if args.fiber is not None:
        p, q = _int_pair(args.fiber, 'fiber')
        base, step = resonance.fiber_decomposition(p, q, parse_rational(_need(args, 'mu')))
        return [('base', list(base)), ('step', list(step))]
    if args.mu is None:
        return [('nonresonant', resonance.is_nonresonant(lam))]
    result = resonance.resonant_set(resonance.ResonanceQuery(tuple(lam), parse_rational(args.mu), args.bound))
    report: Report = [('finiteness', result.finiteness.value)]
    if result.generator is not None:
        report.append(('generator', [list(result.generator[0]), list(result.generator[1])]))
    report.append(('solutions', [list(m) for m in result.solutions]))
    return report


def _removed_report(removed) -> List[str]:
    return [f"{d}:({' '.join(str(e) for e in m)}):{j}" for d, m, j in removed]


def cmd_normalize(args, session: Session) -> Report:
    X = _literal(session, args, 'field', VectorFieldJet)
    upto = args.upto if args.upto is not None else settings.DEFAULT_UPTO
    if args.mode == 'jordan':
        pair = normalform.jordan_decompose(X, upto)
        return [('semisimple', pair.S), ('nilpotent', pair.N)]
    if args.mode == 'linearize':
        result = normalform.linearize_nonresonant(X, upto)
    else:
        result = normalform.poincare_dulac_normalize(X, upto)
    return [('normal', result.normal), ('conjugator', result.conjugator),
            ('removed', _removed_report(result.removed))]


def _params(tag: liealg.ClassificationTag) -> List[str]:
    out = []
    for k, v in tag.parameters.items():
        if k == 'a_hat':
            out.append(f"a_hat=[{', '.join(f'{e}:{format_rational(Fraction(c))}' for e, c in v)}]")
        else:
            out.append(f"{k}={_text(v)}")
    return out


def cmd_algebra(args, session: Session) -> Report:
    gens = _literal_file(session, args, 'gens', VectorFieldJet)
    op = args.op
    if op == 'first-integral':
        upto = args.upto if args.upto is not None else settings.DEFAULT_UPTO
        return [('first_integral', liealg.first_integral_jet(gens[0], upto))]
    if op == 'rank':
        return [('rank', liealg.generic_rank(liealg.presentation(gens)))]
    A = liealg.closure_check(gens)
    if op == 'closure':
        n = A.size
        return [(f"bracket[{i + 1},{j + 1}]", liealg.structure_constant(A, i + 1, j + 1))
                for i in range(n) for j in range(i + 1, n)]
    if op == 'saturate':
        sat = liealg.saturate_rank1(A)
        return [('director', sat.director), ('coefficients', list(sat.coefficient_space)),
                ('saturable', sat.saturable)]
    if op == 'nilpotent':
        return [('nilpotent', liealg.is_nilpotent(A))]
    if op == 'classify':
        tag = liealg.classify_dim1(A) if A.dim == 1 else liealg.classify_abelian_rank2(A)
        return [('family', tag.family.value), ('parameters', _params(tag)), ('certificate', tag.certificate)]
    raise UsageError(f"unknown algebra op {op}")


def _log_spec(path: str, session: Session) -> LogSpec:
    """Lines: `real <l> <jet>`, `pair <a> <b> <P> <Q>`, `ham <n1,n2,...> <H>`"""
    reals, pairs, ham = [], [], None
    with open(path, encoding='utf-8') as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            kind, _, rest = line.partition(' ')
            try:
                if kind == 'real':
                    lam, _, body = rest.strip().partition(' ')
                    (g,) = parse_many(body)
                    reals.append((session.check(g), parse_rational(lam)))
                elif kind == 'pair':
                    a, b, body = rest.strip().split(' ', 2)
                    P, Q = parse_many(body)
                    pairs.append((session.check(P), session.check(Q), parse_rational(a), parse_rational(b)))
                elif kind == 'ham':
                    exps, _, body = rest.strip().partition(' ')
                    (H,) = parse_many(body)
                    ham = (session.check(H), tuple(int(e) for e in exps.split(',') if e))
                else:
                    raise ParseError(f"unknown entry {kind!r}")
            except ValueError:
                raise ParseError(f"{path}:{lineno}: malformed line")
            except ParseError as e:
                raise ParseError(f"{path}:{lineno}: {e}")
    return LogSpec(tuple(reals), tuple(pairs), ham)


def cmd_forms(args, session: Session) -> Report:
    op = args.op
    if op == 'logsynth':
        mero = oneforms.log_synthesize(_log_spec(_need(args, 'spec'), session))
        return [('form', mero), ('closed', oneforms.is_closed(mero))]
    if op == 'residues':
        mero = _literal(session, args, 'mero', MeromorphicFormJet)
        factors = _literal_file(session, args, 'factors', Jet)
        return [('residues', oneforms.residue_extract(mero, factors))]
    if op == 'pullback':
        omega = _literal(session, args, 'form', FormJet)
        F = read_literals(_need(args, 'map'))
        if len(F) != omega.dim or not all(isinstance(f, Jet) for f in F):
            raise ParseError(f"--map must hold {omega.dim} jet literals")
        return [('form', oneforms.pullback(F, omega))]
    omega = _literal(session, args, 'form', FormJet)
    if op == 'd':
        return [('form', oneforms.exterior_d(omega))]
    if op == 'wedge':
        return [('form', oneforms.wedge(omega, _literal(session, args, 'form2', FormJet)))]
    if op == 'contract':
        return [('form', oneforms.contract(_literal(session, args, 'field', VectorFieldJet), omega))]
    if op == 'dual':
        return [('field', oneforms.dual_field_dim2(omega))]
    if op == 'integrable':
        return [('integrable', oneforms.is_integrable(omega))]
    if op == 'separatrix':
        upto = args.upto if args.upto is not None else settings.SEPARATRIX_UPTO
        gamma = oneforms.find_separatrix(omega, parse_rational_list(_need(args, 'direction')), upto)
        return [('separatrix', gamma)]
    raise UsageError(f"unknown forms op {op}")


COMMANDS = {
    'jet': cmd_jet,
    'field': cmd_field,
    'resonance': cmd_resonance,
    'normalize': cmd_normalize,
    'algebra': cmd_algebra,
    'forms': cmd_forms,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='jetcalc', description='Exact jet-level computations with formal vector fields and forms')
    parser.add_argument('--out', choices=['text', 'json'], default=None,
                        help='Output encoding (default: JETCALC_OUTPUT or text)')
    parser.add_argument('--verbose', action='store_true', help='Echo the run log to stderr')
    parser.add_argument('--log-file', default=None, help='Append the run log to this file')
    sub = parser.add_subparsers(dest='command', parser_class=_Parser)

    def common(p, trunc_required=True):
        p.add_argument('--dim', type=int, required=True, help='Ambient dimension')
        p.add_argument('--trunc', type=int, required=trunc_required, help='Truncation order')

    p = sub.add_parser('jet', help='Jet arithmetic')
    common(p)
    p.add_argument('--op', required=True, choices=['parse', 'add', 'mul', 'scale', 'diff', 'subst',
                                                   'invert', 'divide', 'gcd'])
    p.add_argument('--a', help='Jet literal')
    p.add_argument('--b', help='Second jet literal')
    p.add_argument('--c', help='Rational scalar')
    p.add_argument('--var', type=int, help='Variable index (1-based)')
    p.add_argument('--args', help='File of jet literals to substitute')

    p = sub.add_parser('field', help='Vector fields and diffeomorphisms')
    common(p)
    p.add_argument('--op', required=True, choices=['parse', 'apply', 'bracket', 'linear', 'order', 'compose',
                                                   'inverse', 'pushforward', 'word', 'bochner'])
    p.add_argument('--x', help='Vector field literal')
    p.add_argument('--y', help='Second vector field literal')
    p.add_argument('--f', help='Jet literal')
    p.add_argument('--phi', help='Diffeomorphism literal')
    p.add_argument('--psi', help='Second diffeomorphism literal')
    p.add_argument('--gens', help='File of diffeomorphism literals')
    p.add_argument('--word', help='Signed generator indices, e.g. 1,2,-1,-2')
    p.add_argument('--period', type=int, help='Period of the diffeomorphism')

    p = sub.add_parser('resonance', help='Resonance relations between eigenvalues')
    common(p, trunc_required=False)
    p.add_argument('--lambda', required=True, help='Eigenvalues, e.g. 1,-1')
    p.add_argument('--mu', help='Target value (omit for the nonresonance test)')
    p.add_argument('--bound', type=int, help='Exponent bound')
    p.add_argument('--fiber', help='Coprime lattice step p,q')

    p = sub.add_parser('normalize', help='Normal forms')
    common(p)
    p.add_argument('--field', required=True, help='Vector field literal')
    p.add_argument('--upto', type=int, help='Degree bound (default: JETCALC_DEFAULT_UPTO)')
    p.add_argument('--mode', choices=['dulac', 'linearize', 'jordan'], default='dulac')

    p = sub.add_parser('algebra', help='Lie algebras of vector fields')
    common(p)
    p.add_argument('--gens', required=True, help='File of vector field literals')
    p.add_argument('--op', required=True, choices=['closure', 'rank', 'saturate', 'nilpotent', 'classify',
                                                   'first-integral'])
    p.add_argument('--upto', type=int, help='Degree bound for first integrals')

    p = sub.add_parser('forms', help='Differential forms')
    common(p)
    p.add_argument('--op', required=True, choices=['d', 'wedge', 'contract', 'dual', 'integrable', 'pullback',
                                                   'logsynth', 'residues', 'separatrix'])
    p.add_argument('--form', help='Form literal')
    p.add_argument('--form2', help='Second form literal')
    p.add_argument('--field', help='Vector field literal')
    p.add_argument('--map', help='File of jet literals (components of the map)')
    p.add_argument('--mero', help='Meromorphic form literal')
    p.add_argument('--factors', help='File of pole factor jet literals')
    p.add_argument('--spec', help='Logarithmic form description file')
    p.add_argument('--direction', help='Tangent direction, e.g. 1,0')
    p.add_argument('--upto', type=int, help='Order bound (default: JETCALC_SEPARATRIX_UPTO)')
    return parser


def run(argv: Sequence[str], stdout=None, stderr=None) -> int:
    """Execute one invocation; returns the exit code"""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
        if args.command is None:
            raise UsageError("a subcommand is required")
        if args.dim < 1:
            raise UsageError("--dim must be positive")
        if args.trunc is not None and args.trunc < 0:
            raise UsageError("--trunc must be non-negative")
        runlog.configure(verbose=args.verbose or None, log_file=args.log_file)
        session = Session(args.dim, args.trunc)
        runlog.log(f"Running {args.command} {getattr(args, 'op', '')}".rstrip())
        report = COMMANDS[args.command](args, session)
    except UsageError as e:
        print(f"usage error: {e}", file=stderr)
        return 1
    except JetError as e:
        runlog.log(f"❌ {type(e).__name__}: {e}")
        print(f"error: {type(e).__name__}: {e}", file=stderr)
        return 2
    except OSError as e:
        print(f"usage error: {e}", file=stderr)
        return 1
    out = args.out or settings.OUTPUT_FORMAT
    print(render(args.command, report, out), file=stdout)
    return 0


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
