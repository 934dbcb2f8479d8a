"""
Literals - Textual and JSON codecs for every object the CLI reads or prints
Grammar reference: docs/setup/LITERALS.md
"""

import json
import re
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

import pyparsing as pp

from src.errors import JetError, ParseError
from src.fields import DiffeoJet, VectorFieldJet
from src.jets import Jet, format_rational, make_jet
from src.oneforms import CurveJet, FormJet, MeromorphicFormJet, make_form, zero_form

Value = Union[Jet, VectorFieldJet, DiffeoJet, FormJet, MeromorphicFormJet, CurveJet]

_RATIONAL = re.compile(r'-?\d+(?:/\d+)?')
_SCALARS = ('dim', 'trunc', 'reliable')


def parse_rational(text: str) -> Fraction:
    """'3/2', '-1', '0' -> Fraction; decimals are rejected so nothing inexact slips in"""
    text = text.strip()
    if not _RATIONAL.fullmatch(text):
        raise ParseError(f"not a rational: {text!r}")
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise ParseError(f"zero denominator in {text!r}")


def parse_rational_list(text: str) -> List[Fraction]:
    """Comma-separated rationals, e.g. '1,-1/2'"""
    return [parse_rational(part) for part in text.split(',') if part.strip()]


def _grammar() -> pp.ParserElement:
    """
    One object literal. Parsed values stay as nested lists of strings:
    an object is [kind, [key, value], ...], a coefficient list is
    [[[exponents], rational], ...] and a scalar is a digit string.
    """
    comma = pp.Suppress(',')
    integer = pp.Regex(r'-?\d+')
    rational = pp.Regex(r'-?\d+(?:/\d+)?')

    term = pp.Group(pp.Suppress('(') + pp.Group(pp.ZeroOrMore(integer)) + pp.Suppress(':')
                    + rational + pp.Suppress(')'))
    terms = pp.Group(pp.Suppress('[') + pp.Optional(term + pp.ZeroOrMore(comma + term)) + pp.Suppress(']'))

    obj = pp.Forward()
    key = pp.Regex(r'[A-Za-z][A-Za-z0-9_^]*') | pp.Literal('1')
    entry = pp.Group(key + pp.Suppress(pp.Literal('=') | pp.Literal(':')) + (obj | terms | integer))
    head = pp.Regex(r'(jet|vf|diffeo|form\d+|mero|curve)\{').set_parse_action(lambda t: t[0][:-1])
    obj <<= pp.Group(head + pp.Optional(entry + pp.ZeroOrMore(comma + entry)) + pp.Suppress('}'))
    return obj


_LITERAL = _grammar()
_LITERALS = pp.ZeroOrMore(_LITERAL)


def _scan(grammar: pp.ParserElement, text: str) -> List:
    try:
        return grammar.parse_string(text, parse_all=True).as_list()
    except pp.ParseException as e:
        raise ParseError(f"bad literal: {e.msg}, found {text[e.loc:e.loc + 12] or 'end of input'!r}", e.loc)


def _terms(raw) -> List[Tuple[Tuple[int, ...], Fraction]]:
    return [(tuple(int(e) for e in exps), parse_rational(c)) for exps, c in raw]


def _is_object(raw) -> bool:
    return isinstance(raw, list) and bool(raw) and isinstance(raw[0], str)


def _entries(kind: str, raw_entries: List) -> Dict:
    """Keyed values of one object, checked for duplicates and value shapes"""
    entries: Dict = {}
    for key, raw in raw_entries:
        if key in entries:
            raise ParseError(f"duplicate field {key!r} in {kind} literal")
        if key in _SCALARS:
            if not isinstance(raw, str):
                raise ParseError(f"{key!r} must be an integer in {kind} literal")
            entries[key] = int(raw)
        elif key in ('num', 'den'):
            if not _is_object(raw):
                raise ParseError(f"{key!r} must be an object literal")
            entries[key] = _value(raw)
        else:
            if isinstance(raw, str) or _is_object(raw):
                raise ParseError(f"{key!r} must be a coefficient list in {kind} literal")
            entries[key] = _terms(raw)
    return entries


def _value(raw: List) -> Value:
    kind = raw[0]
    entries = _entries(kind, raw[1:])
    try:
        return _build(kind, entries)
    except ParseError:
        raise
    except JetError as e:
        raise ParseError(f"invalid {kind} literal: {type(e).__name__}: {e}")


def _required(entries: Dict, key: str, kind: str):
    if key not in entries:
        raise ParseError(f"{kind} literal is missing {key!r}")
    return entries[key]


def _jet_from_terms(dim: int, trunc: int, terms, reliable: Optional[int]) -> Jet:
    return make_jet(dim, trunc, terms, reliable)


def _components(entries: Dict, count: int, kind: str) -> List:
    comps = []
    for i in range(1, count + 1):
        comps.append(_required(entries, f"comp{i}", kind))
    extra = [k for k in entries if k.startswith('comp') and k not in {f"comp{i}" for i in range(1, count + 1)}]
    if extra:
        raise ParseError(f"unexpected {extra[0]!r} in {kind} literal")
    return comps


def _basis_key(name: str, degree: int, dim: int) -> Tuple[int, ...]:
    if name == '1':
        key: Tuple[int, ...] = ()
    else:
        parts = name.split('^')
        if not all(re.fullmatch(r'dx\d+', p) for p in parts):
            raise ParseError(f"bad basis element {name!r}")
        key = tuple(int(p[2:]) - 1 for p in parts)
    if len(key) != degree:
        raise ParseError(f"basis element {name!r} does not have degree {degree}")
    if any(not 0 <= i < dim for i in key):
        raise ParseError(f"basis element {name!r} out of range for dimension {dim}")
    return key


def _build(kind: str, entries: Dict) -> Value:
    allowed = {'num', 'den'} if kind == 'mero' else {'dim', 'trunc', 'reliable', 'terms'}
    for key in entries:
        if key not in allowed and not key.startswith('comp') and not kind.startswith('form'):
            raise ParseError(f"unexpected field {key!r} in {kind} literal")
    reliable = entries.get('reliable')
    if kind == 'mero':
        num, den = _required(entries, 'num', kind), _required(entries, 'den', kind)
        if not isinstance(num, FormJet) or not isinstance(den, Jet):
            raise ParseError("mero literal needs num=<form1 literal> and den=<jet literal>")
        return MeromorphicFormJet(num, den)
    trunc = _required(entries, 'trunc', kind)
    if kind == 'curve':
        count = sum(1 for k in entries if k.startswith('comp'))
        comps = [_jet_from_terms(1, trunc, t, reliable) for t in _components(entries, count, kind)]
        return CurveJet(tuple(comps))
    dim = _required(entries, 'dim', kind)
    if kind == 'jet':
        return _jet_from_terms(dim, trunc, _required(entries, 'terms', kind), reliable)
    if kind in ('vf', 'diffeo'):
        comps = [_jet_from_terms(dim, trunc, t, reliable) for t in _components(entries, dim, kind)]
        return VectorFieldJet(tuple(comps)) if kind == 'vf' else DiffeoJet(tuple(comps))
    degree = int(kind[4:])
    coeffs = {}
    for name, terms in entries.items():
        if name in ('dim', 'trunc', 'reliable'):
            continue
        coeffs[_basis_key(name, degree, dim)] = _jet_from_terms(dim, trunc, terms, reliable)
    if not coeffs:
        form = zero_form(dim, degree, trunc)
        return form.with_reliable(reliable) if reliable is not None else form
    return make_form(dim, degree, coeffs)


def parse(text: str) -> Value:
    """Parse one object literal"""
    return _value(_scan(_LITERAL, text)[0])


def parse_many(text: str) -> List[Value]:
    """Consecutive literals separated by whitespace"""
    return [_value(raw) for raw in _scan(_LITERALS, text)]


def parse_as(text: str, kind: type) -> Value:
    value = parse(text)
    if not isinstance(value, kind):
        raise ParseError(f"expected a {kind.__name__} literal, got {type(value).__name__}")
    return value


def read_literals(path: str) -> List[Value]:
    """One literal per non-empty line; lines starting with # are comments"""
    out = []
    with open(path, encoding='utf-8') as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            try:
                out.append(parse(line))
            except ParseError as e:
                raise ParseError(f"{path}:{lineno}: {e}")
    return out


# --- text output ---

def _format_terms(a: Jet) -> str:
    return '[' + ', '.join(
        '(' + ' '.join(str(e) for e in m) + f": {format_rational(c)})" for m, c in a.terms()
    ) + ']'


def _header(dim: Optional[int], trunc: int, reliable: int) -> str:
    parts = [] if dim is None else [f"dim={dim}"]
    parts.append(f"trunc={trunc}")
    if reliable < trunc:
        parts.append(f"reliable={reliable}")
    return ', '.join(parts)


def _basis_name(key: Tuple[int, ...]) -> str:
    return '^'.join(f"dx{i + 1}" for i in key) if key else '1'


def format_value(value: Value) -> str:
    """Canonical literal; parse(format_value(v)) == v"""
    if isinstance(value, Jet):
        return f"jet{{{_header(value.dim, value.trunc, value.reliable)}, terms={_format_terms(value)}}}"
    if isinstance(value, (VectorFieldJet, DiffeoJet)):
        kind = 'vf' if isinstance(value, VectorFieldJet) else 'diffeo'
        comps = ', '.join(f"comp{i + 1}={_format_terms(c)}" for i, c in enumerate(value.components))
        return f"{kind}{{{_header(value.dim, value.trunc, value.reliable)}, {comps}}}"
    if isinstance(value, FormJet):
        body = _header(value.dim, value.trunc, value.reliable)
        for key in sorted(value.coeffs):
            body += f", {_basis_name(key)}: {_format_terms(value.coeffs[key])}"
        return f"form{value.degree}{{{body}}}"
    if isinstance(value, MeromorphicFormJet):
        return f"mero{{num={format_value(value.numerator)}, den={format_value(value.denominator)}}}"
    if isinstance(value, CurveJet):
        comps = ', '.join(f"comp{i + 1}={_format_terms(c)}" for i, c in enumerate(value.components))
        return f"curve{{{_header(None, value.trunc, value.reliable)}, {comps}}}"
    raise TypeError(f"no literal form for {type(value).__name__}")


# --- JSON mapping ---

def _terms_json(a: Jet) -> List:
    return [[list(m), format_rational(c)] for m, c in a.terms()]


def _terms_from_json(data) -> List[Tuple[Tuple[int, ...], Fraction]]:
    try:
        return [(tuple(int(e) for e in m), parse_rational(str(c))) for m, c in data]
    except (TypeError, ValueError):
        raise ParseError("terms must be a list of [exponents, \"rational\"] pairs")


def to_json(value: Value) -> Dict:
    """Same fields as the text literal; rationals become strings"""
    if isinstance(value, Jet):
        return {'type': 'jet', 'dim': value.dim, 'trunc': value.trunc, 'reliable': value.reliable,
                'terms': _terms_json(value)}
    if isinstance(value, (VectorFieldJet, DiffeoJet)):
        return {'type': 'vf' if isinstance(value, VectorFieldJet) else 'diffeo',
                'dim': value.dim, 'trunc': value.trunc, 'reliable': value.reliable,
                'components': [_terms_json(c) for c in value.components]}
    if isinstance(value, FormJet):
        return {'type': 'form', 'degree': value.degree, 'dim': value.dim, 'trunc': value.trunc,
                'reliable': value.reliable,
                'coeffs': [[[i + 1 for i in key], _terms_json(value.coeffs[key])] for key in sorted(value.coeffs)]}
    if isinstance(value, MeromorphicFormJet):
        return {'type': 'mero', 'num': to_json(value.numerator), 'den': to_json(value.denominator)}
    if isinstance(value, CurveJet):
        return {'type': 'curve', 'trunc': value.trunc, 'reliable': value.reliable,
                'components': [_terms_json(c) for c in value.components]}
    raise TypeError(f"no JSON form for {type(value).__name__}")


def from_json(data: Dict) -> Value:
    try:
        kind = data['type']
        if kind == 'mero':
            return MeromorphicFormJet(from_json(data['num']), from_json(data['den']))
        trunc, reliable = data['trunc'], data.get('reliable')
        if kind == 'curve':
            return CurveJet(tuple(make_jet(1, trunc, _terms_from_json(t), reliable) for t in data['components']))
        dim = data['dim']
        if kind == 'jet':
            return make_jet(dim, trunc, _terms_from_json(data['terms']), reliable)
        if kind in ('vf', 'diffeo'):
            comps = tuple(make_jet(dim, trunc, _terms_from_json(t), reliable) for t in data['components'])
            return VectorFieldJet(comps) if kind == 'vf' else DiffeoJet(comps)
        if kind == 'form':
            degree = data['degree']
            coeffs = {tuple(i - 1 for i in key): make_jet(dim, trunc, _terms_from_json(t), reliable)
                      for key, t in data['coeffs']}
            if not coeffs:
                form = zero_form(dim, degree, trunc)
                return form.with_reliable(reliable) if reliable is not None else form
            return make_form(dim, degree, coeffs)
    except (KeyError, TypeError) as e:
        raise ParseError(f"malformed JSON object: {e}")
    raise ParseError(f"unknown object type {data.get('type')!r}")


def dumps(value: Value) -> str:
    return json.dumps(to_json(value), sort_keys=True)


def loads(text: str) -> Value:
    try:
        return from_json(json.loads(text))
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", e.pos)
