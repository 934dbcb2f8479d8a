"""
Test the literal codecs and the command-line front end
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import io
import json
from fractions import Fraction

import pytest

from src.cli import run
from src.errors import ParseError
from src.fields import VectorFieldJet
from src.jets import Jet
from src.literals import (
    dumps, format_value, loads, parse, parse_as, parse_many, parse_rational, read_literals, to_json,
)
from src.oneforms import CurveJet, FormJet, MeromorphicFormJet


JET = 'jet{dim=2, trunc=3, reliable=2, terms=[(0 0: 1), (1 1: -3/2)]}'
FIELD = 'vf{dim=2, trunc=5, comp1=[(1 0: 1), (0 2: 1)], comp2=[(0 1: 2), (1 1: 1), (2 0: 1)]}'
FORM = 'form2{dim=3, trunc=2, dx1^dx3: [(0 0 0: 1), (1 0 0: 2)]}'
MERO = ('mero{num=form1{dim=2, trunc=4, dx1: [(0 1: 1)], dx2: [(1 0: -1)]}, '
        'den=jet{dim=2, trunc=4, terms=[(1 1: 1)]}}')
CURVE = 'curve{trunc=4, comp1=[(1: 1)], comp2=[(2: 1/3)]}'
SADDLE_NODE = 'form1{dim=2, trunc=5, dx1: [(0 1: 1), (2 0: -1)], dx2: [(1 0: 1)]}'


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


# --- literals ---

def test_rationals():
    assert parse_rational('-3/2') == Fraction(-3, 2)
    assert parse_rational(' 4 ') == 4
    with pytest.raises(ParseError):
        parse_rational('0.5')
    with pytest.raises(ParseError):
        parse_rational('1/0')


@pytest.mark.parametrize("text", [JET, FIELD, FORM, MERO, CURVE])
def test_canonical_text_round_trip(text):
    assert format_value(parse(text)) == text


@pytest.mark.parametrize("text", [JET, FIELD, FORM, MERO, CURVE])
def test_json_round_trip(text):
    value = parse(text)
    assert loads(dumps(value)) == value


def test_parsed_types_and_values():
    a = parse(JET)
    assert isinstance(a, Jet)
    assert a.reliable == 2
    assert a.coeffs == {(0, 0): 1, (1, 1): Fraction(-3, 2)}
    assert isinstance(parse(FIELD), VectorFieldJet)
    assert isinstance(parse(FORM), FormJet)
    assert isinstance(parse(MERO), MeromorphicFormJet)
    assert isinstance(parse(CURVE), CurveJet)


def test_whitespace_is_insignificant():
    loose = 'jet{ dim = 2 ,trunc=3 , reliable=2, terms=[ (1 1 : -3/2) ,(0 0:1) ] }'
    assert parse(loose) == parse(JET)


def test_unsorted_basis_flips_sign():
    w = parse('form2{dim=3, trunc=2, dx3^dx1: [(0 0 0: 1)]}')
    assert w.coefficient((0, 2)).coeffs == {(0, 0, 0): -1}


def test_json_layout():
    data = to_json(parse(JET))
    assert data == {'type': 'jet', 'dim': 2, 'trunc': 3, 'reliable': 2,
                    'terms': [[[0, 0], '1'], [[1, 1], '-3/2']]}
    form = to_json(parse(FORM))
    assert form['coeffs'] == [[[1, 3], [[[0, 0, 0], '1'], [[1, 0, 0], '2']]]]


@pytest.mark.parametrize("text", [
    'jet{dim=2, trunc=3, terms=[(1 0: 0.5)]}',
    'jet{dim=2, terms=[(1 0: 1)]}',
    'jet{dim=2, trunc=3, terms=[(1 0: 1)], colour=[]}',
    'jet{dim=2, trunc=1, terms=[(2 0: 1)]}',
    'jet{dim=2, trunc=3, terms=[(1 0: 1)]} extra',
    'vf{dim=2, trunc=3, comp1=[(1 0: 1)]}',
    'form1{dim=2, trunc=3, dx3: [(1 0: 1)]}',
    'spline{dim=1}',
])
def test_malformed_literals(text):
    with pytest.raises(ParseError):
        parse(text)


def test_parse_as_and_parse_many():
    with pytest.raises(ParseError):
        parse_as(JET, VectorFieldJet)
    values = parse_many(JET + '  ' + CURVE)
    assert [type(v) for v in values] == [Jet, CurveJet]
    with pytest.raises(ParseError):
        loads('{"type": "spline"}')


def test_read_literals_skips_comments(tmp_path):
    path = tmp_path / 'gens.txt'
    path.write_text(f"# generators\n\n{FIELD}\n{FIELD}\n")
    assert len(read_literals(str(path))) == 2
    path.write_text("jet{dim=1}\n")
    with pytest.raises(ParseError) as info:
        read_literals(str(path))
    assert ':1:' in str(info.value)


# --- command line ---

def test_resonance_report():
    code, out, err = invoke('resonance', '--dim', '2', '--lambda', '1,-1', '--mu', '0', '--bound', '3')
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == '# jetcalc-format/1 resonance'
    assert 'finiteness: infinite-structured' in lines
    assert 'generator: [[1, 1], [1, 1]]' in lines
    assert 'solutions: [[1, 1], [2, 2], [3, 3]]' in lines


def test_nonresonance_without_trunc():
    code, out, _ = invoke('resonance', '--dim', '2', '--lambda', '1,2')
    assert code == 0
    assert 'nonresonant: false' in out.splitlines()


def test_jet_product():
    code, out, _ = invoke('jet', '--dim', '2', '--trunc', '3', '--op', 'mul',
                          '--a', 'jet{dim=2, trunc=3, terms=[(0 0: 1), (1 0: 1)]}',
                          '--b', 'jet{dim=2, trunc=3, terms=[(0 0: 1), (1 0: -1)]}')
    assert code == 0
    assert 'jet: jet{dim=2, trunc=3, terms=[(0 0: 1), (2 0: -1)]}' in out.splitlines()


def test_json_output():
    code, out, _ = invoke('--out', 'json', 'field', '--dim', '2', '--trunc', '2', '--op', 'linear',
                          '--x', 'vf{dim=2, trunc=2, comp1=[(1 0: 2)], comp2=[(0 1: -1)]}')
    assert code == 0
    data = json.loads(out)
    assert data['format'] == 'jetcalc-format/1'
    assert data['command'] == 'field'
    rows = data['result']['linear_part']
    assert [[Fraction(c) for c in row] for row in rows] == [[2, 0], [0, -1]]


def test_normalize_lists_removed_terms():
    code, out, _ = invoke('normalize', '--dim', '2', '--trunc', '5', '--field', FIELD, '--upto', '4')
    assert code == 0
    removed = next(line for line in out.splitlines() if line.startswith('removed: '))
    assert removed.startswith('removed: [2:(0 2):1, 2:(1 1):2')


def test_algebra_closure_from_file(tmp_path):
    path = tmp_path / 'sl2.txt'
    path.write_text('\n'.join(f"vf{{dim=1, trunc=4, comp1=[({e}: 1)]}}" for e in range(3)) + '\n')
    code, out, _ = invoke('algebra', '--dim', '1', '--trunc', '4', '--gens', str(path), '--op', 'closure')
    assert code == 0
    lines = out.splitlines()
    assert 'bracket[1,2]: [1, 0, 0]' in lines
    assert 'bracket[1,3]: [0, 2, 0]' in lines
    assert 'bracket[2,3]: [0, 0, 1]' in lines


def test_separatrix_command():
    code, out, _ = invoke('forms', '--dim', '2', '--trunc', '5', '--op', 'separatrix',
                          '--form', SADDLE_NODE, '--direction', '1,0', '--upto', '4')
    assert code == 0
    assert 'separatrix: curve{trunc=5, comp1=[(1: 1)], comp2=[(2: 1/3)]}' in out.splitlines()
    code, out, _ = invoke('forms', '--dim', '2', '--trunc', '4', '--op', 'separatrix',
                          '--form', 'form1{dim=2, trunc=4, dx1: [(1 0: 1)], dx2: [(0 1: 1)]}',
                          '--direction', '1,0')
    assert code == 0
    assert 'separatrix: none' in out.splitlines()


def test_usage_errors_exit_one():
    code, out, err = invoke('jet', '--dim', '2')
    assert code == 1
    assert out == ''
    assert err.startswith('usage error:')
    code, _, err = invoke('field', '--dim', '2', '--trunc', '5', '--op', 'bracket', '--x', FIELD)
    assert code == 1
    assert '--y' in err
    code, _, _ = invoke('resonance', '--dim', '3', '--lambda', '1,2')
    assert code == 1


def test_domain_errors_exit_two():
    code, out, err = invoke('jet', '--dim', '1', '--trunc', '3', '--op', 'invert',
                            '--a', 'jet{dim=1, trunc=3, terms=[(1: 1)]}')
    assert code == 2
    assert out == ''
    assert err.startswith('error: NotAUnit:')
    code, _, err = invoke('field', '--dim', '2', '--trunc', '4', '--op', 'parse', '--x', FIELD)
    assert code == 2
    assert err.startswith('error: TruncMismatch:')
    code, _, err = invoke('jet', '--dim', '2', '--trunc', '3', '--op', 'parse', '--a', 'jet{dim=2')
    assert code == 2
    assert err.startswith('error: ParseError:')


if __name__ == "__main__":
    pytest.main([__file__])
