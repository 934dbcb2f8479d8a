#!/usr/bin/env python3
"""
Acceptance battery - randomized property checks over the whole engine
Runs each check, prints a pass/fail report and exits 1 if anything failed
"""

import sys
import os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import argparse
import math
import random
import time
import traceback
from datetime import datetime
from fractions import Fraction

from src import fields, linalg, liealg, normalform, oneforms, resonance, runlog
from src.errors import JetError
from src.fields import DiffeoJet, VectorFieldJet
from src.jets import add, agree, differentiate, make_jet, monomials_of_degree, mul, scale, variable
from src.liealg import ClassificationTag, Family


def random_jet(rng, dim, trunc, start=0, stop=None, density=0.4):
    terms = []
    for d in range(start, (trunc if stop is None else stop) + 1):
        for m in monomials_of_degree(dim, d):
            if rng.random() < density:
                terms.append((m, Fraction(rng.randint(-5, 5), rng.randint(1, 3))))
    return make_jet(dim, trunc, terms)


def random_field(rng, dim, trunc, start=1, stop=None):
    return VectorFieldJet(tuple(random_jet(rng, dim, trunc, start, stop) for _ in range(dim)))


def random_tangent_diffeo(rng, dim, trunc, stop=3):
    return DiffeoJet(tuple(variable(dim, trunc, i + 1) + random_jet(rng, dim, trunc, 2, stop)
                           for i in range(dim)))


def planar(trunc, comp1, comp2):
    return VectorFieldJet((make_jet(2, trunc, comp1), make_jet(2, trunc, comp2)))


# --- checks ---

def check_ring_and_lie_axioms(rng):
    for _ in range(200):
        dim = rng.choice([2, 3])
        a, b, c = (random_jet(rng, dim, 6) for _ in range(3))
        assert agree(mul(mul(a, b), c), mul(a, mul(b, c))), "associativity"
        i = rng.randint(1, dim)
        assert agree(differentiate(mul(a, b), i), add(mul(differentiate(a, i), b), mul(a, differentiate(b, i)))), \
            "Leibniz rule"
    for _ in range(200):
        dim = rng.choice([2, 3])
        X, Y, Z = (random_field(rng, dim, 6) for _ in range(3))
        assert (fields.bracket(X, Y) + fields.bracket(Y, X)).is_zero_within_reliable(), "antisymmetry"
        jacobi = (fields.bracket(X, fields.bracket(Y, Z)) + fields.bracket(Y, fields.bracket(Z, X))
                  + fields.bracket(Z, fields.bracket(X, Y)))
        assert jacobi.is_zero_within_reliable(), "Jacobi identity"
    return "200 jet triples, 200 field triples"


def check_euler_identity(rng):
    for k in range(50):
        d = k % 4 + 1
        dim = rng.choice([2, 3])
        X = VectorFieldJet(tuple(
            make_jet(dim, 6, [(m, rng.randint(-4, 4)) for m in monomials_of_degree(dim, d + 1)])
            for _ in range(dim)))
        assert fields.agree_fields(fields.bracket(fields.radial_field(dim, 6), X), X.scale(d)), f"degree {d + 1}"
    return "50 homogeneous fields, degrees 2..5"


def check_poincare_dulac(rng):
    for n in (2, 3):
        for _ in range(5):
            X = fields.linear_field([[1, 0], [0, n]], 8) + random_field(rng, 2, 8, 2, 5)
            result = normalform.poincare_dulac_normalize(X, 8)
            for j, comp in enumerate(result.normal.components):
                for m in comp.coeffs:
                    if sum(m) >= 2:
                        assert (m, j) == ((n, 0), 1), f"term {m} in component {j + 1} survived"
            assert fields.agree_fields(fields.pushforward(result.conjugator, X), result.normal, 8), \
                "conjugator does not carry the field to its normal form"
    return "n = 2, 3; 5 perturbations each"


def check_resonance_oracle(rng):
    checked = 0
    while checked < 100:
        lam = tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(2))
        mu = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
        if lam == (0, 0):
            continue
        result = resonance.resonant_set(resonance.ResonanceQuery(lam, mu))
        assert result.enumerate(12) == resonance.brute_force(lam, mu, 12), f"lambda={lam}, mu={mu}"
        checked += 1
    fibers = 0
    while fibers < 50:
        p, q = rng.randint(1, 9), rng.randint(1, 9)
        if math.gcd(p, q) != 1:
            continue
        mu = rng.randint(-12, 12)
        base, step = resonance.fiber_decomposition(p, q, mu)
        ray = {(base[0] + s * p, base[1] + s * q) for s in range(16)}
        assert {m for m in ray if max(m) <= 15} == resonance.brute_force((q, -p), mu, 15), f"fiber ({p}, {q}, {mu})"
        fibers += 1
    return "100 random spectra, 50 lattice fibers"


def _nilpotent_presentation(rng):
    """c x3^2 d2 together with the iterated brackets of a random b(x2, x3) d1"""
    dim = rng.choice([3, 4])
    trunc = 10
    comps = [make_jet(dim, trunc, []) for _ in range(dim)]
    e3 = tuple(2 if i == 2 else 0 for i in range(dim))
    comps[1] = make_jet(dim, trunc, [(e3, rng.randint(1, 3))])
    X0 = VectorFieldJet(tuple(comps))
    terms = [(tuple([0, 2] + [0] * (dim - 2)), rng.randint(1, 3))]
    for m in list(monomials_of_degree(2, 2)) + list(monomials_of_degree(2, 3)):
        if m != (2, 0) and rng.random() < 0.5:
            terms.append((tuple([0, m[0], m[1]] + [0] * (dim - 3)), rng.randint(-3, 3)))
    b = make_jet(dim, trunc, terms)
    X1 = VectorFieldJet(tuple(b if i == 0 else make_jet(dim, trunc, []) for i in range(dim)))
    gens = [X0, X1]
    Y = X1
    while True:
        Y = fields.bracket(X0, Y)
        if Y.is_zero_within_reliable():
            break
        gens.append(Y)
    return liealg.closure_check(gens)


def check_nilpotency(rng):
    for _ in range(30):
        A = _nilpotent_presentation(rng)
        assert liealg.is_nilpotent(A), "random order-2 algebra reported non-nilpotent"
        assert all(linalg.is_nilpotent(ad) for ad in liealg.ad_matrices(A)), "ad matrix not nilpotent"
    x0 = VectorFieldJet(tuple(make_jet(4, 4, [((1, 1, 0, 0), 1)] if i == 2 else []) for i in range(4)))
    x1 = VectorFieldJet(tuple(make_jet(4, 4, [((0, 1, 1, 0), 1)] if i == 3 else []) for i in range(4)))
    x2 = fields.bracket(x0, x1)
    assert x2.components[3].coeffs == {(1, 2, 0, 0): 1}, "[X0, X1] != x1 x2^2 d4"
    assert liealg.is_nilpotent(liealg.closure_check([x0, x1, x2])), "rank-2 fixture"
    return "30 random presentations plus the rank-2 fixture"


def check_first_integrals(rng):
    for p, q in ((1, 1), (1, 2), (2, 3)):
        X = planar(10, [((1, 0), q)], [((0, 1), -p)])
        f = liealg.first_integral_jet(X, 10)
        assert f is not None and f.coeffs == {(p, q): 1}, f"(p, q) = ({p}, {q})"
    rotation = planar(10, [((0, 1), 1)], [((1, 0), -1)])
    assert liealg.first_integral_jet(rotation, 10).coeffs == {(2, 0): 1, (0, 2): 1}, "rotation"
    assert liealg.first_integral_jet(fields.radial_field(2, 10), 10) is None, "radial field"
    return "three saddles, the rotation and R_2"


def check_commuting_third_field(rng):
    families = [
        (Family.ABELIAN_1, {}),
        (Family.ABELIAN_2, {'n': 2}),
        (Family.ABELIAN_5, {}),
    ]
    for k in range(20):
        family, params = families[k % 3]
        phi = random_tangent_diffeo(rng, 2, 8)
        pair = [fields.pushforward(phi, g) for g in liealg.family_basis(ClassificationTag(family, params), 2, 8)]
        a, b = Fraction(rng.randint(-5, 5), rng.randint(1, 3)), Fraction(rng.randint(-5, 5), rng.randint(1, 3))
        Y = pair[0].scale(a) + pair[1].scale(b)
        f1, f2 = liealg.coefficient_functions(pair, Y)
        for f, c in ((f1, a), (f2, b)):
            top = f.reliable
            assert f.constant_term() == c, f"{family.value}: constant term {f.constant_term()} != {c}"
            assert all(sum(m) == 0 for m in f.truncated(top).coeffs), f"{family.value}: nonconstant coefficient"
    return "20 conjugated pairs from families 1, 2, 5"


def _random_family(rng, family):
    c = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
    if family is Family.ABELIAN_2:
        return {'n': rng.choice([2, 3])}
    if family is Family.ABELIAN_3:
        l1 = Fraction(rng.randint(1, 3))
        return {'p': 1, 'q': 1, 'lambda1': l1, 'lambda2': Fraction(1), 'a_hat': ((1, 1), (2, c))}
    if family is Family.ABELIAN_6:
        return {'alpha': Fraction(rng.randint(1, 3)), 'beta': Fraction(rng.randint(1, 3)),
                'a_hat': ((1, 1), (2, c))}
    if family is Family.ABELIAN_7:
        return {'a_hat': ((2, 1), (3, c))}
    return {}


def check_classification_round_trip(rng):
    done = []
    for family in (Family.ABELIAN_1, Family.ABELIAN_2, Family.ABELIAN_4, Family.ABELIAN_5,
                   Family.ABELIAN_3, Family.ABELIAN_6, Family.ABELIAN_7):
        params = _random_family(rng, family)
        phi = random_tangent_diffeo(rng, 2, 6)
        gens = [fields.pushforward(phi, g) for g in liealg.family_basis(ClassificationTag(family, params), 2, 6)]
        A = liealg.presentation(gens)
        tag = liealg.classify_abelian_rank2(A)
        assert tag.family is family, f"{family.value} classified as {tag.family.value}"
        assert liealg.verify_certificate(tag, A), f"{family.value}: certificate is unsound"
        done.append(family.value)
    return ', '.join(done)


def check_logarithmic_round_trip(rng):
    for _ in range(20):
        slopes = set()
        while len(slopes) < rng.choice([2, 3]):
            slopes.add(rng.choice([(1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2), (1, -2)]))
        factors = [make_jet(2, 6, [((1, 0), a), ((0, 1), b)]) for a, b in sorted(slopes)]
        residues = [Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3)) for _ in factors]
        omega = oneforms.log_synthesize(oneforms.LogSpec(real_factors=tuple(zip(factors, residues))))
        assert oneforms.is_closed(omega), "synthesized form is not closed"
        assert oneforms.residue_extract(omega, factors) == residues, f"residues {residues}"
    return "20 random affine factor sets"


def check_integrability(rng):
    for _ in range(20):
        g = random_jet(rng, 2, 4, 1)
        omega = oneforms.from_jet_differential(g) if not g.is_zero() else oneforms.coordinate_form(2, 4, 1)
        F = [random_jet(rng, 3, 4, 1) for _ in range(2)]
        assert oneforms.is_integrable(oneforms.pullback(F, omega)), "pullback failed the test"
    for _ in range(5):
        a = rng.choice([-2, -1, 1, 2])
        coeffs = {(2,): make_jet(3, 4, [((0, 0, 0), 1)]),
                  (0,): add(make_jet(3, 4, [((0, 1, 0), a)]), random_jet(rng, 3, 4, 2))}
        assert not oneforms.is_integrable(oneforms.make_form(3, 1, coeffs)), "contact form passed the test"
    return "20 pullbacks, 5 contact forms"


def check_separatrices(rng):
    ratios = [Fraction(3, 2), Fraction(-2, 3), Fraction(5, 3), Fraction(-3, 5), Fraction(-5, 2), Fraction(7, 3)]
    for _ in range(20):
        lam2 = rng.choice(ratios)
        X = planar(10, [((1, 0), 1)], [((0, 1), lam2)]) + random_field(rng, 2, 10, 2, 4)
        area = oneforms.make_form(2, 2, {(0, 1): make_jet(2, 10, [((0, 0), 1)])})
        omega = oneforms.contract(X, area)
        for direction in ((1, 0), (0, 1)):
            gamma = oneforms.find_separatrix(omega, direction, 10)
            assert gamma is not None, f"no separatrix along {direction}"
            assert oneforms.curve_pullback(omega, gamma).truncated(10).is_zero(), "pullback does not vanish"
    rotation = oneforms.make_form(2, 1, {(0,): make_jet(2, 4, [((1, 0), 1)]), (1,): make_jet(2, 4, [((0, 1), 1)])})
    assert oneforms.find_separatrix(rotation, (1, 0), 4) is None, "rotation dual has a separatrix"
    return "20 hyperbolic fields, both axes; rotation refused"


def check_group_layer(rng):
    x1, x2 = variable(2, 8, 1), variable(2, 8, 2)
    a = DiffeoJet((x1 + make_jet(2, 8, [((0, 2), 1)]) + random_jet(rng, 2, 8, 3, 4), x2))
    b = DiffeoJet((x1, x2 + make_jet(2, 8, [((2, 0), 1)]) + random_jet(rng, 2, 8, 3, 4)))
    words = 0
    while words < 30:
        raw = tuple((rng.randint(1, 2), rng.choice([-1, 1])) for _ in range(rng.randint(1, 6)))
        word = fields.reduce_word(raw)
        if not word:
            continue
        assert not fields.evaluate_word(word, [a, b]).is_identity(), f"word {word} is trivial"
        words += 1
    f = DiffeoJet((make_jet(1, 8, [((k,), (-1) ** k) for k in range(1, 9)]),))
    h = fields.bochner_linearize(f, 2)
    conjugated = fields.compose(h, f)
    assert agree(conjugated.components[0], scale(h.components[0], -1)), "Bochner conjugation"
    return "30 reduced words; -x/(1+x) linearized"


CHECKS = [
    ("Ring and Lie axioms", check_ring_and_lie_axioms),
    ("Euler identity", check_euler_identity),
    ("Poincare-Dulac normal forms", check_poincare_dulac),
    ("Resonance oracle", check_resonance_oracle),
    ("Nilpotency", check_nilpotency),
    ("First integrals", check_first_integrals),
    ("Commuting third field", check_commuting_third_field),
    ("Classification round trip", check_classification_round_trip),
    ("Logarithmic forms", check_logarithmic_round_trip),
    ("Integrability", check_integrability),
    ("Separatrices", check_separatrices),
    ("Group layer", check_group_layer),
]


def main():
    parser = argparse.ArgumentParser(description='Run the acceptance battery')
    parser.add_argument('--seed', type=int, default=1, help='Random seed')
    parser.add_argument('--only', type=int, action='append', help='Run only this check (1-based, repeatable)')
    parser.add_argument('--verbose', action='store_true', help='Echo the engine log to stderr')
    args = parser.parse_args()
    runlog.configure(verbose=args.verbose or None)

    print(f"Starting acceptance battery at {datetime.now()} (seed {args.seed})")
    failures = 0
    for number, (name, check) in enumerate(CHECKS, 1):
        if args.only and number not in args.only:
            continue
        rng = random.Random(args.seed * 1000 + number)
        started = time.time()
        try:
            detail = check(rng)
            print(f"✓ {number:2d}. {name}: {detail} ({time.time() - started:.1f}s)")
        except AssertionError as e:
            failures += 1
            print(f"❌ {number:2d}. {name}: {e}")
        except JetError as e:
            failures += 1
            print(f"❌ {number:2d}. {name}: {type(e).__name__}: {e}")
        except Exception as e:
            failures += 1
            print(f"❌ {number:2d}. {name}: unexpected {type(e).__name__}: {e}")
            if args.verbose:
                traceback.print_exc()

    if failures:
        print(f"\n⚠️  {failures} check(s) failed")
        sys.exit(1)
    print(f"\n✅ All checks passed at {datetime.now()}")


if __name__ == "__main__":
    main()
