"""Acceptance criteria, each checked exactly and under its time limit.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL line
per criterion, or directly with ``python3 tests/test_acceptance.py``.
"""

import random
import sys
import time
from fractions import Fraction
from math import factorial

import pytest

from dlok0.atoms import NEG_INF, chain_atom, enumerate_atoms, gap_vector, split
from dlok0.characteristic import (
    Characteristic,
    chi,
    collapse_endpoint,
    delta_pad,
    min_endpoint_chi,
    restrict_to_endpoint_order,
)
from dlok0.formula import eval_formula, parse_formula
from dlok0.genring import (
    GenPoly,
    iprime_multiplier,
    rel,
    substitute_param,
    verify_convolution,
    verify_factorial,
    verify_Iprime_congruence,
    zeta,
    zeta_inv,
)
from dlok0.grothendieck import eq, merge_counts, mul, no_injection_certificate, one, php_check, zero
from dlok0.oracle import (
    atom_product_split,
    delannoy,
    order_type_count,
    random_definable_set,
    random_element,
    random_formula,
    random_params,
    random_point,
    union_of_atoms,
    weak_order_count,
)
from dlok0.qe import eliminate_quantifiers

F = Fraction
TWO = (F(1), F(0))

# collected for the end-of-run summary (see conftest.py)
SUMMARY: list[str] = []


def report(number, title, limit, check):
    start = time.perf_counter()
    try:
        ok, detail = check()
    except Exception as exc:  # reported, then re-raised for pytest
        ok, detail = False, f"{type(exc).__name__}: {exc}"
        elapsed = time.perf_counter() - start
        SUMMARY.append(f"FAIL  [{number:2}] {title}  ({elapsed:.2f}s / {limit}s)  {detail}")
        print(SUMMARY[-1])
        raise
    elapsed = time.perf_counter() - start
    passed = ok and elapsed < limit
    status = "PASS" if passed else "FAIL"
    SUMMARY.append(f"{status}  [{number:2}] {title}  ({elapsed:.2f}s / {limit}s)  {detail}")
    print(SUMMARY[-1])
    assert ok, detail
    assert elapsed < limit, f"took {elapsed:.2f}s, limit {limit}s"


# 1 ---------------------------------------------------------------------------

def atom_counts():
    two = len(enumerate_atoms(2, TWO))
    fubini = [len(enumerate_atoms(n)) for n in range(1, 5)]
    ok = (two == 31 == order_type_count(2, TWO)
          and fubini == [1, 3, 13, 75] == [weak_order_count(n) for n in range(1, 5)])
    return ok, f"|At(2, 2 params)| = {two}, Fubini {fubini}"


def test_01_atom_counts():
    report(1, "atom counts", 1, atom_counts)


# 2 ---------------------------------------------------------------------------

NAMED_PLANE_CLASSES = ["x > 1", "x < 0", "0 < x < 1", "1 < y < x", "0 < y < 1 < x",
                 "y < 0 & 1 < x", "x < 0 & 0 < y < 1", "x < y < 0", "0 < x < y < 1"]


def two_parameter_colors():
    colors = {gap_vector(a) for a in enumerate_atoms(2, TWO)}
    positive = {c for c in colors if sum(c) > 0}
    # the nine named classes of the plane cut by x, y in {0, 1}, one color each
    labelled = set()
    for text in NAMED_PLANE_CLASSES:
        c = chi(eliminate_quantifiers(parse_formula(text)), TWO)
        if len(c.coeffs) != 1:
            return False, f"{text} is not a single color"
        labelled |= set(c.coeffs)
    ok = len(colors) == 10 and len(positive) == 9 and labelled == positive
    return ok, f"{len(colors)} colors, {len(positive)} of positive height, all 9 named classes realized"


def test_02_two_parameter_colors():
    report(2, "colors over two parameters, n = 2", 1, two_parameter_colors)


# 3 ---------------------------------------------------------------------------

def products_vs_interleavings():
    params = (F(0),)
    for m in range(5):
        for n in range(m, 5):
            a = Characteristic(params, {(m, 0): 1})
            b = Characteristic(params, {(n, 0): 1})
            oracle = atom_product_split(chain_atom(params, (m,)), chain_atom(params, (n,)))
            if not mul(a, b).same_representation(oracle):
                return False, f"mismatch at ({m}, {n})"
            if sum(c for _, c in merge_counts(m, n)) != delannoy(m, n):
                return False, f"total at ({m}, {n}) is not D({m},{n})"
    # a two-gap pinned case against the oracle as well
    a, b = chain_atom(TWO, (1, 2)), chain_atom(TWO, (2, 1))
    pinned = mul(chi(a.to_dnf(["x", "y", "z"]), TWO), chi(b.to_dnf(["u", "v", "w"]), TWO))
    ok = pinned.same_representation(atom_product_split(a, b)) and delannoy(2, 3) == 25
    return ok, "m <= n <= 4 agree; D(2,3) = 25"


def test_03_products():
    report(3, "products match interleaving oracle", 10, products_vs_interleavings)


# 4 ---------------------------------------------------------------------------

def random_normal_poly(rng, params):
    """Random normal-form polynomial over ``params`` and -inf of height <= 4."""
    points = list(params) + [NEG_INF]
    p = GenPoly.const(rng.randint(-3, 3))
    for _ in range(rng.randint(1, 4)):
        budget = rng.randint(1, 4)
        mono = GenPoly.const(rng.choice([-3, -2, -1, 1, 2, 3]))
        for a in rng.sample(points, rng.randint(1, len(points))):
            if budget == 0:
                break
            n = rng.randint(1, budget)
            budget -= n
            mono = mono * GenPoly.gen(a, n)
        p = p + mono
    return p


def presentation():
    for a in (F(0), F(3, 2), F(-7)):
        for k in range(1, 4):
            for l in range(1, k + 1):
                if zeta(rel(k, l, a)):
                    return False, f"rel({k},{l}) at {a} survives"
    rng = random.Random(2024)
    for _ in range(100):
        params = random_params(rng, rng.randint(0, 3))
        e = random_element(rng, params, max_height=4)
        if not zeta(zeta_inv(e), params).same_representation(e):
            return False, "zeta . zeta_inv is not the identity"
        p = random_normal_poly(rng, params)
        if zeta_inv(zeta(p, params)) != p:
            return False, "zeta_inv . zeta is not the identity"
    return True, "relations vanish at 3 parameters; 100 + 100 round trips"


def test_04_presentation():
    report(4, "generators and relations presentation", 60, presentation)


# 5 ---------------------------------------------------------------------------

def permuted(d, rng):
    names = list(d.variables)
    rng.shuffle(names)
    return d.with_variables(tuple(names))


def cancellativity():
    rng = random.Random(5)
    premise = 0
    for trial in range(200):
        params = random_params(rng, rng.randint(0, 2))
        n = rng.randint(1, 2)
        da = random_definable_set(rng.random(), n, params, 0.4)
        a = chi(da, params)
        r = rng.random()
        if r < 0.3:
            b = chi(permuted(da, rng), params)
        elif r < 0.5:
            b = chi(delta_pad(da, n + 1), params)
        else:
            b = chi(random_definable_set(rng.random(), rng.randint(1, 2), params, 0.4), params)
        c = chi(random_definable_set(rng.random(), rng.randint(1, 2), params, 0.4), params)
        if eq(a + c, b + c):
            premise += 1
            if not eq(a, b):
                return False, f"trial {trial}: a + c = b + c but a != b"
    return True, f"200 triples, premise true in {premise}"


def test_05_cancellativity():
    report(5, "cancellativity", 30, cancellativity)


# 6 ---------------------------------------------------------------------------

def pigeonhole():
    rng = random.Random(6)
    done = 0
    while done < 100:
        params = random_params(rng, rng.randint(0, 2))
        n = rng.randint(1, 2)
        big = random_definable_set(rng.random(), n, params, 0.6)
        atoms = split(big, params)
        if not atoms:
            continue
        dropped = set(rng.sample(atoms, rng.randint(1, len(atoms))))
        small = union_of_atoms([a for a in atoms if a not in dropped], big.variables, params)
        if not php_check(small, big):
            return False, f"proper subset with the same class: {small} < {big}"
        done += 1
    return True, "100 proper-subset pairs, all classes distinct"


def test_06_pigeonhole():
    report(6, "pigeonhole principle", 30, pigeonhole)


# 7 ---------------------------------------------------------------------------

def interval_identities():
    rng = random.Random(7)
    triples = []
    while len(triples) < 3:
        values = sorted({F(rng.randint(-20, 20), rng.randint(1, 4)) for _ in range(3)})
        if len(values) == 3:
            triples.append(tuple(values))
    for a, c, b in triples:
        for n in range(5):
            if not verify_convolution(n, a, c, b):
                return False, f"convolution fails at n={n}, {(a, c, b)}"
    for a, _, b in triples:
        for n in range(1, 6):
            if not verify_factorial(n, a, b):
                return False, f"factorial fails at n={n}"
    shown = ", ".join("(" + ",".join(str(v) for v in t) + ")" for t in triples)
    return True, f"convolution n <= 4 and factorial n <= 5 at {shown}"


def test_07_interval_identities():
    report(7, "convolution and factorial identities", 60, interval_identities)


# 8 ---------------------------------------------------------------------------

def iprime():
    for k in range(1, 5):
        for l in range(1, k + 1):
            if not verify_Iprime_congruence(k, l):
                return False, f"congruence fails at ({k}, {l})"
            if iprime_multiplier(k, l) != factorial(l):
                return False, f"multiplier at ({k}, {l}) is not {l}!"
    return True, "all l <= k <= 4 vanish; multipliers are l!"


def test_08_iprime():
    report(8, "falling-factorial congruence and multipliers", 10, iprime)


# 9 ---------------------------------------------------------------------------

def endpoint_pairs(rng, count):
    pairs = []
    while len(pairs) < count:
        params = tuple(sorted({F(rng.randint(0, 8), 2) for _ in range(rng.randint(0, 2))} | {F(0)},
                              reverse=True))
        n = rng.randint(1, 2)
        d1 = random_definable_set(rng.random(), n, params, 0.5)
        kind = len(pairs) % 3
        if kind == 0:
            d2 = permuted(d1, rng)
        elif kind == 1:
            d2 = delta_pad(d1, n + 1)
        else:
            d2 = random_definable_set(rng.random(), rng.randint(1, 2), params, 0.5)
        pairs.append((params, d1, d2))
    return pairs


def endpoint_invariance():
    rng = random.Random(9)
    agree = equal = 0
    for params, d1, d2 in endpoint_pairs(rng, 50):
        e1, e2 = min_endpoint_chi(d1, params), min_endpoint_chi(d2, params)
        endpoint_verdict = e1.same_representation(e2)
        # extension: all of Q, with parameters below the endpoint as well
        ext = tuple(sorted(set(params) | {F(-1), F(-5, 2)}, reverse=True))
        x1 = chi(restrict_to_endpoint_order(d1), ext)
        x2 = chi(restrict_to_endpoint_order(d2), ext)
        if endpoint_verdict != x1.same_representation(x2):
            return False, f"verdicts differ for {d1} vs {d2}"
        if endpoint_verdict and not collapse_endpoint(e1).same_representation(collapse_endpoint(e2)):
            return False, "collapse breaks an equivalence"
        agree += 1
        equal += endpoint_verdict
    for k in range(1, 5):
        for l in range(1, k + 1):
            if substitute_param(rel(k, l, F(0)), F(0), NEG_INF) != rel(k, l, NEG_INF):
                return False, f"substitution breaks rel({k},{l})"
    # a chain of n points above the endpoint collapses to the generator at -inf
    for n in range(1, 5):
        names = [f"x{i}" for i in range(n)]
        above = chain_atom((F(0),), (n,)).to_dnf(names)
        if not collapse_endpoint(min_endpoint_chi(above)).same_representation(zeta(GenPoly.gen(NEG_INF, n), ())):
            return False, f"chain of {n} does not collapse to X(-inf;{n})"
    return True, f"{agree} pairs agree ({equal} equivalent); relations survive m -> -inf"


def test_09_endpoint():
    report(9, "minimum-endpoint invariance", 30, endpoint_invariance)


# 10 --------------------------------------------------------------------------

def comparability():
    pos = eliminate_quantifiers(parse_formula("x > 0"))
    neg = eliminate_quantifiers(parse_formula("x < 0"))
    c1 = no_injection_certificate(pos, neg)
    c2 = no_injection_certificate(neg, pos)
    ok = c1 is not None and c2 is not None
    shown = [("-inf" if c.interval[0] is None else str(c.interval[0]),
              "inf" if c.interval[1] is None else str(c.interval[1])) if c else None for c in (c1, c2)]
    return ok, f"x>0 -> x<0 blocked by gap {shown[0]}; x<0 -> x>0 blocked by gap {shown[1]}"


def test_10_comparability_fails():
    report(10, "no injection either way between x>0 and x<0", 1, comparability)


# 11 --------------------------------------------------------------------------

def qe_soundness():
    rng = random.Random(11)
    names = ["x", "y"]
    checked = 0
    for i in range(100):
        params = random_params(rng, rng.randint(0, 2))
        f = random_formula(rng, names, params, depth=3)
        d = eliminate_quantifiers(f, names, params)
        for _ in range(1000):
            pt = random_point(rng, names, params)
            if d.evaluate(pt) != eval_formula(f, pt):
                return False, f"formula {i} disagrees at {pt}"
            checked += 1
    return True, f"{checked} point evaluations agree"


def test_11_qe_soundness():
    report(11, "quantifier elimination soundness", 60, qe_soundness)


# 12 --------------------------------------------------------------------------

def nontrivial():
    return (not eq(one(), zero())), "1 != 0 in K0"


def test_12_nontrivial():
    report(12, "K0 is not the zero ring", 1, nontrivial)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
