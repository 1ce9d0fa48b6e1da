"""Deliberately naive reference computations used as ground truth in tests.

Nothing here is fast; everything here is small enough to be obviously right.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

from .atoms import Atom, enumerate_atoms, sort_params
from .characteristic import Characteristic, chi
from .formula import (
    FALSE,
    TRUE,
    And,
    Atomic,
    Const,
    Exists,
    Forall,
    Iff,
    Implies,
    Not,
    Or,
    PositiveDNF,
    Var,
)


def weak_order_count(n: int) -> int:
    """Ordered set partitions of an ``n``-set: a(n) = sum_k C(n,k) a(n-k)."""
    a = [1]
    for m in range(1, n + 1):
        a.append(sum(comb(m, k) * a[m - k] for k in range(1, m + 1)))
    return a[n]


@lru_cache(maxsize=None)
def delannoy(m: int, n: int) -> int:
    if m == 0 or n == 0:
        return 1
    return delannoy(m - 1, n) + delannoy(m, n - 1) + delannoy(m - 1, n - 1)


def order_type_count(n: int, params: Sequence[Fraction]) -> int:
    """Count atoms by brute force: sign patterns of points on a fine grid.

    The grid holds every parameter and ``n`` distinct values in each gap,
    enough to realise every placement of ``n`` coordinates.
    """
    params = sorted(Fraction(p) for p in params)
    grid = set(params)
    bounds = [params[0] - n - 1] + params + [params[-1] + n + 1] if params else [Fraction(0), Fraction(n + 1)]
    for lo, hi in zip(bounds, bounds[1:]):
        grid.update(lo + (hi - lo) * j / (n + 1) for j in range(1, n + 1))
    sign = lambda u, v: (u > v) - (u < v)
    patterns = set()
    for pt in itertools.product(sorted(grid), repeat=n):
        patterns.add((tuple(sign(u, v) for u in pt for v in pt),
                      tuple(sign(u, p) for u in pt for p in params)))
    return len(patterns)


def atom_product_split(a: Atom, b: Atom) -> Characteristic:
    """Characteristic of ``a x b`` by enumerating every way of interleaving
    the two block chains (free blocks may coincide, pins must)."""
    if a.params != b.params:
        raise ValueError("atoms must share their parameters")
    A, B = a.blocks, b.blocks

    @lru_cache(maxsize=None)
    def merges(i, j):
        if i == len(A) and j == len(B):
            return Counter({(0,): 1})
        ha = A[i] if i < len(A) else None
        hb = B[j] if j < len(B) else None
        out = Counter()

        def bump(sub):
            for v, c in sub.items():
                out[(v[0] + 1,) + v[1:]] += c

        if ha is not None and ha.free:
            bump(merges(i + 1, j))
        if hb is not None and hb.free:
            bump(merges(i, j + 1))
        if ha is not None and hb is not None and ha.free and hb.free:
            bump(merges(i + 1, j + 1))
        if ha is not None and hb is not None and not ha.free and not hb.free:
            assert ha.pin == hb.pin
            for v, c in merges(i + 1, j + 1).items():
                out[(0,) + v] += c
        return out

    return Characteristic(a.params, merges(0, 0))


def refine_oracle(d: PositiveDNF, target: Sequence[Fraction]) -> Characteristic:
    """Re-split the explicit set ``d`` over ``target`` and recount colors."""
    return chi(d, sort_params(target))


def union_of_atoms(atoms: Sequence[Atom], names: Sequence[str], params=()) -> PositiveDNF:
    return PositiveDNF(frozenset(a.constraints(names) for a in atoms), tuple(names),
                       frozenset(params))


def default_names(n: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(n))


def random_definable_set(seed, n: int, params: Sequence[Fraction], density: float,
                         names: Sequence[str] | None = None) -> PositiveDNF:
    """Union of atoms, each kept independently with probability ``density``."""
    rng = random.Random(seed)
    params = sort_params(params)
    kept = [a for a in enumerate_atoms(n, params) if rng.random() < density]
    return union_of_atoms(kept, names or default_names(n), params)


def random_params(rng: random.Random, k: int, lo: int = -5, hi: int = 5) -> tuple[Fraction, ...]:
    values = set()
    while len(values) < k:
        values.add(Fraction(rng.randint(lo * 4, hi * 4), 4))
    return sort_params(values)


def random_color(rng: random.Random, params: Sequence[Fraction], max_height: int) -> tuple[int, ...]:
    gaps = [0] * (len(params) + 1)
    for _ in range(rng.randint(0, max_height)):
        gaps[rng.randrange(len(gaps))] += 1
    return tuple(gaps)


def random_element(rng: random.Random, params: Sequence[Fraction], max_height: int = 3,
                   terms: int = 3, signed: bool = True) -> Characteristic:
    coeffs = Counter()
    for _ in range(rng.randint(1, terms)):
        c = rng.randint(-3, 3) if signed else rng.randint(1, 3)
        coeffs[random_color(rng, params, max_height)] += c
    return Characteristic(sort_params(params), coeffs)


def random_formula(rng: random.Random, free: Sequence[str], params: Sequence[Fraction],
                   depth: int = 3, size: int = 4):
    """Random formula with quantifier depth at most ``depth``."""
    counter = itertools.count()

    def term(scope):
        if params and rng.random() < 0.35:
            return Const(rng.choice(list(params)))
        return Var(rng.choice(scope))

    def gen(scope, qdepth, budget):
        r = rng.random()
        if budget <= 1 or r < 0.25:
            if rng.random() < 0.05:
                return rng.choice([TRUE, FALSE])
            return Atomic(term(scope), rng.choice(["<", "<", "="]), term(scope))
        if qdepth > 0 and r < 0.5:
            v = f"q{next(counter)}"
            body = gen(scope + [v], qdepth - 1, budget - 1)
            return Exists(v, body) if rng.random() < 0.5 else Forall(v, body)
        if r < 0.6:
            return Not(gen(scope, qdepth, budget - 1))
        op = rng.choice([And, And, Or, Or, Implies, Iff])
        left = gen(scope, qdepth, budget // 2)
        right = gen(scope, qdepth, budget - budget // 2)
        return op(left, right)

    scope = list(free) or ["x"]
    return gen(scope, depth, size * 2)


def random_point(rng: random.Random, names: Sequence[str], params: Sequence[Fraction]) -> dict:
    """Random rationals, biased towards hitting parameters and each other."""
    point: dict = {}
    pool = list(params)
    for v in names:
        r = rng.random()
        if pool and r < 0.3:
            val = rng.choice(pool)
        else:
            val = Fraction(rng.randint(-40, 40), rng.randint(1, 8))
        point[v] = val
        pool.append(val)
    return point
