"""Generator polynomials for K0 and the isomorphism with the ring of classes.

A generator ``X(a;n)`` stands for the class of a descending chain of ``n``
free points directly above ``a`` (``a`` rational or ``-inf``). Polynomials
reduce modulo the same-parameter product relations to a normal form in which
no monomial repeats a parameter; ``zeta`` evaluates a polynomial in K0 and
``zeta_inv`` recovers the normal form from a class.
"""

from __future__ import annotations

import itertools
import random
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Iterable, Mapping

from .atoms import NEG_INF, chain_atom, gap_vector, sort_params
from .characteristic import Characteristic, refine
from .formula import ParseError, format_rational, parse_rational
from .grothendieck import mul


@dataclass(frozen=True)
class Generator:
    a: object  # Fraction or NEG_INF
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("generator index must be positive")
        if self.a != NEG_INF:
            object.__setattr__(self, "a", Fraction(self.a))

    def __str__(self):
        return f"X({format_param(self.a)};{self.n})"


def format_param(a) -> str:
    return "-inf" if a == NEG_INF else format_rational(a)


def parse_param(text: str):
    text = text.strip()
    if text == "-inf":
        return NEG_INF
    return parse_rational(text)


def _gen_key(g: Generator):
    return (-g.a, -g.n)


def _monomial(gens: Iterable[Generator]) -> tuple:
    return tuple(sorted(gens, key=_gen_key))


class GenPoly:
    """Integer polynomial in the generators ``X(a;n)``."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        clean = Counter()
        for mono, c in (terms or {}).items():
            clean[_monomial(mono)] += int(c)
        self.terms = {m: c for m, c in clean.items() if c}

    @classmethod
    def const(cls, c: int) -> "GenPoly":
        return cls({(): c})

    @classmethod
    def gen(cls, a, n: int) -> "GenPoly":
        return cls({(Generator(a, n),): 1})

    def __add__(self, other):
        if isinstance(other, int):
            other = GenPoly.const(other)
        if not isinstance(other, GenPoly):
            return NotImplemented
        out = Counter(self.terms)
        out.update(other.terms)
        return GenPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return GenPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = GenPoly.const(other)
        if not isinstance(other, GenPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return GenPoly({m: c * other for m, c in self.terms.items()})
        if not isinstance(other, GenPoly):
            return NotImplemented
        out = Counter()
        for (m1, c1), (m2, c2) in itertools.product(self.terms.items(), other.terms.items()):
            out[_monomial(m1 + m2)] += c1 * c2
        return GenPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = GenPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = GenPoly.const(other)
        if not isinstance(other, GenPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"GenPoly({format_genpoly(self)!r})"

    def __str__(self):
        return format_genpoly(self)

    def params(self) -> frozenset:
        return frozenset(g.a for m in self.terms for g in m if g.a != NEG_INF)

    def is_normal(self) -> bool:
        return all(len({g.a for g in m}) == len(m) for m in self.terms)

    def height(self) -> int:
        return max((sum(g.n for g in m) for m in self.terms), default=-1)


def rel(k: int, l: int, a=Fraction(0)) -> GenPoly:
    """The ideal generator ``X(a;k) X(a;l) - sum_i C(k+i,i) C(k,l-i) X(a;k+i)``."""
    if not 1 <= l <= k:
        raise ValueError("need 1 <= l <= k")
    prod = GenPoly.gen(a, k) * GenPoly.gen(a, l)
    return prod - _product_expansion(k, l, a)


def _product_expansion(k, l, a) -> GenPoly:
    return GenPoly({(Generator(a, k + i),): comb(k + i, i) * comb(k, l - i) for i in range(l + 1)})


# ---------------------------------------------------------------------------
# text syntax

def _poly_sort_key(mono, asc_params):
    weight = Counter()
    for g in mono:
        weight[g.a] += g.n
    return (-sum(weight.values()), tuple(-weight[a] for a in asc_params),
            [(str(g.a), g.n) for g in mono])


def format_genpoly(p: GenPoly) -> str:
    if not p.terms:
        return "0"
    asc = sorted({g.a for m in p.terms for g in m})
    out = []
    for mono in sorted(p.terms, key=lambda m: _poly_sort_key(m, asc)):
        c = p.terms[mono]
        body = "*".join(str(g) for g in mono)
        mag = abs(c)
        if not body:
            piece = str(mag)
        elif mag == 1:
            piece = body
        else:
            piece = f"{mag}*{body}"
        if not out:
            out.append(piece if c > 0 else f"-{piece}")
        else:
            out.append(f"{'+' if c > 0 else '-'} {piece}")
    return " ".join(out)


_POLY_TOKEN = re.compile(r"\s*(?:(?P<gen>X\(\s*(?P<a>-inf|-?\d+(?:/\d+)?)\s*;\s*(?P<n>\d+)\s*\))"
                         r"|(?P<int>\d+)|(?P<op>[-+*()]))")


def parse_genpoly(text: str) -> GenPoly:
    """Parse sums/products of integers and generators ``X(a;n)``."""
    tokens = []
    pos = 0
    stripped = text.rstrip()
    while pos < len(stripped):
        m = _POLY_TOKEN.match(stripped, pos)
        if not m:
            raise ParseError(f"unknown token {stripped[pos:].lstrip()[:1]!r}", pos)
        if m.group("gen"):
            try:
                tokens.append(("poly", GenPoly.gen(parse_param(m.group("a")), int(m.group("n"))), m.start("gen")))
            except ValueError as exc:
                raise ParseError(str(exc), m.start("gen")) from None
        elif m.group("int"):
            tokens.append(("poly", GenPoly.const(int(m.group("int"))), m.start("int")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("eof", None, len(stripped)))
    i = 0

    def peek():
        return tokens[i]

    def take():
        nonlocal i
        i += 1
        return tokens[i - 1]

    def expr():
        kind, val, _ = peek()
        sign = 1
        if kind == "op" and val in "+-":
            take()
            sign = -1 if val == "-" else 1
        acc = term() * sign
        while peek()[0] == "op" and peek()[1] in "+-":
            op = take()[1]
            t = term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term():
        acc = factor()
        while peek()[0] == "op" and peek()[1] == "*":
            take()
            acc = acc * factor()
        return acc

    def factor():
        kind, val, p = take()
        if kind == "poly":
            return val
        if kind == "op" and val == "(":
            inner = expr()
            k2, v2, p2 = take()
            if v2 != ")":
                raise ParseError("expected ')'", p2)
            return inner
        if kind == "op" and val == "-":
            return -factor()
        raise ParseError(f"unexpected {val if val is not None else 'end of input'!r}", p)

    result = expr()
    if peek()[0] != "eof":
        raise ParseError(f"unexpected {peek()[1]!r}", peek()[2])
    return result


def genpoly_to_json(p: GenPoly) -> dict:
    asc = sorted({g.a for m in p.terms for g in m})
    return {
        "poly": format_genpoly(p),
        "terms": [{"coeff": p.terms[m], "gens": [[format_param(g.a), g.n] for g in m]}
                  for m in sorted(p.terms, key=lambda m: _poly_sort_key(m, asc))],
    }


def genpoly_from_json(data) -> GenPoly:
    return GenPoly({tuple(Generator(parse_param(a), n) for a, n in t["gens"]): t["coeff"]
                    for t in data["terms"]})


# ---------------------------------------------------------------------------
# reduction modulo the product relations

def reduce_mod_I(p: GenPoly, rng: random.Random | None = None) -> GenPoly:
    """Normal form: rewrite ``X(a;k) X(a;l)`` (``l <= k``) by its expansion
    until no monomial repeats a parameter.

    ``rng`` picks which repeated pair to rewrite, for confluence testing;
    by default the first one is taken.
    """
    work = Counter(p.terms)
    done = Counter()
    while work:
        mono, c = work.popitem()
        if not c:
            continue
        by_param: dict = {}
        for idx, g in enumerate(mono):
            by_param.setdefault(g.a, []).append(idx)
        repeated = [ix for ix in by_param.values() if len(ix) > 1]
        if not repeated:
            done[mono] += c
            continue
        group = rng.choice(repeated) if rng else repeated[0]
        i, j = rng.sample(group, 2) if rng else group[:2]
        gi, gj = mono[i], mono[j]
        k, l = max(gi.n, gj.n), min(gi.n, gj.n)
        rest = [g for idx, g in enumerate(mono) if idx not in (i, j)]
        for (new,), coeff in _product_expansion(k, l, gi.a).terms.items():
            work[_monomial(rest + [new])] += c * coeff
    return GenPoly(done)


def in_ideal(p: GenPoly) -> bool:
    """Membership in the relation ideal, decided by evaluating in K0."""
    return not zeta(reduce_mod_I(p))


# ---------------------------------------------------------------------------
# the isomorphism with K0

@lru_cache(maxsize=None)
def _generator_class(a, n: int, params: tuple) -> Characteristic:
    atom = chain_atom((a,), (n,))
    base = Characteristic(atom.params, {gap_vector(atom): 1})
    return refine(base, params)


def zeta(p: GenPoly, params: Iterable[Fraction] | None = None) -> Characteristic:
    """Evaluate ``p`` in K0, each ``X(a;n)`` going to the class of its chain."""
    needed = p.params()
    params = sort_params(needed if params is None else params)
    if not needed <= set(params):
        raise ValueError(f"parameters {sorted(needed - set(params))} missing")
    total = Characteristic(params)
    for mono, c in p.terms.items():
        term = Characteristic.constant(1, params)
        for g in mono:
            term = mul(term, _generator_class(g.a, g.n, params))
        total = total + term * c
    return total


def _color_key(gaps):
    return (sum(gaps), gaps[::-1])


def color_monomial(params: tuple, gaps: tuple) -> tuple:
    """Normal-form monomial whose leading color is ``gaps``: one generator per
    non-empty gap, sitting on the gap's lower endpoint."""
    gens = []
    for i, c in enumerate(gaps):
        if c:
            lower = params[i] if i < len(params) else NEG_INF
            gens.append(Generator(lower, c))
    return _monomial(gens)


def zeta_inv(e: Characteristic, max_steps: int = 100_000) -> GenPoly:
    """Normal-form polynomial mapping to ``e``.

    Peels off the largest color (highest, then largest bottom gap, and so on
    upward) together with its monomial until nothing is left.
    """
    params = e.params
    rest = Characteristic(params, e.coeffs)
    out = Counter()
    for _ in range(max_steps):
        if not rest:
            return GenPoly(out)
        top = max(rest.coeffs, key=_color_key)
        c = rest.coeffs[top]
        mono = color_monomial(params, top)
        out[mono] += c
        rest = rest - zeta(GenPoly({mono: 1}), params) * c
        if rest.params != params:
            raise RuntimeError("parameter set changed during inversion")
        if rest[top]:
            raise RuntimeError(f"triangularity violated at color {top}")
    raise RuntimeError("zeta_inv did not terminate")


# ---------------------------------------------------------------------------
# identities

def interval_class(b, a, n: int) -> Characteristic:
    """Class of ``n`` descending free points strictly between ``a < b``."""
    atom = chain_atom((b, a), (0, n))
    return Characteristic(atom.params, {gap_vector(atom): 1})


def f_poly(n: int, b, a) -> GenPoly:
    """Normal form of ``n`` free points between ``a`` and ``b``."""
    return zeta_inv(interval_class(b, a, n))


def _check_order(*xs):
    if any(not x < y for x, y in zip(xs, xs[1:])):
        raise ValueError("parameters must be strictly increasing")


def _k0_equal(lhs: GenPoly, rhs: GenPoly) -> bool:
    params = sort_params(lhs.params() | rhs.params())
    return zeta(lhs, params) == zeta(rhs, params)


def convolution_sides(n: int, a, c, b) -> tuple[GenPoly, GenPoly]:
    _check_order(a, c, b)
    lhs = f_poly(n, b, a)
    rhs = GenPoly()
    for i in range(n + 1):
        rhs = rhs + f_poly(i, b, c) * f_poly(n - i, c, a)
    for i in range(n):
        rhs = rhs + f_poly(i, b, c) * f_poly(n - 1 - i, c, a)
    return lhs, rhs


def verify_convolution(n: int, a, c, b) -> bool:
    """Splitting ``n`` points in ``(a, b)`` at ``c``: each point lies above,
    at, or below ``c``."""
    return _k0_equal(*convolution_sides(n, a, c, b))


def factorial_sides(n: int, a, b) -> tuple[GenPoly, GenPoly]:
    if n < 1:
        raise ValueError("n must be positive")
    _check_order(a, b)
    f1 = f_poly(1, b, a)
    rhs = GenPoly.const(1)
    for i in range(n):
        rhs = rhs * (f1 - i)
    return f_poly(n, b, a) * factorial(n), rhs


def verify_factorial(n: int, a, b) -> bool:
    return _k0_equal(*factorial_sides(n, a, b))


# falling-factorial substitution X(a;j) -> T_a (T_a - 1) ... (T_a - j + 1) / j!
# into polynomials with rational coefficients in one variable T_a per parameter

def _qpoly_mul(p, q):
    out = Counter()
    for (m1, c1), (m2, c2) in itertools.product(p.items(), q.items()):
        exps = Counter(dict(m1))
        exps.update(dict(m2))
        out[tuple(sorted(exps.items(), key=lambda kv: str(kv[0])))] += c1 * c2
    return {m: c for m, c in out.items() if c}


@lru_cache(maxsize=None)
def _binomial_poly(a, j: int):
    poly = {(): Fraction(1)}
    for i in range(j):
        poly = _qpoly_mul(poly, {((a, 1),): Fraction(1), (): Fraction(-i)})
    return {m: c / factorial(j) for m, c in poly.items()}


def falling_factorial_substitution(p: GenPoly) -> dict:
    """Image of ``p`` under ``X(a;j) -> binomial(T_a, j)``; zero is ``{}``."""
    total = Counter()
    for mono, c in p.terms.items():
        poly = {(): Fraction(c)}
        for g in mono:
            poly = _qpoly_mul(poly, _binomial_poly(g.a, g.n))
        total.update(poly)
    return {m: c for m, c in total.items() if c}


def falling_factorial(a, l: int) -> GenPoly:
    """``X(a;1) (X(a;1) - 1) ... (X(a;1) - l + 1)``."""
    out = GenPoly.const(1)
    for i in range(l):
        out = out * (GenPoly.gen(a, 1) - i)
    return out


def iprime_generator(k: int, a=Fraction(0)) -> GenPoly:
    return GenPoly.gen(a, k) * factorial(k) - falling_factorial(a, k)


def iprime_congruence(k: int, l: int, a=Fraction(0)) -> GenPoly:
    """``X_k (X_1)(X_1 - 1)...(X_1 - l + 1) - l! * sum_i C(k+i,i) C(k,l-i) X_{k+i}``."""
    if not 1 <= l <= k:
        raise ValueError("need 1 <= l <= k")
    return GenPoly.gen(a, k) * falling_factorial(a, l) - _product_expansion(k, l, a) * factorial(l)


def verify_Iprime_congruence(k: int, l: int, a=Fraction(0)) -> bool:
    return not falling_factorial_substitution(iprime_congruence(k, l, a))


def iprime_multiplier(k: int, l: int, a=Fraction(0)) -> int:
    """Certified multiplier ``l!`` for ``rel(k, l)``.

    Checks that ``l! * rel(k, l)`` minus the congruence polynomial is exactly
    ``X(a;k)`` times a generator of the smaller ideal, and that the congruence
    polynomial vanishes under the falling-factorial substitution.
    """
    m = factorial(l)
    diff = rel(k, l, a) * m - iprime_congruence(k, l, a)
    if diff != GenPoly.gen(a, k) * iprime_generator(l, a):
        raise RuntimeError(f"certificate for ({k}, {l}) failed")
    if not verify_Iprime_congruence(k, l, a):
        raise RuntimeError(f"congruence ({k}, {l}) does not vanish")
    return m


def substitute_param(p: GenPoly, old, new) -> GenPoly:
    """Rename the parameter ``old`` to ``new`` in every generator."""
    def swap(g):
        return Generator(new, g.n) if g.a == old else g
    return GenPoly({tuple(swap(g) for g in m): c for m, c in p.terms.items()})
