"""Global characteristics of definable sets and their refinement.

A characteristic is a finitely supported map from colors (gap vectors over a
descending parameter tuple) to integers. Coefficients of characteristics of
actual sets are non-negative; the same class doubles as the element type of
the Grothendieck ring, where negative coefficients are allowed.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .atoms import check_params, enumerate_atoms, gap_vector, sample_point, sort_params
from .formula import (
    Const,
    Constraint,
    PositiveDNF,
    Var,
    dnf_and,
    format_rational,
    parse_rational,
)


class Characteristic:
    """Integer-valued map on colors over a fixed parameter tuple.

    Equality (``==``) is equality in the Grothendieck ring: both sides are
    refined to the union of their parameter sets and compared there.
    """

    __slots__ = ("params", "coeffs")

    def __init__(self, params: Sequence[Fraction] = (), coeffs: Mapping | None = None):
        self.params = check_params(params)
        width = len(self.params) + 1
        clean = {}
        for gaps, c in (coeffs or {}).items():
            gaps = tuple(int(g) for g in gaps)
            if len(gaps) != width or any(g < 0 for g in gaps):
                raise ValueError(f"bad gap vector {gaps} for {len(self.params)} parameters")
            if c:
                clean[gaps] = clean.get(gaps, 0) + int(c)
        self.coeffs = {k: v for k, v in clean.items() if v}

    @classmethod
    def constant(cls, n: int, params: Sequence[Fraction] = ()) -> "Characteristic":
        params = check_params(params)
        return cls(params, {(0,) * (len(params) + 1): n})

    def __repr__(self):
        return f"Characteristic({[format_rational(p) for p in self.params]}, {dict(sorted(self.coeffs.items()))})"

    def __bool__(self):
        return bool(self.coeffs)

    def __iter__(self):
        return iter(sorted(self.coeffs.items(), reverse=True))

    def __getitem__(self, gaps) -> int:
        return self.coeffs.get(tuple(gaps), 0)

    def height(self) -> int:
        """Largest color height with non-zero coefficient (-1 for zero)."""
        return max((sum(g) for g in self.coeffs), default=-1)

    def is_semiring(self) -> bool:
        return all(c > 0 for c in self.coeffs.values())

    def refine(self, target: Iterable[Fraction]) -> "Characteristic":
        return refine(self, target)

    def _aligned(self, other):
        if not isinstance(other, Characteristic):
            if isinstance(other, int):
                other = Characteristic.constant(other, self.params)
            else:
                return None, None
        union = sort_params(set(self.params) | set(other.params))
        return refine(self, union), refine(other, union)

    def __add__(self, other):
        a, b = self._aligned(other)
        if a is None:
            return NotImplemented
        out = Counter(a.coeffs)
        out.update(b.coeffs)
        return Characteristic(a.params, out)

    __radd__ = __add__

    def __neg__(self):
        return Characteristic(self.params, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        a, b = self._aligned(other)
        if a is None:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return Characteristic(self.params, {k: v * other for k, v in self.coeffs.items()})
        if not isinstance(other, Characteristic):
            return NotImplemented
        from .grothendieck import mul
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self * other
        return NotImplemented

    def __pow__(self, k: int):
        out = Characteristic.constant(1, self.params)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        a, b = self._aligned(other)
        if a is None:
            return NotImplemented
        return a.coeffs == b.coeffs

    __hash__ = None

    def same_representation(self, other: "Characteristic") -> bool:
        return self.params == other.params and self.coeffs == other.coeffs

    def to_json(self) -> dict:
        return {
            "params": [format_rational(p) for p in self.params],
            "colors": [{"gaps": list(g), "coeff": c} for g, c in self],
        }

    @classmethod
    def from_json(cls, data) -> "Characteristic":
        if isinstance(data, str):
            data = json.loads(data)
        params = [parse_rational(p) for p in data["params"]]
        return cls(params, {tuple(c["gaps"]): c["coeff"] for c in data["colors"]})


# ---------------------------------------------------------------------------

def chi(d: PositiveDNF, params: Iterable[Fraction] | None = None) -> Characteristic:
    """Number of atoms of each color contained in ``d``."""
    params = sort_params(d.params if params is None else params)
    missing = set(d.params) - set(params)
    if missing:
        raise ValueError(f"parameter set misses {sorted(missing)}")
    counts = Counter()
    for a in enumerate_atoms(d.dim, params):
        if d.contains(sample_point(a)):
            counts[gap_vector(a)] += 1
    return Characteristic(params, counts)


def _distribute(g: int, k: int):
    """Ways to spread a descending chain of ``g`` free blocks over ``k`` new
    pins inside one gap: yields ``k + 1`` sub-gap counts (pins take 0 or 1)."""
    def rec(remaining, pins_left, acc):
        if pins_left == 0:
            yield acc + (remaining,)
            return
        for here in range(remaining + 1):
            rest = remaining - here
            yield from rec(rest, pins_left - 1, acc + (here,))
            if rest:
                yield from rec(rest - 1, pins_left - 1, acc + (here,))
    yield from rec(g, k, ())


def refine(c: Characteristic, target: Iterable[Fraction]) -> Characteristic:
    """Re-express ``c`` over the larger parameter set ``target``.

    Within each old gap the free blocks are distributed order-preservingly
    over the new sub-gaps and the new pins, each pin absorbing at most one
    block.
    """
    target = sort_params(target)
    if target == c.params:
        return c
    if not set(c.params) <= set(target):
        raise ValueError("refinement target must contain the current parameters")
    # number of new parameters inside each old gap
    inside = [0] * (len(c.params) + 1)
    j = 0
    for p in target:
        if j < len(c.params) and p == c.params[j]:
            j += 1
        else:
            inside[j] += 1
    out = Counter()
    for gaps, coeff in c.coeffs.items():
        per_gap = [list(_distribute(g, k)) for g, k in zip(gaps, inside)]
        for choice in itertools.product(*per_gap):
            out[tuple(itertools.chain.from_iterable(choice))] += coeff
    return Characteristic(target, out)


def equivalent(d1: PositiveDNF, d2: PositiveDNF) -> tuple[bool, tuple[Fraction, ...]]:
    """Whether a definable bijection ``d1 -> d2`` exists, with the parameter
    set on which the characteristics were compared."""
    params = sort_params(set(d1.params) | set(d2.params))
    return chi(d1, params).same_representation(chi(d2, params)), params


def delta_pad(d: PositiveDNF, m: int, names: Sequence[str] | None = None) -> PositiveDNF:
    """Lift ``d`` to dimension ``m`` by forcing the new coordinates to equal
    the first one."""
    n = d.dim
    if n < 1:
        raise ValueError("padding needs at least one variable")
    if m < n:
        raise ValueError("target dimension must be at least the current one")
    if m == n:
        return d
    if names is None:
        taken = set(d.variables)
        names = []
        i = 1
        while len(names) < m - n:
            cand = f"x{n + i}"
            i += 1
            if cand not in taken:
                names.append(cand)
    names = list(names)
    if len(names) != m - n:
        raise ValueError("need one name per new coordinate")
    first = Var(d.variables[0])
    extra = frozenset({frozenset(Constraint.make(Var(v), "=", first) for v in names)})
    return PositiveDNF(dnf_and(d.clauses, extra), d.variables + tuple(names), d.params)


# ---------------------------------------------------------------------------
# the order with a minimum endpoint, modelled as {q in Q : q >= 0}

ENDPOINT = Fraction(0)


def restrict_to_endpoint_order(d: PositiveDNF) -> PositiveDNF:
    """Conjoin ``x >= 0`` for every coordinate."""
    bounds = frozenset({frozenset()})
    zero = Const(ENDPOINT)
    for v in d.variables:
        ge = frozenset({frozenset({Constraint.make(zero, "<", Var(v))}),
                        frozenset({Constraint.make(zero, "=", Var(v))})})
        bounds = dnf_and(bounds, ge)
    return PositiveDNF(dnf_and(d.clauses, bounds), d.variables, d.params | {ENDPOINT})


def min_endpoint_chi(d: PositiveDNF, params: Iterable[Fraction] | None = None) -> Characteristic:
    """Characteristic of a set definable in ``[0, oo)``, computed in Q.

    The endpoint 0 is always a parameter; the gap below it is empty for every
    atom of the set.
    """
    params = set(d.params if params is None else params) | {ENDPOINT}
    if any(p < ENDPOINT for p in params):
        raise ValueError("parameters of the endpoint order must be >= 0")
    return chi(restrict_to_endpoint_order(d), params)


def collapse_endpoint(c: Characteristic) -> Characteristic:
    """Send an endpoint characteristic to Q by letting the endpoint play -oo.

    The endpoint is dropped from the parameters and the (empty) gap below it
    disappears, so the gap just above it becomes the bottom gap.
    """
    if not c.params or c.params[-1] != ENDPOINT:
        raise ValueError("characteristic must be taken over a set containing the endpoint")
    out = {}
    for gaps, coeff in c.coeffs.items():
        if gaps[-1]:
            raise ValueError("color has points below the endpoint")
        out[gaps[:-1]] = coeff
    return Characteristic(c.params[:-1], out)
