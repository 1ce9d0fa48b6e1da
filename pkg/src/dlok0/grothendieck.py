"""The semiring of definable-bijection classes and its group completion K0.

Elements are :class:`~dlok0.characteristic.Characteristic` objects with
integer coefficients; the semiring is the non-negative part.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .atoms import sort_params, split
from .characteristic import Characteristic, chi, refine
from .formula import PositiveDNF

K0Element = Characteristic


def one(params=()) -> K0Element:
    return Characteristic.constant(1, params)


def zero(params=()) -> K0Element:
    return Characteristic(params)


def add(e1: K0Element, e2: K0Element) -> K0Element:
    return e1 + e2


def neg(e: K0Element) -> K0Element:
    return -e


def eq(e1: K0Element, e2: K0Element) -> bool:
    return e1 == e2


@lru_cache(maxsize=None)
def merge_counts(g: int, h: int) -> tuple[tuple[int, int], ...]:
    """Ways to merge descending chains of ``g`` and ``h`` free points in one
    gap, as ``(resulting length, multiplicity)`` pairs.

    With ``g <= h`` the merged chain has ``h + i`` points in
    ``C(h + i, i) * C(h, g - i)`` ways, ``0 <= i <= g``.
    """
    g, h = min(g, h), max(g, h)
    return tuple((h + i, comb(h + i, i) * comb(h, g - i)) for i in range(g + 1))


def color_product(u: tuple[int, ...], v: tuple[int, ...]) -> Counter:
    per_gap = [merge_counts(a, b) for a, b in zip(u, v)]
    out = Counter()
    for choice in itertools.product(*per_gap):
        coeff = 1
        for _, m in choice:
            coeff *= m
        out[tuple(r for r, _ in choice)] += coeff
    return out


def mul(e1: K0Element, e2: K0Element) -> K0Element:
    """Product of classes: refine to common parameters, then merge colors
    gap by gap."""
    params = sort_params(set(e1.params) | set(e2.params))
    a, b = refine(e1, params), refine(e2, params)
    out = Counter()
    for u, cu in a.coeffs.items():
        for v, cv in b.coeffs.items():
            for w, m in color_product(u, v).items():
                out[w] += cu * cv * m
    return Characteristic(params, out)


# ---------------------------------------------------------------------------

def php_check(d1: PositiveDNF, d2: PositiveDNF) -> bool:
    """For ``d1`` a proper subset of ``d2``: True iff their classes differ."""
    if d1.dim != d2.dim:
        raise ValueError("sets must live in the same dimension")
    params = sort_params(set(d1.params) | set(d2.params))
    a1 = set(split(d1, params))
    a2 = set(split(d2, params))
    if not a1 < a2:
        raise ValueError("first set is not a proper subset of the second")
    return chi(d1, params) != chi(d2, params)


def _fresh_points(params: tuple, gap: int, k: int) -> list[Fraction]:
    """``k`` new rationals strictly inside gap ``gap`` of ``params``."""
    upper = params[gap - 1] if gap > 0 else None
    lower = params[gap] if gap < len(params) else None
    if upper is not None and lower is not None:
        return [lower + (upper - lower) * j / (k + 1) for j in range(1, k + 1)]
    if upper is not None:
        return [upper - j for j in range(1, k + 1)]
    if lower is not None:
        return [lower + j for j in range(1, k + 1)]
    return [Fraction(j) for j in range(k)]


def is_effective(e: K0Element, budget: int) -> tuple[Fraction, ...] | None:
    """Search for a refinement with at most ``budget`` new parameters on which
    every coefficient of ``e`` is non-negative.

    Returns the witness parameter tuple, or None if nothing was found (which
    does not prove ineffectiveness).
    """
    if e.is_semiring():
        return e.params
    gaps = len(e.params) + 1
    for k in range(1, budget + 1):
        for placement in itertools.combinations_with_replacement(range(gaps), k):
            new = []
            for gap, cnt in Counter(placement).items():
                new.extend(_fresh_points(e.params, gap, cnt))
            target = sort_params(set(e.params) | set(new))
            if refine(e, target).is_semiring():
                return target
    return None


@dataclass(frozen=True)
class InjectionCertificate:
    """Gap ``gap`` of ``params`` meets the first set in a free block while the
    second set has no free block there, so no definable injection exists."""

    params: tuple
    gap: int
    color: tuple

    @property
    def interval(self) -> tuple:
        """(lower, upper) bounds of the gap, None for an infinite end."""
        upper = self.params[self.gap - 1] if self.gap > 0 else None
        lower = self.params[self.gap] if self.gap < len(self.params) else None
        return lower, upper


def no_injection_certificate(d1: PositiveDNF, d2: PositiveDNF) -> InjectionCertificate | None:
    params = sort_params(set(d1.params) | set(d2.params))
    c1 = chi(d1, params)
    c2 = chi(d2, params)
    for gap in range(len(params) + 1):
        if any(g[gap] for g in c2.coeffs):
            continue
        for color, _ in c1:
            if color[gap] > 0:
                return InjectionCertificate(params, gap, color)
    return None
