"""Related sets: the atoms of the boolean algebra of definable sets with
fixed parameters, together with their heights, colors and sample points.

An atom is stored as a strictly descending chain of blocks. A block is a set
of variable indices (0-based, into the ambient variable tuple) that are
equal to each other and, for a pinned block, to a parameter.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .formula import Const, Constraint, PositiveDNF, Var, format_rational

NEG_INF = float("-inf")


def sort_params(params: Iterable) -> tuple[Fraction, ...]:
    """Strictly descending tuple of exact rationals."""
    return tuple(sorted({Fraction(p) for p in params}, reverse=True))


def check_params(params: Sequence[Fraction]) -> tuple[Fraction, ...]:
    params = tuple(Fraction(p) for p in params)
    if any(a <= b for a, b in zip(params, params[1:])):
        raise ValueError("parameters must be strictly descending")
    return params


@dataclass(frozen=True)
class Block:
    vars: frozenset
    pin: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "vars", frozenset(self.vars))
        if self.pin is None and not self.vars:
            raise ValueError("a free block needs at least one variable")
        if self.pin is not None:
            object.__setattr__(self, "pin", Fraction(self.pin))

    @property
    def free(self) -> bool:
        return self.pin is None


@dataclass(frozen=True)
class Atom:
    blocks: tuple
    params: tuple

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        object.__setattr__(self, "params", check_params(self.params))
        pins = tuple(b.pin for b in self.blocks if not b.free)
        if pins != self.params:
            raise ValueError("pinned blocks must match the parameter chain")
        seen = [i for b in self.blocks for i in b.vars]
        if len(seen) != len(set(seen)) or set(seen) != set(range(len(seen))):
            raise ValueError("every variable index must occur in exactly one block")

    @property
    def dim(self) -> int:
        return sum(len(b.vars) for b in self.blocks)

    def format(self, names: Sequence[str] | None = None) -> str:
        if names is None:
            names = [f"x{i + 1}" for i in range(self.dim)]
        parts = []
        for b in self.blocks:
            members = [names[i] for i in sorted(b.vars)]
            if not b.free:
                members.insert(0, format_rational(b.pin))
            parts.append(" = ".join(members))
        return " > ".join(parts) if parts else "true"

    def __str__(self):
        return self.format()

    def constraints(self, names: Sequence[str]) -> frozenset:
        """The canonical conjunction defining this atom."""
        out = []
        reps = []
        for b in self.blocks:
            members = [Var(names[i]) for i in sorted(b.vars)]
            if not b.free:
                members.insert(0, Const(b.pin))
            rep = members[0]
            out.extend(Constraint.make(rep, "=", m) for m in members[1:])
            reps.append(rep)
        out.extend(Constraint.make(lo, "<", hi) for hi, lo in zip(reps, reps[1:]))
        return frozenset(out)

    def to_dnf(self, names: Sequence[str]) -> PositiveDNF:
        return PositiveDNF(frozenset({self.constraints(names)}), tuple(names), frozenset(self.params))

    def permuted(self, perm: Sequence[int]) -> "Atom":
        """Relabel variable ``i`` as ``perm[i]``."""
        return Atom(tuple(Block({perm[i] for i in b.vars}, b.pin) for b in self.blocks), self.params)


def _subsets(items):
    items = sorted(items)
    for mask in range(1 << len(items)):
        yield frozenset(x for j, x in enumerate(items) if mask >> j & 1)


def enumerate_atoms(n: int, params: Sequence[Fraction] = ()) -> list[Atom]:
    """All atoms in dimension ``n`` over the descending parameter chain."""
    params = check_params(params)
    out: list[Atom] = []

    def build(remaining, k, chain):
        if not remaining and k == len(params):
            out.append(Atom(tuple(chain), params))
            return
        if k < len(params):
            for s in _subsets(remaining):
                chain.append(Block(s, params[k]))
                build(remaining - s, k + 1, chain)
                chain.pop()
        for s in _subsets(remaining):
            if s:
                chain.append(Block(s))
                build(remaining - s, k, chain)
                chain.pop()

    build(frozenset(range(n)), 0, [])
    return out


def sample_point(a: Atom) -> tuple[Fraction, ...]:
    """A rational tuple inside the atom.

    Free blocks get midpoints of their gap (evenly spaced when several share a
    gap); in an unbounded gap they sit at integer steps beyond the bound.
    """
    values: list[Fraction] = [Fraction(0)] * a.dim
    run: list[Block] = []
    upper = None

    def place(run, upper, lower):
        k = len(run)
        for j, b in enumerate(run, start=1):
            if upper is not None and lower is not None:
                v = upper - (upper - lower) * j / (k + 1)
            elif upper is None and lower is not None:
                v = lower + (k - j + 1)
            elif upper is not None:
                v = upper - j
            else:
                v = Fraction(k - j + 1)
            for i in b.vars:
                values[i] = Fraction(v)

    for b in a.blocks:
        if b.free:
            run.append(b)
            continue
        place(run, upper, b.pin)
        for i in b.vars:
            values[i] = b.pin
        run = []
        upper = b.pin
    place(run, upper, None)
    return tuple(values)


def height(a: Atom) -> int:
    return sum(1 for b in a.blocks if b.free)


def gap_vector(a: Atom) -> tuple[int, ...]:
    """Free-block counts per gap: entry 0 above the largest parameter,
    the last entry below the smallest."""
    counts = [0]
    for b in a.blocks:
        if b.free:
            counts[-1] += 1
        else:
            counts.append(0)
    return tuple(counts)


def color_of(a: Atom) -> tuple[tuple[Fraction, ...], tuple[int, ...]]:
    return a.params, gap_vector(a)


def chain_atom(params: Sequence, counts: Sequence[int]) -> Atom:
    """The chain with ``counts[i]`` free points directly above ``params[i]``.

    ``params`` is descending and may end with ``NEG_INF``, the formal bottom;
    the count attached to it lands in the gap below the last real parameter.
    """
    if len(params) != len(counts):
        raise ValueError("params and counts must have the same length")
    if any(c < 0 for c in counts):
        raise ValueError("counts must be non-negative")
    params = list(params)
    counts = list(counts)
    if any(p == NEG_INF for p in params[:-1]):
        raise ValueError("-inf may only appear as the last parameter")
    tail = 0
    if params and params[-1] == NEG_INF:
        params.pop()
        tail = counts.pop()
    real = check_params(params)
    blocks = []
    idx = 0
    for p, c in zip(real, counts):
        for _ in range(c):
            blocks.append(Block({idx}))
            idx += 1
        blocks.append(Block(frozenset(), p))
    for _ in range(tail):
        blocks.append(Block({idx}))
        idx += 1
    return Atom(tuple(blocks), real)


def color_chain_atom(params: Sequence[Fraction], gaps: Sequence[int]) -> Atom:
    """A representative atom of the color ``gaps`` over ``params``."""
    params = check_params(params)
    if len(gaps) != len(params) + 1:
        raise ValueError("gap vector length must be len(params) + 1")
    blocks = []
    idx = 0
    for i, c in enumerate(gaps):
        for _ in range(c):
            blocks.append(Block({idx}))
            idx += 1
        if i < len(params):
            blocks.append(Block(frozenset(), params[i]))
    return Atom(tuple(blocks), params)


def split(d: PositiveDNF, params: Sequence[Fraction] | None = None) -> list[Atom]:
    """Atoms (in dimension ``d.dim``) contained in the set ``d``.

    ``params`` defaults to the parameters of ``d`` and must include them.
    """
    params = sort_params(d.params if params is None else params)
    missing = set(d.params) - set(params)
    if missing:
        raise ValueError(f"parameter set misses {sorted(missing)}")
    return [a for a in enumerate_atoms(d.dim, params) if d.contains(sample_point(a))]


def atom_of_point(point: Sequence[Fraction], params: Sequence[Fraction]) -> Atom:
    """The unique atom containing ``point``."""
    params = check_params(params)
    values = sorted({Fraction(v) for v in point} | set(params), reverse=True)
    blocks = []
    for v in values:
        members = {i for i, x in enumerate(point) if x == v}
        blocks.append(Block(members, v if v in params else None))
    return Atom(tuple(blocks), params)

