"""First-order formulas over the signature {<} with exact rational parameters.

Covers parsing, pretty-printing, finite-witness evaluation and conversion of
quantifier-free formulas into a positive DNF (clauses of ``<`` and ``=``
atoms only).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union


class ParseError(ValueError):
    """Raised on malformed formula text; ``pos`` is the character offset."""

    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        if pos is not None:
            message = f"{message} at position {pos}"
        super().__init__(message)


# ---------------------------------------------------------------------------
# terms and formulas

@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    value: Fraction

    def __post_init__(self):
        # Fraction already normalises sign and lowest terms
        object.__setattr__(self, "value", Fraction(self.value))

    def __str__(self):
        return format_rational(self.value)


Term = Union[Var, Const]


@dataclass(frozen=True)
class Atomic:
    lhs: Term
    rel: str  # "<" or "="
    rhs: Term

    def __post_init__(self):
        if self.rel not in ("<", "="):
            raise ValueError(f"unsupported relation {self.rel!r}")


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


Formula = Union[Atomic, Top, Bottom, Not, And, Or, Implies, Iff, Exists, Forall]

TRUE = Top()
FALSE = Bottom()

_BINARY = {And: "&", Or: "|", Implies: "->", Iff: "<->"}


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    if not re.fullmatch(r"-?\d+(/\d+)?", text.strip()):
        raise ValueError(f"not a rational: {text!r}")
    try:
        return Fraction(text.strip())
    except ZeroDivisionError:
        raise ValueError(f"zero denominator: {text!r}") from None


def conj(*parts: Formula) -> Formula:
    parts = [p for p in parts if not isinstance(p, Top)]
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(*parts: Formula) -> Formula:
    parts = [p for p in parts if not isinstance(p, Bottom)]
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


# ---------------------------------------------------------------------------
# traversal helpers

def _children(f):
    if isinstance(f, (Atomic, Top, Bottom)):
        return ()
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, (Exists, Forall)):
        return (f.body,)
    return (f.left, f.right)


def free_variables(f: Formula) -> tuple[str, ...]:
    """Free variables in order of first occurrence (left to right)."""
    seen: dict[str, None] = {}

    def walk(g, bound):
        if isinstance(g, Atomic):
            for t in (g.lhs, g.rhs):
                if isinstance(t, Var) and t.name not in bound:
                    seen.setdefault(t.name)
        elif isinstance(g, (Exists, Forall)):
            walk(g.body, bound | {g.var})
        else:
            for c in _children(g):
                walk(c, bound)

    walk(f, frozenset())
    return tuple(seen)


def parameters(f: Formula) -> frozenset[Fraction]:
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Atomic):
            out.update(t.value for t in (g.lhs, g.rhs) if isinstance(t, Const))
        else:
            stack.extend(_children(g))
    return frozenset(out)


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, (Exists, Forall)):
        return False
    return all(is_quantifier_free(c) for c in _children(f))


def _all_names(f) -> set[str]:
    names = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Atomic):
            names.update(t.name for t in (g.lhs, g.rhs) if isinstance(t, Var))
        elif isinstance(g, (Exists, Forall)):
            names.add(g.var)
            stack.append(g.body)
        else:
            stack.extend(_children(g))
    return names


def substitute(f: Formula, name: str, term: Term) -> Formula:
    """Replace free occurrences of variable ``name`` by ``term``.

    Capture-free as long as ``term`` is a constant or a name not bound in f,
    which holds for renamed-apart formulas.
    """
    if isinstance(f, Atomic):
        def sub(t):
            return term if isinstance(t, Var) and t.name == name else t
        return Atomic(sub(f.lhs), f.rel, sub(f.rhs))
    if isinstance(f, (Top, Bottom)):
        return f
    if isinstance(f, Not):
        return Not(substitute(f.arg, name, term))
    if isinstance(f, (Exists, Forall)):
        if f.var == name:
            return f
        return type(f)(f.var, substitute(f.body, name, term))
    return type(f)(substitute(f.left, name, term), substitute(f.right, name, term))


def rename_apart(f: Formula, reserved: Iterable[str] = ()) -> Formula:
    """Rename bound variables so none clashes with a free or reserved name
    or with another binder."""
    taken = set(free_variables(f)) | set(reserved)
    all_names = _all_names(f) | taken

    def fresh(base):
        for i in itertools.count(1):
            cand = f"{base}_{i}"
            if cand not in all_names:
                all_names.add(cand)
                return cand

    def walk(g):
        if isinstance(g, (Exists, Forall)):
            var = g.var
            body = g.body
            if var in taken:
                new = fresh(var)
                body = substitute(body, var, Var(new))
                var = new
            taken.add(var)
            return type(g)(var, walk(body))
        if isinstance(g, (Atomic, Top, Bottom)):
            return g
        if isinstance(g, Not):
            return Not(walk(g.arg))
        return type(g)(walk(g.left), walk(g.right))

    return walk(f)


# ---------------------------------------------------------------------------
# parser

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<ident>[a-z][a-z0-9_]*)|(?P<quant>[EA])(?![A-Za-z0-9_])"
    r"|(?P<op><->|->|<=|>=|[<>=!&|().\-]))"
)

_KEYWORDS = {"true", "false"}
_RELS = ("<", "=", "<=", ">", ">=")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unknown token {text[bad]!r}", bad)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self, offset=0):
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value:
            raise ParseError(f"expected {value!r}, got {val or 'end of input'!r}", pos)

    def at(self, value):
        return self.peek()[1] == value and self.peek()[0] == "op"

    def formula(self):
        left = self.imp()
        while self.at("<->"):
            self.take()
            left = Iff(left, self.imp())
        return left

    def imp(self):
        left = self.or_()
        while self.at("->"):
            self.take()
            left = Implies(left, self.or_())
        return left

    def or_(self):
        left = self.and_()
        while self.at("|"):
            self.take()
            left = Or(left, self.and_())
        return left

    def and_(self):
        left = self.not_()
        while self.at("&"):
            self.take()
            left = And(left, self.not_())
        return left

    def not_(self):
        kind, val, pos = self.peek()
        if kind == "op" and val == "!":
            self.take()
            return Not(self.not_())
        if kind == "quant":
            self.take()
            k2, name, p2 = self.take()
            if k2 != "ident" or name in _KEYWORDS:
                raise ParseError("expected variable after quantifier", p2)
            self.expect(".")
            body = self.not_()
            return Exists(name, body) if val == "E" else Forall(name, body)
        if kind == "op" and val == "(":
            self.take()
            inner = self.formula()
            self.expect(")")
            return inner
        return self.atom()

    def number(self, text, pos):
        try:
            return Fraction(text)
        except ZeroDivisionError:
            raise ParseError("zero denominator", pos) from None

    def term(self):
        kind, val, pos = self.take()
        if kind == "op" and val == "-":
            k2, v2, p2 = self.take()
            if k2 != "num":
                raise ParseError("expected number after '-'", p2)
            return Const(-self.number(v2, p2))
        if kind == "num":
            return Const(self.number(val, pos))
        if kind == "ident":
            if val in _KEYWORDS:
                raise ParseError(f"keyword {val!r} used as a term", pos)
            return Var(val)
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos)

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "ident" and val in _KEYWORDS:
            self.take()
            return TRUE if val == "true" else FALSE
        lhs = self.term()
        parts = []
        while self.peek()[0] == "op" and self.peek()[1] in _RELS:
            rel = self.take()[1]
            rhs = self.term()
            parts.append(_relation(lhs, rel, rhs))
            lhs = rhs
        if not parts:
            k, v, p = self.peek()
            raise ParseError(f"expected relation, got {v or 'end of input'!r}", p)
        return conj(*parts)


def _relation(lhs, rel, rhs) -> Formula:
    if rel == "<":
        return Atomic(lhs, "<", rhs)
    if rel == "=":
        return Atomic(lhs, "=", rhs)
    if rel == ">":
        return Atomic(rhs, "<", lhs)
    if rel == "<=":
        return Or(Atomic(lhs, "<", rhs), Atomic(lhs, "=", rhs))
    return Or(Atomic(rhs, "<", lhs), Atomic(lhs, "=", rhs))


_IDENT = re.compile(r"[a-z][a-z0-9_]*")


def parse_formula(text: str, variable_order: Sequence[str] | None = None) -> Formula:
    """Parse ``text`` into a syntax tree with bound variables renamed apart.

    With ``variable_order`` every free variable must be listed there; the
    list may contain extra (unconstrained) variables.
    """
    if variable_order is not None:
        check_variable_order(variable_order)
    p = _Parser(text)
    f = p.formula()
    kind, val, pos = p.peek()
    if kind != "eof":
        raise ParseError(f"unexpected {val!r}", pos)
    if variable_order is not None:
        missing = [v for v in free_variables(f) if v not in variable_order]
        if missing:
            raise ParseError(f"free variable(s) {', '.join(missing)} not in variable order")
    return rename_apart(f, reserved=variable_order or ())


def check_variable_order(names: Sequence[str]) -> None:
    if len(set(names)) != len(names):
        raise ParseError("duplicate variable name in variable order")
    for v in names:
        if not _IDENT.fullmatch(v) or v in _KEYWORDS:
            raise ParseError(f"invalid variable name {v!r}")


def format_formula(f: Formula) -> str:
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Atomic):
        return f"{f.lhs} {f.rel} {f.rhs}"
    if isinstance(f, Not):
        return "!" + _wrap(f.arg)
    if isinstance(f, (Exists, Forall)):
        q = "E" if isinstance(f, Exists) else "A"
        return f"{q} {f.var}. {_wrap(f.body)}"
    return f"({format_formula(f.left)} {_BINARY[type(f)]} {format_formula(f.right)})"


def _wrap(f):
    s = format_formula(f)
    if isinstance(f, (Top, Bottom, Not)) or s.startswith("("):
        return s
    return f"({s})"


# ---------------------------------------------------------------------------
# evaluation

def _value(t: Term, env: Mapping[str, Fraction]) -> Fraction:
    if isinstance(t, Const):
        return t.value
    try:
        return env[t.name]
    except KeyError:
        raise KeyError(f"no value assigned to variable {t.name!r}") from None


def witness_candidates(values: Iterable[Fraction]) -> list[Fraction]:
    """Points, gap midpoints and one point beyond each end of ``values``.

    Every definable subset of Q with these parameters is a union of points and
    intervals with endpoints among ``values``, so these candidates decide
    any existential over them.
    """
    vs = sorted(set(values))
    if not vs:
        return [Fraction(0)]
    out = [vs[0] - 1]
    for lo, hi in zip(vs, vs[1:]):
        out.append(lo)
        out.append((lo + hi) / 2)
    out.append(vs[-1])
    out.append(vs[-1] + 1)
    return out


def eval_formula(f: Formula, point: Mapping[str, Fraction]) -> bool:
    """Truth value of ``f`` at ``point`` over (Q, <)."""
    missing = [v for v in free_variables(f) if v not in point]
    if missing:
        raise KeyError(f"no value assigned to variable(s) {', '.join(missing)}")
    consts = parameters(f)
    env = {k: Fraction(v) for k, v in point.items()}
    return _eval(f, env, consts)


def _eval(f, env, consts) -> bool:
    if isinstance(f, Atomic):
        a = _value(f.lhs, env)
        b = _value(f.rhs, env)
        return a < b if f.rel == "<" else a == b
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Not):
        return not _eval(f.arg, env, consts)
    if isinstance(f, And):
        return _eval(f.left, env, consts) and _eval(f.right, env, consts)
    if isinstance(f, Or):
        return _eval(f.left, env, consts) or _eval(f.right, env, consts)
    if isinstance(f, Implies):
        return (not _eval(f.left, env, consts)) or _eval(f.right, env, consts)
    if isinstance(f, Iff):
        return _eval(f.left, env, consts) == _eval(f.right, env, consts)
    cands = witness_candidates(itertools.chain(consts, env.values()))
    want = isinstance(f, Exists)
    saved = env.get(f.var)
    try:
        for c in cands:
            env[f.var] = c
            if _eval(f.body, env, consts) == want:
                return want
        return not want
    finally:
        if saved is None:
            env.pop(f.var, None)
        else:
            env[f.var] = saved


# ---------------------------------------------------------------------------
# positive DNF

def _term_key(t: Term):
    if isinstance(t, Const):
        return (0, t.value, "")
    return (1, Fraction(0), t.name)


@dataclass(frozen=True)
class Constraint:
    """A positive atomic constraint ``lhs rel rhs``; ``=`` is stored with
    its terms in canonical order."""

    lhs: Term
    rel: str
    rhs: Term

    @staticmethod
    def make(lhs: Term, rel: str, rhs: Term) -> "Constraint":
        if rel == "=" and _term_key(rhs) < _term_key(lhs):
            lhs, rhs = rhs, lhs
        return Constraint(lhs, rel, rhs)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        return (_term_key(self.lhs), self.rel, _term_key(self.rhs))

    def holds(self, env) -> bool:
        a = _value(self.lhs, env)
        b = _value(self.rhs, env)
        return a < b if self.rel == "<" else a == b

    def __str__(self):
        return f"{self.lhs} {self.rel} {self.rhs}"


Clause = frozenset  # frozenset[Constraint]


def clause_satisfiable(clause: Iterable[Constraint]) -> bool:
    """Decide satisfiability of a conjunction of < and = over (Q, <).

    Equalities are merged with union-find; the clause is satisfiable iff no
    class holds two distinct constants and the strict-order graph (including
    the order among constants) is acyclic. Density supplies the witnesses.
    """
    clause = list(clause)
    parent: dict = {}

    def find(t):
        parent.setdefault(t, t)
        while parent[t] != t:
            parent[t] = parent[parent[t]]
            t = parent[t]
        return t

    terms = set()
    for c in clause:
        terms.add(c.lhs)
        terms.add(c.rhs)
    for t in terms:
        find(t)
    for c in clause:
        if c.rel == "=":
            parent[find(c.lhs)] = find(c.rhs)
    const_of: dict = {}
    for t in terms:
        if isinstance(t, Const):
            r = find(t)
            if r in const_of and const_of[r] != t.value:
                return False
            const_of[r] = t.value
    edges: dict = {}
    for c in clause:
        if c.rel == "<":
            a, b = find(c.lhs), find(c.rhs)
            if a == b:
                return False
            edges.setdefault(a, set()).add(b)
    ranked = sorted(const_of.items(), key=lambda kv: kv[1])
    for (r1, _), (r2, _) in zip(ranked, ranked[1:]):
        edges.setdefault(r1, set()).add(r2)
    # cycle detection
    state: dict = {}
    for start in list(edges):
        if state.get(start):
            continue
        stack = [(start, iter(edges.get(start, ())))]
        state[start] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[node] = 2
                stack.pop()
                continue
            s = state.get(nxt)
            if s == 1:
                return False
            if s is None:
                state[nxt] = 1
                stack.append((nxt, iter(edges.get(nxt, ()))))
    return True


def simplify_clause(clause: Iterable[Constraint]) -> Clause | None:
    """Drop trivially true constraints; ``None`` if the clause is unsatisfiable."""
    out = set()
    for c in clause:
        if isinstance(c.lhs, Const) and isinstance(c.rhs, Const):
            if not c.holds({}):
                return None
            continue
        if c.lhs == c.rhs:
            if c.rel == "<":
                return None
            continue
        out.add(c)
    out = frozenset(out)
    if not clause_satisfiable(out):
        return None
    return out


def normalize_clauses(clauses: Iterable[Iterable[Constraint]]) -> frozenset[Clause]:
    """Simplify every clause, drop unsatisfiable ones and subsumed ones."""
    simple = set()
    for cl in clauses:
        s = simplify_clause(cl)
        if s is not None:
            simple.add(s)
    if frozenset() in simple:
        return frozenset({frozenset()})
    ordered = sorted(simple, key=len)
    kept: list = []
    for cl in ordered:
        if not any(k <= cl for k in kept):
            kept.append(cl)
    return frozenset(kept)


@dataclass(frozen=True)
class PositiveDNF:
    """A disjunction of conjunctions of positive atomic constraints.

    ``variables`` fixes the ambient dimension and coordinate order;
    ``params`` is the set of rationals the set is defined over (it may list
    more values than occur in the clauses).
    """

    clauses: frozenset
    variables: tuple[str, ...]
    params: frozenset

    def __post_init__(self):
        object.__setattr__(self, "clauses", normalize_clauses(self.clauses))
        object.__setattr__(self, "variables", tuple(self.variables))
        occurring = {t.value for cl in self.clauses for c in cl
                     for t in (c.lhs, c.rhs) if isinstance(t, Const)}
        object.__setattr__(self, "params", frozenset(Fraction(p) for p in self.params) | occurring)
        names = {t.name for cl in self.clauses for c in cl
                 for t in (c.lhs, c.rhs) if isinstance(t, Var)}
        extra = names - set(self.variables)
        if extra:
            raise ValueError(f"clause variables {sorted(extra)} not among {self.variables}")

    @property
    def dim(self) -> int:
        return len(self.variables)

    def sorted_clauses(self) -> list[list[Constraint]]:
        return sorted((sorted(cl, key=Constraint.sort_key) for cl in self.clauses),
                      key=lambda cl: [c.sort_key() for c in cl])

    def contains(self, point: Sequence[Fraction]) -> bool:
        env = dict(zip(self.variables, point))
        return any(all(c.holds(env) for c in cl) for cl in self.clauses)

    def evaluate(self, env: Mapping[str, Fraction]) -> bool:
        return any(all(c.holds(env) for c in cl) for cl in self.clauses)

    def to_formula(self) -> Formula:
        return disj(*(conj(*(Atomic(c.lhs, c.rel, c.rhs) for c in cl))
                      for cl in self.sorted_clauses()))

    def __str__(self):
        if not self.clauses:
            return "false"
        parts = []
        for cl in self.sorted_clauses():
            if not cl:
                parts.append("true")
            else:
                parts.append(" & ".join(str(c) for c in cl))
        if len(parts) == 1:
            return parts[0]
        return " | ".join(f"({p})" if " & " in p else p for p in parts)

    def with_variables(self, variables: Sequence[str]) -> "PositiveDNF":
        return PositiveDNF(self.clauses, tuple(variables), self.params)

    def with_params(self, params: Iterable[Fraction]) -> "PositiveDNF":
        return PositiveDNF(self.clauses, self.variables, self.params | frozenset(params))


def dnf_false(variables=(), params=()) -> PositiveDNF:
    return PositiveDNF(frozenset(), tuple(variables), frozenset(params))


def dnf_true(variables=(), params=()) -> PositiveDNF:
    return PositiveDNF(frozenset({frozenset()}), tuple(variables), frozenset(params))


def dnf_and(a: frozenset, b: frozenset) -> frozenset:
    return normalize_clauses(x | y for x in a for y in b)


def dnf_or(a: frozenset, b: frozenset) -> frozenset:
    return normalize_clauses(a | b)


def negate_constraint(c: Constraint) -> list[Clause]:
    if c.rel == "<":
        return [frozenset({Constraint.make(c.rhs, "<", c.lhs)}),
                frozenset({Constraint.make(c.lhs, "=", c.rhs)})]
    return [frozenset({Constraint.make(c.lhs, "<", c.rhs)}),
            frozenset({Constraint.make(c.rhs, "<", c.lhs)})]


def dnf_not(clauses: frozenset) -> frozenset:
    out = frozenset({frozenset()})
    for cl in sorted(clauses, key=len):
        alternatives = set()
        for c in cl:
            alternatives.update(negate_constraint(c))
        out = dnf_and(out, frozenset(alternatives))
        if not out:
            break
    return out


def clauses_of(f: Formula, quantifier_hook=None) -> frozenset:
    """Clause set of a formula; quantifiers are delegated to ``quantifier_hook``."""
    if isinstance(f, Atomic):
        return normalize_clauses([[Constraint.make(f.lhs, f.rel, f.rhs)]])
    if isinstance(f, Top):
        return frozenset({frozenset()})
    if isinstance(f, Bottom):
        return frozenset()
    if isinstance(f, Not):
        return dnf_not(clauses_of(f.arg, quantifier_hook))
    if isinstance(f, And):
        return dnf_and(clauses_of(f.left, quantifier_hook), clauses_of(f.right, quantifier_hook))
    if isinstance(f, Or):
        return dnf_or(clauses_of(f.left, quantifier_hook), clauses_of(f.right, quantifier_hook))
    if isinstance(f, Implies):
        return dnf_or(dnf_not(clauses_of(f.left, quantifier_hook)),
                      clauses_of(f.right, quantifier_hook))
    if isinstance(f, Iff):
        a = clauses_of(f.left, quantifier_hook)
        b = clauses_of(f.right, quantifier_hook)
        return dnf_or(dnf_and(a, b), dnf_and(dnf_not(a), dnf_not(b)))
    if quantifier_hook is None:
        raise ValueError("formula contains quantifiers; eliminate them first")
    return quantifier_hook(f)


def to_positive_dnf(f: Formula, variables: Sequence[str] | None = None,
                    params: Iterable[Fraction] = ()) -> PositiveDNF:
    """Positive DNF of a quantifier-free formula.

    Negated atoms are rewritten by trichotomy; unsatisfiable and subsumed
    clauses are dropped, so equal sets of clauses give equal objects.
    """
    if variables is None:
        variables = free_variables(f)
    clauses = clauses_of(f)
    return PositiveDNF(clauses, tuple(variables), frozenset(params) | parameters(f))
