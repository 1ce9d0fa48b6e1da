"""Quantifier elimination for dense linear orders without endpoints."""

from __future__ import annotations

from typing import Iterable, Sequence
from fractions import Fraction

from .formula import (
    Constraint,
    Exists,
    Formula,
    PositiveDNF,
    Var,
    clauses_of,
    dnf_not,
    free_variables,
    normalize_clauses,
    parameters,
)


def _subst(c: Constraint, name: str, term) -> Constraint:
    lhs = term if c.lhs == Var(name) else c.lhs
    rhs = term if c.rhs == Var(name) else c.rhs
    return Constraint.make(lhs, c.rel, rhs)


def eliminate_exists_clause(clause: Iterable[Constraint], v: str) -> frozenset:
    """Clause set equivalent to ``E v. /\\ clause``.

    An equation ``v = t`` is used for substitution first. Otherwise every lower
    bound is paired with every upper bound; a missing side imposes nothing
    since the order has no endpoints.
    """
    var = Var(v)
    clause = list(clause)
    for c in clause:
        if c.rel == "=" and (c.lhs == var) != (c.rhs == var):
            t = c.rhs if c.lhs == var else c.lhs
            return normalize_clauses([[_subst(d, v, t) for d in clause]])
    rest, lower, upper = [], [], []
    for c in clause:
        if c.lhs == var and c.rhs == var:
            if c.rel == "<":
                return frozenset()
            continue
        if c.rhs == var:
            lower.append(c.lhs)
        elif c.lhs == var:
            upper.append(c.rhs)
        else:
            rest.append(c)
    rest.extend(Constraint.make(lo, "<", hi) for lo in lower for hi in upper)
    return normalize_clauses([rest])


def _eliminate(f: Formula) -> frozenset:
    if isinstance(f, Exists):
        body = clauses_of(f.body, _eliminate)
        out = set()
        for cl in body:
            out.update(eliminate_exists_clause(cl, f.var))
        return normalize_clauses(out)
    # forall v. phi  ==  not exists v. not phi
    body = dnf_not(clauses_of(f.body, _eliminate))
    out = set()
    for cl in body:
        out.update(eliminate_exists_clause(cl, f.var))
    return dnf_not(normalize_clauses(out))


def eliminate_quantifiers(f: Formula, variables: Sequence[str] | None = None,
                          params: Iterable[Fraction] = ()) -> PositiveDNF:
    """Quantifier-free positive DNF equivalent to ``f`` over (Q, <).

    Quantifiers are removed innermost first.
    """
    if variables is None:
        variables = free_variables(f)
    clauses = clauses_of(f, _eliminate)
    return PositiveDNF(clauses, tuple(variables), frozenset(params) | parameters(f))
