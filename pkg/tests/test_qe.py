import random
from fractions import Fraction

import pytest

from dlok0.formula import Const, Constraint, Var, eval_formula, parse_formula
from dlok0.oracle import random_formula, random_point
from dlok0.qe import eliminate_exists_clause, eliminate_quantifiers

F = Fraction


@pytest.mark.parametrize("text, expected", [
    ("E y. (x < y & y < 1)", "x < 1"),
    ("E y. (y > x)", "true"),
    ("A y. (y < x | x < y | x = y)", "true"),
    ("E y. (y < x & x < y)", "false"),
    ("E y. (y = x & y < 1)", "x < 1"),
    ("A y. (y < x)", "false"),
])
def test_examples(text, expected):
    f = parse_formula(text)
    assert str(eliminate_quantifiers(f, ["x"])) == expected


def test_bound_pairing():
    x, y, v = Var("x"), Var("y"), Var("v")
    clause = {Constraint.make(x, "<", v), Constraint.make(v, "<", y), Constraint.make(v, "<", Const(F(1)))}
    out = eliminate_exists_clause(clause, "v")
    assert out == {frozenset({Constraint.make(x, "<", y), Constraint.make(x, "<", Const(F(1)))})}


def test_equality_substitution():
    x, v = Var("x"), Var("v")
    clause = {Constraint.make(v, "=", x), Constraint.make(v, "<", Const(F(2)))}
    out = eliminate_exists_clause(clause, "v")
    assert out == {frozenset({Constraint.make(x, "<", Const(F(2)))})}


def test_output_is_quantifier_free_in_requested_variables():
    d = eliminate_quantifiers(parse_formula("E z. (x < z & z < y)"), ["x", "y"])
    assert d.variables == ("x", "y")
    assert str(d) == "x < y"


@pytest.mark.parametrize("seed", range(15))
def test_soundness_against_witness_evaluation(seed):
    rng = random.Random(seed)
    params = (F(1), F(-1, 2))[: rng.randint(0, 2)]
    f = random_formula(rng, ["x", "y"], params)
    d = eliminate_quantifiers(f, ["x", "y"])
    for _ in range(80):
        pt = random_point(rng, ["x", "y"], params)
        assert d.evaluate(pt) == eval_formula(f, pt)
