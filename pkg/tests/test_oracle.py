from fractions import Fraction

from dlok0.atoms import chain_atom
from dlok0.oracle import (
    atom_product_split,
    delannoy,
    order_type_count,
    random_definable_set,
    weak_order_count,
)

F = Fraction


def test_weak_orders():
    assert [weak_order_count(n) for n in range(6)] == [1, 1, 3, 13, 75, 541]


def test_delannoy():
    assert delannoy(2, 3) == 25
    assert [delannoy(n, n) for n in range(5)] == [1, 3, 13, 63, 321]


def test_order_type_count():
    assert order_type_count(1, (F(0),)) == 3
    assert order_type_count(2, (F(1), F(0))) == 31
    assert order_type_count(2, ()) == 3


def test_interleaving_total():
    c = atom_product_split(chain_atom((F(0),), (2,)), chain_atom((F(0),), (3,)))
    assert sum(c.coeffs.values()) == 25


def test_random_set_is_reproducible():
    a = random_definable_set(7, 2, (F(0),), 0.4)
    b = random_definable_set(7, 2, (F(0),), 0.4)
    assert a.clauses == b.clauses
