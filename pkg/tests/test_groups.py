import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from amalgrank.groups import (
    GroupError, alternating, coefficient, construct_group, cyclic, dihedral, direct_product,
    find_isomorphism, from_table, hom_from_generators, q_star, quotient, quotient_map,
    subgroup_order_spectrum, symmetric,
)

KLEIN = direct_product(cyclic(2), cyclic(2))


def small_groups():
    yield cyclic(1)
    for n in range(2, 17):
        yield cyclic(n)
    for n in range(1, 9):
        yield dihedral(n)
    yield KLEIN
    yield direct_product(cyclic(2), KLEIN)
    yield direct_product(cyclic(3), KLEIN)
    yield direct_product(cyclic(2), cyclic(4))
    yield symmetric(3)
    yield alternating(4)


@pytest.mark.parametrize("g", list(small_groups()), ids=lambda g: g.name)
def test_group_axioms(g):
    t = g.table
    n = g.order
    assert (t[0] == np.arange(n)).all() and (t[:, 0] == np.arange(n)).all()
    idx = np.arange(n)
    left = t[t[:, :, None], idx[None, None, :]]      # (xy)z
    right = t[idx[:, None, None], t[None, :, :]]     # x(yz)
    assert (left == right).all()
    for x in range(n):
        assert g.mul(x, g.inv(x)) == 0 == g.mul(g.inv(x), x)


def test_constructor_orders():
    assert cyclic(2).order == 2
    assert KLEIN.order == 4 and all(KLEIN.element_order(x) <= 2 for x in range(4))
    assert dihedral(5).order == 10
    assert quotient(cyclic(4), {0, 2}).order == 2
    assert construct_group("dihedral", 3).order == 6


def test_dihedral_presentation():
    n = 5
    D = dihedral(n)
    r, s = 1, n
    assert D.element_order(r) == n and D.element_order(s) == 2
    assert D.element_order(D.mul(s, r)) == 2
    # numbering: r^i at i, s r^i at n + i
    for i in range(n):
        assert D.power(r, i) == i
        assert D.mul(s, D.power(r, i)) == n + i


def test_quotient_orders():
    for g in small_groups():
        for x in range(g.order):
            sub = g.closure([x])
            if g.is_normal(sub):
                assert quotient(g, sub).order * len(sub) == g.order


def test_bad_tables_rejected():
    with pytest.raises(GroupError):
        from_table([[0, 1], [1, 1]])
    # a Latin square that is not associative
    bad = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    with pytest.raises(GroupError):
        from_table(bad)


def test_non_normal_quotient_rejected():
    S3 = symmetric(3)
    t = next(x for x in range(6) if S3.element_order(x) == 2)
    with pytest.raises(GroupError):
        quotient_map(S3, S3.closure([t]))


def test_homomorphism_checks():
    Z4, Z2 = cyclic(4), cyclic(2)
    f = hom_from_generators(Z4, Z2, {1: 1})
    assert f.kernel() == {0, 2}
    with pytest.raises(GroupError):
        hom_from_generators(Z2, Z4, {1: 1})


def test_spectrum_examples():
    assert subgroup_order_spectrum(cyclic(2)) == {1, 2}
    assert subgroup_order_spectrum(KLEIN) == {1, 2, 4}
    assert subgroup_order_spectrum(dihedral(3)) == {1, 2, 3, 6}


def test_spectrum_is_lagrange_closed():
    for g in small_groups():
        spec = subgroup_order_spectrum(g)
        assert all(g.order % k == 0 for k in spec)
        assert {1, g.order} <= spec


def test_q_star_examples():
    assert q_star(cyclic(2), cyclic(3)) == 3
    assert q_star(cyclic(2), KLEIN) == 4
    assert q_star(cyclic(2), cyclic(2)) == math.inf


def test_q_star_cross_check_on_pairs():
    # q_star raises if the exhaustive and closed-form values disagree
    groups = [g for g in small_groups() if g.order <= 16]
    for a, b in itertools.combinations_with_replacement(groups, 2):
        q_star(a, b)


def test_coefficient():
    assert coefficient(3) == 6
    assert coefficient(4) == 4
    assert coefficient(math.inf) == 2
    assert coefficient(5) == Fraction(10, 3)
    with pytest.raises(GroupError):
        coefficient(2)


def test_find_isomorphism():
    assert find_isomorphism(quotient(cyclic(6), {0, 2, 4}), cyclic(2)) is not None
    assert find_isomorphism(cyclic(4), KLEIN) is None
