import itertools
import random

import pytest

from amalgrank import amalgam as ag
from amalgrank import automaton as am
from amalgrank.freegroup import reduce_word
from amalgrank.groups import cyclic, direct_product, hom_from_generators, symmetric

from helpers import random_factor_free, random_lifted

KLEIN = direct_product(cyclic(2), cyclic(2))


@pytest.fixture(scope="module")
def z4spec():
    return ag.builtin_amalgam("z4-z2cube")


@pytest.fixture(scope="module")
def z6spec():
    return ag.builtin_amalgam("z6-z3z2z2")


def random_element(spec, rng, length=6):
    x = ag.IDENTITY
    for _ in range(rng.randint(0, length)):
        side = rng.randint(0, 1)
        g = rng.randrange(spec.factors[side].order)
        x = ag.am_multiply(spec, x, ag.factor_element(spec, side, g))
    return x


def test_make_amalgam_examples(z4spec, z6spec):
    assert [q.order for q in z4spec.quotients] == [2, 4]
    assert all(q.element_order(x) <= 2 for q in z4spec.quotients for x in range(q.order))
    assert [q.order for q in z6spec.quotients] == [2, 4]
    assert all(z6spec.quotients[1].element_order(x) <= 2 for x in range(4))


def test_make_amalgam_with_klein_factor():
    T = cyclic(2)
    G1, G2 = cyclic(4), KLEIN
    spec = ag.make_amalgam(G1, G2, T, hom_from_generators(T, G1, {1: 2}),
                           hom_from_generators(T, G2, {1: 2}))
    assert [q.order for q in spec.quotients] == [2, 2]


def test_non_normal_image_rejected():
    S3 = symmetric(3)
    t = next(x for x in range(6) if S3.element_order(x) == 2)
    T = cyclic(2)
    with pytest.raises(ag.AmalgamError):
        ag.make_amalgam(S3, cyclic(4), T, hom_from_generators(T, S3, {1: t}),
                        hom_from_generators(T, cyclic(4), {1: 2}))


def test_non_injective_embedding_rejected():
    T = cyclic(2)
    with pytest.raises(ag.AmalgamError):
        ag.make_amalgam(cyclic(4), cyclic(4), T, hom_from_generators(T, cyclic(4), {1: 0}),
                        hom_from_generators(T, cyclic(4), {1: 2}))


def test_transversal_square(z4spec):
    r1 = ag.factor_element(z4spec, 0, 1)
    sq = ag.am_multiply(z4spec, r1, r1)
    assert sq.syllables == () and z4spec.embeddings[0](sq.tail) == 2


def test_normal_form_laws(z4spec, z6spec):
    rng = random.Random(3)
    for spec in (z4spec, z6spec):
        for _ in range(3000):
            x, y, z = (random_element(spec, rng) for _ in range(3))
            assert ag.am_multiply(spec, ag.am_multiply(spec, x, y), z) == \
                ag.am_multiply(spec, x, ag.am_multiply(spec, y, z))
            assert ag.am_multiply(spec, x, ag.am_invert(spec, x)) == ag.IDENTITY
            assert ag.am_multiply(spec, ag.IDENTITY, x) == x
            fp = spec.ambient_quotient
            assert ag.project(spec, ag.am_multiply(spec, x, y)) == \
                fp.mul(ag.project(spec, x), ag.project(spec, y))


def test_project_and_section(z4spec):
    fp = z4spec.ambient_quotient
    assert ag.project(z4spec, ag.IDENTITY) == ()
    assert ag.project(z4spec, ag.t_element(1)) == ()
    rng = random.Random(5)
    for _ in range(1000):
        raw = [(rng.randint(0, 1), rng.randint(0, 3)) for _ in range(rng.randint(0, 8))]
        w = fp.normalize([(a, x % fp.factors[a].order) for a, x in raw])
        assert ag.project(z4spec, ag.lift_word(z4spec, w)) == w
    assert ag.lift_word(z4spec, ()) == ag.IDENTITY


def test_lifted_subgroup_validation(z4spec):
    fp = z4spec.ambient_quotient
    A = am.subgroup(fp, [fp.parse("ab"), fp.parse("cabc")])
    L = ag.make_lifted_subgroup(z4spec, A)
    assert L.twists == (0, 0)
    with pytest.raises(ag.AmalgamError):
        ag.make_lifted_subgroup(z4spec, A, twists={5: 1})
    with pytest.raises(ag.AmalgamError):
        ag.make_lifted_subgroup(z4spec, A, twists={0: 7})
    bad = am.fold(fp, [fp.parse("ab"), fp.parse("cabc"), fp.parse("b")])
    with pytest.raises(am.NotFactorFree):
        ag.make_lifted_subgroup(z4spec, bad)
    with pytest.raises(ag.AmalgamError):
        ag.make_lifted_subgroup(z4spec, A, basis=[fp.parse("ab"), fp.parse("abab")])


def test_lift_element_projects(z4spec):
    rng = random.Random(11)
    for _ in range(20):
        L = random_lifted(z4spec, rng)
        n = len(L.generators)
        if n == 0:
            continue
        for _ in range(10):
            u = reduce_word([(rng.randrange(n), rng.choice((1, -1))) for _ in range(rng.randint(0, 6))])
            x = ag.lift_element(z4spec, L, u)
            assert ag.project(z4spec, x) == am.expand(z4spec.ambient_quotient, L.generators, u)
            assert ag.lift_member(z4spec, L, ag.project(z4spec, x)) == x


def test_explicit_basis_twists(z4spec):
    fp = z4spec.ambient_quotient
    words = [fp.parse("ab"), fp.parse("cabc")]
    A = am.subgroup(fp, words)
    L = ag.make_lifted_subgroup(z4spec, A, twists={1: 1}, basis=words)
    # the lift of the second listed word carries the twist
    x = ag.lift_member(z4spec, L, words[1])
    assert x == ag.am_multiply(z4spec, ag.lift_word(z4spec, words[1]), ag.t_element(1))
    assert ag.lift_member(z4spec, L, words[0]) == ag.lift_word(z4spec, words[0])


def tau_by_enumeration(spec, L1, L2, length):
    res = ag.tau_closure(spec, L1, L2)
    m = len(res.basis)
    letters = [(k, s) for k in range(m) for s in (1, -1)]
    seen = {0}
    fp = spec.ambient_quotient
    for k in range(1, length + 1):
        for u in itertools.product(letters, repeat=k):
            u = reduce_word(u)
            seen.add(ag.tau(spec, L1, L2, am.expand(fp, res.basis.generators, u)))
    return seen, res


def test_identical_lifts_have_trivial_tau(z4spec):
    rng = random.Random(1)
    A = random_factor_free(z4spec.ambient_quotient, rng)
    L = ag.make_lifted_subgroup(z4spec, A)
    res = ag.tau_closure(z4spec, L, L)
    assert res.image == {0}
    data = ag.intersection_rank_amalgam(z4spec, L, L)
    assert data["reduced_rank"] == am.reduced_rank(A)


def test_tau_closure_against_enumeration(z4spec, z6spec):
    rng = random.Random(21)
    for spec in (z4spec, z6spec):
        for _ in range(8):
            L1, L2 = random_lifted(spec, rng), random_lifted(spec, rng)
            seen, res = tau_by_enumeration(spec, L1, L2, 3)
            assert seen <= res.image
            assert 0 in res.image and len(res.image) <= spec.T.order
            if len(res.basis) <= 4:
                assert seen == res.image


def test_crossed_homomorphism_law(z6spec):
    rng = random.Random(8)
    fp = z6spec.ambient_quotient
    for _ in range(10):
        L1, L2 = random_lifted(z6spec, rng), random_lifted(z6spec, rng)
        res = ag.tau_closure(z6spec, L1, L2)
        gens = res.basis.generators
        if not gens:
            continue
        for _ in range(5):
            u, v = (am.expand(fp, gens, reduce_word(
                [(rng.randrange(len(gens)), rng.choice((1, -1))) for _ in range(rng.randint(0, 4))]))
                for _ in range(2))
            tu, tv = ag.tau(z6spec, L1, L2, u), ag.tau(z6spec, L1, L2, v)
            x2 = ag.lift_member(z6spec, L2, v)
            moved = ag.am_multiply(z6spec, ag.am_invert(z6spec, x2), ag.t_element(tu), x2)
            assert ag.tau(z6spec, L1, L2, fp.mul(u, v)) == z6spec.T.mul(moved.tail, tv)


def test_degenerate_amalgam_matches_free_product():
    T = cyclic(1)
    G1, G2 = cyclic(2), cyclic(3)
    spec = ag.make_amalgam(G1, G2, T, hom_from_generators(T, G1, {}), hom_from_generators(T, G2, {}))
    rng = random.Random(4)
    for _ in range(10):
        A1 = random_factor_free(spec.ambient_quotient, rng)
        A2 = random_factor_free(spec.ambient_quotient, rng)
        L1, L2 = ag.make_lifted_subgroup(spec, A1), ag.make_lifted_subgroup(spec, A2)
        r = ag.verify_theorem2(spec, L1, L2)
        q = am.check_eq2_bound(A1, A2)
        assert r["lhs"] == q["rbar_intersection"]
        assert r["rhs"] == q["bound"] and r["equality"] == q["equality"]
