"""Subgroup pairs that attain the intersection bound, and the tools to build them.

Cases 3 and 4 are explicit: a dihedral-type quotient gives the normal
subgroup H1 and a listed free basis gives H2.  Cases 1 and 2 take H1 from a
finite quotient of a triangle group and complete a finite-rank subgroup K to
finite index by attaching words at its open boundary slots.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import automaton as am
from .freegroup import NotABasis, inverse_basis_change
from .groups import coefficient, cyclic, dihedral, direct_product, q_star
from .words import FreeProduct, Word, free_product


class ConstructionError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class CaseInstance:
    case: int
    params: dict
    ambient: FreeProduct
    H1: am.Automaton
    H2: am.Automaton
    designated: tuple           # the words w_1', ..., w_n'
    H2_generators: tuple
    notes: dict = field(default_factory=dict)


# --- boundary slots and completion ------------------------------------------------

@dataclass(frozen=True)
class Slot:
    factor: int
    anchor: int        # tree-first state of the secondary vertex
    element: int       # missing position relative to the anchor
    access: Word       # tree word to the anchor followed by the missing element


def frontier_slots(A: am.Automaton) -> list:
    """Missing positions of every incomplete secondary vertex, in canonical order."""
    B = am.free_basis(A)
    fp = A.ambient
    slots = []
    for p in A.states:
        for a in range(fp.rank):
            row = A.out[p][a]
            if not row or min(p, *row.values()) != p:
                continue
            for y in fp.nontrivial(a):
                if y not in row:
                    slots.append(Slot(a, p, y, fp.mul(B.tree_word[p], ((a, y),))))
    return slots


@dataclass(frozen=True)
class ConjugatedFillers:
    """Attach every word s as a loop at every slot: z s z^-1."""
    words: tuple


@dataclass(frozen=True)
class PairBoundary:
    """Join consecutive slots through the word b: z_(2j-1) b z_(2j)^-1."""
    word: Word


def completion_words(A: am.Automaton, rule) -> list:
    fp = A.ambient
    slots = frontier_slots(A)
    extra = []
    if isinstance(rule, ConjugatedFillers):
        for z in slots:
            for s in rule.words:
                extra.append(fp.mul(z.access, s, fp.inv(z.access)))
    elif isinstance(rule, PairBoundary):
        if len(slots) % 2:
            raise ConstructionError(f"{len(slots)} boundary slots cannot be paired")
        for z1, z2 in zip(slots[::2], slots[1::2]):
            extra.append(fp.mul(z1.access, rule.word, fp.inv(z2.access)))
    else:
        raise TypeError(f"unknown completion rule {rule!r}")
    return extra


def complete_to_finite_index(A: am.Automaton, rule, generators=None):
    """Fold the old generators with the completion words; returns (automaton, generators)."""
    fp = A.ambient
    old = list(am.free_basis(A).generators if generators is None else generators)
    gens = old + completion_words(A, rule)
    C = am.subgroup(fp, gens)
    if not C.factor_free:
        raise ConstructionError("completion is not factor-free")
    if not C.complete:
        p = next(p for p in C.states
                 if any(len(C.out[p][a]) < fp.factors[a].order - 1 for a in range(fp.rank)))
        raise ConstructionError(f"completion leaves state {p} with missing transitions")
    return C, tuple(gens)


# --- Cases 3 and 4: dihedral quotients ------------------------------------------------

def _dihedral_images(fp: FreeProduct, n: int):
    """The map a -> (s,0), b -> (sr,0), c -> (1,1) into D_(n+1) x Z2."""
    D = direct_product(dihedral(n + 1), cyclic(2))
    a_img, b_img, c_img = (n + 1) * 2, (n + 2) * 2, 1
    if fp.rank == 2:
        # second factor is Z2 x Z2 with b = (1,0) at index 2 and c = (0,1) at index 1
        images = [lambda x: a_img, lambda x: {2: b_img, 1: c_img, 3: D.mul(b_img, c_img)}[x]]
    else:
        images = [lambda x: a_img, lambda x: b_img, lambda x: c_img]
    return D, images


def left_conj(fp: FreeProduct, x: str, by: str) -> Word:
    """by x by^-1.  The constructions below conjugate on the left: a loop x at
    the end of the path ``by`` contributes exactly this element."""
    y = fp.parse(by)
    return fp.mul(y, fp.parse(x), fp.inv(y))


def _designated_words(fp: FreeProduct, n: int) -> list:
    return [left_conj(fp, "acac", f"(ba)^{i - 1}b") for i in range(1, n + 1)]


def _eq21_words(fp: FreeProduct, n: int) -> list:
    return _designated_words(fp, n) + [
        left_conj(fp, "ab", "acac"),
        fp.parse("acababa"),
        fp.parse("abcac"),
        left_conj(fp, "ac", f"(ba)^{n}b"),
    ]


def _check_free_basis(A: am.Automaton, words) -> None:
    B = am.free_basis(A)
    over = []
    for w in words:
        u = am.express_in_basis(A, B, w)
        if u is None:
            raise ConstructionError(f"{A.ambient.format(w)} is not in the subgroup")
        over.append(u)
    try:
        inverse_basis_change(over, len(B))
    except NotABasis as exc:
        raise ConstructionError(f"listed words are not a free basis: {exc}") from None


def _dihedral_case(case: int, n: int, fp: FreeProduct, relators, gens2, max_states: int):
    if n < 1:
        raise ConstructionError("n must be at least 1")
    D, images = _dihedral_images(fp, n)
    H1 = am.cayley_automaton(fp, D, images)
    closure = am.normal_closure_automaton(fp, [fp.parse(r) for r in relators], max_states)
    if closure != H1:
        raise ConstructionError("coset enumeration disagrees with the dihedral quotient")
    H2 = am.subgroup(fp, gens2)
    designated = tuple(_designated_words(fp, n))
    for name, A in (("H1", H1), ("H2", H2)):
        if not A.factor_free:
            raise ConstructionError(f"{name} is not factor-free")
        if not A.complete:
            raise ConstructionError(f"{name} does not have finite index")
        for w in designated:
            if not am.membership(A, w):
                raise ConstructionError(f"{fp.format(w)} is not in {name}")
    _check_free_basis(H2, gens2)
    if not am.is_normal(H1):
        raise ConstructionError("H1 is not normal")
    orbit = am.coset_orbit(H1, gens2)
    chain = {t: H1.trace(fp.parse(t)) in orbit for t in ("ab", "cac", "a", "b", "c")}
    if not all(chain.values()) or len(orbit) != H1.size:
        raise ConstructionError("H1 H2 is not the whole group")
    notes = {"quotient": D.name, "quotient_order": D.order, "product_chain": chain}
    return CaseInstance(case, {"n": n}, fp, H1, H2, designated, tuple(gens2), notes)


def build_case3(n: int, max_states: int = 100000) -> CaseInstance:
    fp = free_product(cyclic(2), direct_product(cyclic(2), cyclic(2)))
    gens2 = _eq21_words(fp, n)
    return _dihedral_case(3, n, fp, ["acac", f"(ab)^{n + 1}"], gens2, max_states)


def build_case4(n: int, max_states: int = 100000) -> CaseInstance:
    fp = free_product(cyclic(2), cyclic(2), cyclic(2))
    conjugators = [f"(ba)^{j}" for j in range(n + 1)] + ["a", "aca"]
    gens2 = _eq21_words(fp, n) + [left_conj(fp, "bcbc", r) for r in conjugators]
    return _dihedral_case(4, n, fp, ["bcbc", "acac", f"(ab)^{n + 1}"], gens2, max_states)


# --- lifting to an amalgam and the sharpness report --------------------------------

def _factor_match(instance: CaseInstance, spec):
    """Factor permutation and isomorphisms from the instance ambient onto the quotient."""
    from .groups import find_isomorphism

    src = instance.ambient.factors
    dst = spec.ambient_quotient.factors
    if len(src) != len(dst):
        raise ConstructionError("the instance ambient has a different number of factors")
    for perm in ((0, 1), (1, 0)):
        isos = [find_isomorphism(src[a], dst[perm[a]]) for a in range(2)]
        if all(isos):
            return perm, isos
    raise ConstructionError("the amalgam quotient is not isomorphic to the instance ambient")


def transport(instance: CaseInstance, spec):
    """Functions carrying words and automata of the instance onto spec.ambient_quotient."""
    perm, isos = _factor_match(instance, spec)
    target = spec.ambient_quotient

    def word(w: Word) -> Word:
        return target.normalize((perm[a], isos[a](x)) for a, x in w)

    def automaton(A: am.Automaton) -> am.Automaton:
        out = {}
        for p in A.states:
            row = [None, None]
            for a in range(2):
                row[perm[a]] = {isos[a](x): q for x, q in A.out[p][a].items()}
            out[p] = tuple(row)
        return am.Automaton.canonical(target, out, A.base)

    return word, automaton


def lift_case(instance: CaseInstance, spec, elements=None):
    """Lift H1' canonically and H2' with the twists that make every t in T a value of tau.

    The designated word w_i gets the lift psi1(w_i) t_i in H2, where psi1 is the
    lift of H1 and t_i runs through ``elements`` (by default all of T).
    """
    from . import amalgam as ag

    n = instance.params["n"]
    if spec.T.order != n:
        raise ConstructionError(f"|T| = {spec.T.order} but the instance has n = {n}")
    word, automaton = transport(instance, spec)
    L1 = ag.make_lifted_subgroup(spec, automaton(instance.H1))
    basis2 = [word(w) for w in instance.H2_generators]
    twists = {}
    elements = list(range(n)) if elements is None else list(elements)
    for t, w in zip(elements, instance.designated):
        w = word(w)
        i = basis2.index(w)
        x = ag.am_multiply(spec, ag.am_invert(spec, ag.lift_word(spec, w)),
                           ag.lift_member(spec, L1, w), ag.t_element(t))
        if x.syllables:
            raise ConstructionError("lift of a designated word leaves its coset of T")
        twists[i] = x.tail
    L2 = ag.make_lifted_subgroup(spec, automaton(instance.H2), twists=twists, basis=basis2)
    return L1, L2


@dataclass
class SharpnessReport:
    case: int
    params: dict
    quotient: dict
    amalgam: dict | None = None
    timings: dict = field(default_factory=dict)

    @property
    def equality(self) -> bool:
        ok = bool(self.quotient["equality"])
        if self.amalgam is not None:
            ok = ok and bool(self.amalgam["equality"])
        return ok


def verify_sharpness(instance: CaseInstance, spec=None) -> SharpnessReport:
    from . import amalgam as ag

    t0 = time.perf_counter()
    q = am.check_eq2_bound(instance.H1, instance.H2)
    covers = am.is_normal(instance.H1) and am.product_covers_group(instance.H1, instance.H2_generators)
    q["cond13"] = covers
    q["index_product"] = (not covers) or bool(q["index_multiplicative"])
    report = SharpnessReport(instance.case, dict(instance.params), q)
    report.timings["quotient"] = time.perf_counter() - t0
    if spec is not None:
        t1 = time.perf_counter()
        L1, L2 = lift_case(instance, spec)
        report.amalgam = ag.verify_theorem2(spec, L1, L2)
        report.timings["amalgam"] = time.perf_counter() - t1
    return report


# --- Cases 1 and 2: triangle-group quotients and boundary completion ---------------

def _triangle_designated(fp: FreeProduct, n: int) -> list:
    return [left_conj(fp, "(ab)^6", f"(ba^-1ba^-2)^{k}") for k in range(n)]


def separated_words(fp: FreeProduct, words) -> list:
    """Cosets met by the secondary vertices along the paths of ``words``."""
    M = set()
    for w in words:
        for i, (a, _) in enumerate(w):
            for y in range(fp.factors[a].order):
                M.add(fp.mul(w[:i], ((a, y),)))
    return sorted(M)


def _kernel_of_triangle_quotient(fp: FreeProduct, p: int, designated, degree_bound: int):
    from .triangle import triangle_quotient_search

    M = separated_words(fp, designated)
    S, xi, yi, degree = triangle_quotient_search(p, 2, 6, M, degree_bound)
    images = [lambda k: S.power(xi, k), lambda k: S.power(yi, k)]
    H1 = am.cayley_automaton(fp, S, images)
    notes = {"quotient": S.name, "quotient_order": S.order, "degree": degree,
             "separated_cosets": len(M)}
    return H1, notes


def _triangle_case(case: int, p: int, n: int, K_words, rule, chain, degree_bound: int):
    fp = free_product(cyclic(p), cyclic(2))
    designated = _triangle_designated(fp, n)
    H1, notes = _kernel_of_triangle_quotient(fp, p, designated, degree_bound)
    K_gens = designated + [fp.parse(t) for t in K_words]
    K = am.subgroup(fp, K_gens)
    if not K.factor_free:
        raise ConstructionError("K is not factor-free")
    _check_free_basis(K, K_gens)
    notes["K_states"] = K.size
    notes["boundary_slots"] = len(frontier_slots(K))
    H2, gens2 = complete_to_finite_index(K, rule, K_gens)
    for name, A in (("H1", H1), ("H2", H2)):
        if not A.factor_free or not A.complete:
            raise ConstructionError(f"{name} is not factor-free of finite index")
        for w in designated:
            if not am.membership(A, w):
                raise ConstructionError(f"{fp.format(w)} is not in {name}")
    if not am.is_normal(H1):
        raise ConstructionError("H1 is not normal")
    orbit = am.coset_orbit(H1, gens2)
    notes["product_chain"] = {t: H1.trace(fp.parse(t)) in orbit for t in chain}
    if len(orbit) != H1.size or not all(notes["product_chain"].values()):
        raise ConstructionError("H1 H2 is not the whole group")
    params = {"p": p, "n": n} if case == 1 else {"n": n}
    return CaseInstance(case, params, fp, H1, H2, tuple(designated), gens2, notes)


def build_case1(p: int, n: int, degree_bound: int = 12) -> CaseInstance:
    from .groups import _is_prime

    if p < 3 or not _is_prime(p):
        raise ConstructionError("p must be an odd prime")
    if n < 1:
        raise ConstructionError("n must be at least 1")
    fp = free_product(cyclic(p), cyclic(2))
    fillers = [fp.parse(f"ba^{2 * i - 1}ba^-{2 * i}b") for i in range(1, (p - 1) // 2 + 1)]
    K_words = ["(ba)^5", "(ba)^2(ba^-1)^5(ba)^2"]
    chain = ("ba", "ba^-1", "a", "b")
    return _triangle_case(1, p, n, K_words, ConjugatedFillers(tuple(fillers)), chain, degree_bound)


def build_case2(n: int, degree_bound: int = 12) -> CaseInstance:
    if n < 1:
        raise ConstructionError("n must be at least 1")
    fp = free_product(cyclic(4), cyclic(2))
    K_words = ["(ba)^5", "(ba)^2(ba^2)^5(ba)^2", "(ba^2)^2"]
    chain = ("ba", "ba^2", "a", "b")
    return _triangle_case(2, 4, n, K_words, PairBoundary(fp.parse("b")), chain, degree_bound)
