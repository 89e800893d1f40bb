"""Amalgamated products G1 *_T G2 with T finite and normal in both factors.

Elements are kept in normal form: alternating transversal representatives
followed by a tail in T.  The projection onto G1/T * G2/T lets subgroup
questions be answered with automata over the quotient free product.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from . import automaton as am
from .freegroup import NotABasis, inverse_basis_change, invert_word, reduce_word, substitute
from .groups import FiniteGroup, GroupError, GroupHom, coefficient, q_star, quotient_map
from .words import FreeProduct, Word, free_product


class AmalgamError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class AmalgamSpec:
    factors: tuple          # (G1, G2)
    T: FiniteGroup
    embeddings: tuple       # (T -> G1, T -> G2)
    projections: tuple      # (G1 -> Q1, G2 -> Q2)
    transversals: tuple     # transversals[s][coset] = least element of the coset
    ambient_quotient: FreeProduct
    _pullback: tuple = field(repr=False)   # element of G_s in T -> T index
    _split: tuple = field(repr=False)      # h -> (rep, T element) with h = rep * t

    @property
    def quotients(self) -> tuple:
        return tuple(p.target for p in self.projections)

    def from_T(self, side: int, g: int) -> int:
        return self._pullback[side][g]


def make_amalgam(G1: FiniteGroup, G2: FiniteGroup, T: FiniteGroup,
                 emb1: GroupHom, emb2: GroupHom, letters=None) -> AmalgamSpec:
    embs = (emb1, emb2)
    factors = (G1, G2)
    pullback, split, projections, transversals = [], [], [], []
    for side, (G, e) in enumerate(zip(factors, embs)):
        if e.source is not T or e.target is not G:
            raise AmalgamError(f"embedding {side + 1} has the wrong source or target")
        if not e.injective:
            raise AmalgamError(f"embedding {side + 1} is not injective")
        image = e.image_set()
        if not G.is_normal(image):
            raise AmalgamError(f"image of T is not normal in factor {side + 1}")
        if len(image) == G.order:
            raise AmalgamError(f"T is all of factor {side + 1}")
        proj = quotient_map(G, image)
        reps = [0] * proj.target.order
        for g in reversed(range(G.order)):
            reps[proj(g)] = g
        back = {e(t): t for t in range(T.order)}
        pullback.append(back)
        split.append(tuple((reps[proj(h)], back[G.mul(G.inv(reps[proj(h)]), h)])
                           for h in range(G.order)))
        projections.append(proj)
        transversals.append(tuple(reps))
    Q1, Q2 = (p.target for p in projections)
    ambient = free_product(Q1, Q2, letters=letters)
    return AmalgamSpec(factors, T, embs, tuple(projections), tuple(transversals),
                       ambient, tuple(pullback), tuple(split))


@dataclass(frozen=True)
class AmalgamElement:
    syllables: tuple = ()   # ((side, representative), ...)
    tail: int = 0


IDENTITY = AmalgamElement()


def _append(spec: AmalgamSpec, syls: list, tail: int, side: int, g: int) -> int:
    """Right-multiply (syls, tail) by g in G_side in place; returns the new tail."""
    G = spec.factors[side]
    e = spec.embeddings[side]
    T = spec.T
    # push the tail past g: tail * g = g * (g^-1 tail g)
    moved = spec.from_T(side, G.conj(e(tail), g))
    if syls and syls[-1][0] == side:
        g = G.mul(syls.pop()[1], g)
    rep, t = spec._split[side][g]
    if rep:
        syls.append((side, rep))
    return T.mul(t, moved)


def factor_element(spec: AmalgamSpec, side: int, g: int) -> AmalgamElement:
    syls: list = []
    tail = _append(spec, syls, 0, side, g)
    return AmalgamElement(tuple(syls), tail)


def t_element(t: int) -> AmalgamElement:
    return AmalgamElement((), int(t))


def am_multiply(spec: AmalgamSpec, *xs: AmalgamElement) -> AmalgamElement:
    syls: list = []
    tail = 0
    for x in xs:
        for side, r in x.syllables:
            tail = _append(spec, syls, tail, side, r)
        tail = spec.T.mul(tail, x.tail)
    return AmalgamElement(tuple(syls), tail)


def am_invert(spec: AmalgamSpec, x: AmalgamElement) -> AmalgamElement:
    syls: list = []
    tail = spec.T.inv(x.tail)
    for side, r in reversed(x.syllables):
        tail = _append(spec, syls, tail, side, spec.factors[side].inv(r))
    return AmalgamElement(tuple(syls), tail)


def project(spec: AmalgamSpec, x: AmalgamElement) -> Word:
    """The factorization map onto G1/T * G2/T."""
    return tuple((side, spec.projections[side](r)) for side, r in x.syllables)


def lift_word(spec: AmalgamSpec, w: Word) -> AmalgamElement:
    """Canonical section: each coset syllable becomes its transversal representative."""
    w = spec.ambient_quotient.normalize(w)
    return AmalgamElement(tuple((a, spec.transversals[a][c]) for a, c in w), 0)


# --- lifted subgroups -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LiftedSubgroup:
    """A factor-free subgroup H' of the quotient with a lift of each free generator.

    ``generators`` is the free basis the twists refer to.  It is either the
    canonical basis read off the automaton or an explicit list; in the second
    case ``to_explicit[i]`` writes canonical generator i over the explicit ones.
    """
    automaton: am.Automaton
    basis: am.FreeBasis
    generators: tuple
    twists: tuple
    lifts: tuple
    to_explicit: tuple | None = None

    def express(self, w: Word):
        """w as a reduced word over ``generators``; None if w is not in H'."""
        u = am.express_in_basis(self.automaton, self.basis, w)
        if u is None or self.to_explicit is None:
            return u
        return substitute(u, self.to_explicit)


def make_lifted_subgroup(spec: AmalgamSpec, A: am.Automaton, twists=None,
                         basis=None) -> LiftedSubgroup:
    if A.ambient is not spec.ambient_quotient:
        raise AmalgamError("automaton is not over the quotient of this amalgam")
    if not A.factor_free:
        raise am.NotFactorFree("lifting needs a factor-free subgroup")
    fp = A.ambient
    canonical = am.free_basis(A)
    to_explicit = None
    if basis is None:
        gens = canonical.generators
    else:
        gens = tuple(fp.normalize(w) for w in basis)
        over_canonical = []
        for w in gens:
            u = am.express_in_basis(A, canonical, w)
            if u is None:
                raise AmalgamError(f"basis word {fp.format(w)} is not in the subgroup")
            over_canonical.append(u)
        try:
            to_explicit = tuple(inverse_basis_change(over_canonical, len(canonical)))
        except NotABasis as exc:
            raise AmalgamError(f"given words are not a free basis: {exc}") from None
    tw = [0] * len(gens)
    for i, t in dict(twists or {}).items():
        if not (isinstance(i, int) and 0 <= i < len(gens)):
            raise AmalgamError(f"twist on unknown basis generator {i!r}")
        if not (0 <= int(t) < spec.T.order):
            raise AmalgamError(f"twist {t!r} is not an element of T")
        tw[i] = int(t)
    lifts = tuple(am_multiply(spec, lift_word(spec, w), t_element(t)) for w, t in zip(gens, tw))
    return LiftedSubgroup(A, canonical, gens, tuple(tw), lifts, to_explicit)


def lift_element(spec: AmalgamSpec, L: LiftedSubgroup, u) -> AmalgamElement:
    """Image of a word over L's basis under the lift H' -> H."""
    parts = [L.lifts[i] if e > 0 else am_invert(spec, L.lifts[i]) for i, e in u]
    return am_multiply(spec, *parts)


def lift_member(spec: AmalgamSpec, L: LiftedSubgroup, w: Word) -> AmalgamElement:
    """The unique element of H projecting to w (w must lie in H')."""
    u = L.express(w)
    if u is None:
        raise AmalgamError("word is not in the quotient subgroup")
    return lift_element(spec, L, u)


def tau(spec: AmalgamSpec, L1: LiftedSubgroup, L2: LiftedSubgroup, w: Word) -> int:
    """lift2(w)^-1 lift1(w), an element of T, for w in H1' and H2'."""
    x = am_multiply(spec, am_invert(spec, lift_member(spec, L2, w)), lift_member(spec, L1, w))
    if x.syllables:
        raise AmalgamError("lifts of one word differ outside T")
    return x.tail


@dataclass(frozen=True)
class TwistClosureResult:
    image: frozenset            # values of tau, i.e. the t with H1 meeting H2 t
    witnesses: dict             # t -> word over the intersection basis realising it
    products: frozenset         # elements of T lying in H1 H2
    intersection: am.Automaton
    basis: am.FreeBasis
    states_explored: int


def _tau_step(spec: AmalgamSpec, L1, L2, w: Word):
    """tau(w) and the permutation t -> lift2(w)^-1 t lift2(w) of T."""
    x2 = lift_member(spec, L2, w)
    x2inv = am_invert(spec, x2)
    t = am_multiply(spec, x2inv, lift_member(spec, L1, w))
    if t.syllables:
        raise AmalgamError("lifts of one word differ outside T")
    perm = []
    for s in range(spec.T.order):
        y = am_multiply(spec, x2inv, t_element(s), x2)
        if y.syllables:
            raise AmalgamError("T is not normal in the amalgam")
        perm.append(y.tail)
    return t.tail, tuple(perm)


def tau_closure(spec: AmalgamSpec, L1: LiftedSubgroup, L2: LiftedSubgroup) -> TwistClosureResult:
    """All values of tau on H1' & H2', by closing over (tau(u), conjugation by lift2(u)).

    tau(uv) = c_v(tau(u)) tau(v) and c_uv = c_v o c_u, so the reachable pairs from
    (1, id) under the basis moves are exactly {(tau(u), c_u)}.
    """
    for L in (L1, L2):
        if L.automaton.ambient is not spec.ambient_quotient:
            raise AmalgamError("ambient mismatch")
    fp = spec.ambient_quotient
    T = spec.T
    A = am.intersect(L1.automaton, L2.automaton)
    B = am.free_basis(A)
    moves = []
    for k, v in enumerate(B.generators):
        for sign, w in ((1, v), (-1, fp.inv(v))):
            moves.append(((k, sign),) + _tau_step(spec, L1, L2, w))
    ident = tuple(range(T.order))
    start = (0, ident)
    words = {start: ()}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        t, c = state
        for letter, tk, ck in moves:
            nxt = (T.mul(ck[t], tk), tuple(ck[c[x]] for x in range(T.order)))
            if nxt not in words:
                words[nxt] = reduce_word(words[state] + (letter,))
                queue.append(nxt)
    witnesses = {}
    products = set()
    for (t, c), u in words.items():
        witnesses.setdefault(t, u)
        products.add(c.index(t))   # lift1(u) lift2(u)^-1 = c_u^-1(tau(u))
    for t, u in witnesses.items():
        if tau(spec, L1, L2, am.expand(fp, B.generators, u)) != t:
            raise AmalgamError("closure disagrees with direct evaluation of tau")
    return TwistClosureResult(frozenset(witnesses), witnesses, frozenset(products),
                              A, B, len(words))


def intersection_rank_amalgam(spec: AmalgamSpec, L1: LiftedSubgroup, L2: LiftedSubgroup) -> dict:
    res = tau_closure(spec, L1, L2)
    rbar = am.reduced_rank(res.intersection)
    return {
        "reduced_rank": len(res.image) * rbar,
        "coset_index": len(res.image),
        "quotient_reduced_rank": rbar,
        "closure": res,
    }


def verify_theorem2(spec: AmalgamSpec, L1: LiftedSubgroup, L2: LiftedSubgroup) -> dict:
    """Both sides of the amalgam bound plus the structural conditions behind equality."""
    data = intersection_rank_amalgam(spec, L1, L2)
    res = data["closure"]
    A1, A2 = L1.automaton, L2.automaton
    r1, r2 = am.reduced_rank(A1), am.reduced_rank(A2)
    q = q_star(*spec.quotients)
    coef = coefficient(q)
    rhs = coef * spec.T.order * r1 * r2
    lhs = data["reduced_rank"]
    normal = A1.complete and am.is_normal(A1)
    covers = normal and am.product_covers_group(A1, L2.generators)
    report = {
        "lhs": lhs,
        "q_star": q,
        "coefficient": coef,
        "T_order": spec.T.order,
        "rbar1": r1,
        "rbar2": r2,
        "rhs": rhs,
        "holds": Fraction(lhs) <= rhs,
        "equality": Fraction(lhs) == rhs,
        "coset_index": data["coset_index"],
        "quotient_intersection_rbar": data["quotient_reduced_rank"],
        "tau_image": sorted(res.image),
        "cond13": bool(covers),
        "cond14": len(res.image) == spec.T.order,
        "cond15": len(res.products) == spec.T.order,
        "states_explored": res.states_explored,
    }
    i1, i2, i12 = am.index(A1), am.index(A2), am.index(res.intersection)
    report["indices"] = [i1, i2, i12]
    if covers and i2 != float("inf"):
        report["index_product"] = i12 == i1 * i2
    return report


# --- built-in amalgams ---------------------------------------------------------------

def _builtin(order1: int, order_t: int) -> AmalgamSpec:
    from .groups import cyclic, direct_product, hom_from_generators

    klein = direct_product(cyclic(2), cyclic(2))
    G1 = cyclic(order1)
    G2 = direct_product(cyclic(order_t), klein)
    T = cyclic(order_t)
    e1 = hom_from_generators(T, G1, {1: order1 // order_t})
    e2 = hom_from_generators(T, G2, {1: klein.order})   # first coordinate
    return make_amalgam(G1, G2, T, e1, e2)


BUILTIN_AMALGAMS = {
    # Z4 *_Z2 (Z2 x Z2 x Z2): quotient Z2 * (Z2 x Z2)
    "z4-z2cube": lambda: _builtin(4, 2),
    # Z6 *_Z3 (Z3 x Z2 x Z2): quotient Z2 * (Z2 x Z2)
    "z6-z3z2z2": lambda: _builtin(6, 3),
}


def builtin_amalgam(name: str) -> AmalgamSpec:
    try:
        return BUILTIN_AMALGAMS[name]()
    except KeyError:
        raise AmalgamError(f"unknown built-in amalgam {name!r}") from None
