"""Subgroup automata over free products of finite groups.

States are the primary vertices (right cosets).  ``out[p][a]`` maps each
non-identity element ``x`` of factor ``a`` to the state ``p.x``.  The
``a``-components of the transition relation are the secondary vertices.
Every public automaton is folded: transitions are symmetric and saturated,
and states are numbered canonically by breadth-first search from the base.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .words import FreeProduct, Word


class AutomatonError(ValueError):
    pass


class NotFactorFree(AutomatonError):
    pass


class Indeterminate(RuntimeError):
    """A resource guard was hit before the computation closed."""


class Automaton:
    def __init__(self, ambient: FreeProduct, out, base: int = 0):
        self.ambient = ambient
        self.out = tuple(tuple(dict(d) for d in row) for row in out)
        self.base = base

    @classmethod
    def canonical(cls, ambient: FreeProduct, out, base: int) -> "Automaton":
        """Renumber reachable states by BFS (state, factor, element order)."""
        order = {base: 0}
        queue = [base]
        i = 0
        while i < len(queue):
            p = queue[i]
            i += 1
            for d in out[p]:
                for x in sorted(d):
                    q = d[x]
                    if q not in order:
                        order[q] = len(queue)
                        queue.append(q)
        new = [tuple({x: order[q] for x, q in sorted(out[p][a].items())}
                     for a in range(ambient.rank)) for p in queue]
        return cls(ambient, new, 0)

    @classmethod
    def trivial(cls, ambient: FreeProduct) -> "Automaton":
        return cls(ambient, [tuple({} for _ in range(ambient.rank))])

    @property
    def size(self) -> int:
        return len(self.out)

    @property
    def states(self) -> range:
        return range(len(self.out))

    def delta(self, p: int, a: int, x: int):
        return self.out[p][a].get(x)

    def trace(self, w: Word, start: int | None = None):
        """End state of reading ``w`` from ``start``; None if a step is undefined."""
        p = self.base if start is None else start
        for a, x in w:
            p = self.out[p][a].get(x)
            if p is None:
                return None
        return p

    def rebased(self, p: int) -> "Automaton":
        return Automaton.canonical(self.ambient, self.out, p)

    @cached_property
    def key(self) -> tuple:
        """Canonical form; equal keys mean isomorphic pointed automata."""
        return tuple(tuple(tuple(sorted(d.items())) for d in row) for row in self.out)

    def __eq__(self, other):
        return isinstance(other, Automaton) and self.ambient is other.ambient and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @cached_property
    def factor_free(self) -> bool:
        return not any(q == p for p, row in enumerate(self.out) for d in row for q in d.values())

    @cached_property
    def complete(self) -> bool:
        fp = self.ambient
        return all(len(row[a]) == fp.factors[a].order - 1 for row in self.out for a in range(fp.rank))

    def components(self, a: int) -> list:
        """The a-secondary vertices: sorted member tuples, each of size >= 2 or with a self-loop."""
        seen = set()
        comps = []
        for p, row in enumerate(self.out):
            if p in seen or not row[a]:
                continue
            members = tuple(sorted({p, *row[a].values()}))
            seen.update(members)
            comps.append(members)
        return comps

    def __repr__(self):
        return f"Automaton({self.ambient.name}, states={self.size})"


# --- folding ------------------------------------------------------------------

class _Folder:
    """Mutable scratch automaton with union-find folding."""

    def __init__(self, fp: FreeProduct):
        self.fp = fp
        self.parent: list[int] = []
        self.out: list = []
        self.pending: list = []
        self.dirty: set = set()
        self.live = 0

    def new_state(self) -> int:
        p = len(self.parent)
        self.parent.append(p)
        self.out.append([{} for _ in range(self.fp.rank)])
        self.live += 1
        return p

    def find(self, p: int) -> int:
        root = p
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[p] != root:
            self.parent[p], p = root, self.parent[p]
        return root

    def delta(self, p, a, x):
        q = self.out[self.find(p)][a].get(x)
        return None if q is None else self.find(q)

    def _set(self, p, a, x, q):
        d = self.out[p][a]
        old = d.get(x)
        if old is not None and self.find(old) != self.find(q):
            self.pending.append((old, q))
        else:
            d[x] = q

    def add_edge(self, p, a, x, q):
        p, q = self.find(p), self.find(q)
        if x == 0:
            self.pending.append((p, q))
            return
        g = self.fp.factors[a]
        self._set(p, a, x, q)
        self._set(q, a, g.inv(x), p)
        self.dirty.add((p, a))

    def add_path(self, start, w: Word, end):
        p = start
        for i, (a, x) in enumerate(w):
            q = end if i == len(w) - 1 else self.new_state()
            self.add_edge(p, a, x, q)
            p = q
        if not w:
            self.pending.append((start, end))

    def union(self, p, q):
        p, q = self.find(p), self.find(q)
        if p == q:
            return
        keep, gone = min(p, q), max(p, q)
        self.parent[gone] = keep
        self.live -= 1
        for a, d in enumerate(self.out[gone]):
            for x, r in d.items():
                self._set(keep, a, x, r)
            if d:
                self.dirty.add((keep, a))
        self.out[gone] = None

    def run(self):
        while self.pending or self.dirty:
            if self.pending:
                self.union(*self.pending.pop())
                continue
            p, a = self.dirty.pop()
            self._close(self.find(p), a)

    def _close(self, p, a):
        g = self.fp.factors[a]
        mul, inv = g.table, g.inverse
        find = self.find
        pos = {0: p}
        at = {p: 0}
        order = [p]
        kappas = []
        i = 0
        while i < len(order):
            q = order[i]
            i += 1
            gq = at[q]
            for x, r in self.out[q][a].items():
                r = find(r)
                h = int(mul[gq, x])
                s = pos.get(h)
                if s is None:
                    pos[h] = r
                elif find(s) != r:
                    self.pending.append((s, r))
                    self.dirty.add((p, a))
                    return
                if r in at:
                    if at[r] != h:
                        kappas.append(int(mul[h, inv[at[r]]]))
                else:
                    at[r] = h
                    order.append(r)
        if kappas:
            stab = g.closure(kappas)
            for y, s in list(pos.items()):
                for k in stab:
                    z = int(mul[k, y])
                    t = pos.get(z)
                    if t is None:
                        pos[z] = s
                    elif find(t) != find(s):
                        self.pending.append((s, t))
                        self.dirty.add((p, a))
                        return
        for q in order:
            gi = int(inv[at[q]])
            self.out[q][a] = {int(mul[gi, h]): find(s) for h, s in pos.items() if mul[gi, h] != 0}

    def freeze(self, base) -> Automaton:
        self.run()
        base = self.find(base)
        out = {}
        stack = [base]
        while stack:
            p = stack.pop()
            if p in out:
                continue
            row = tuple({x: self.find(q) for x, q in d.items()} for d in self.out[p])
            out[p] = row
            stack.extend(q for d in row for q in d.values() if q not in out)
        return Automaton.canonical(self.fp, out, base)

    @classmethod
    def from_automaton(cls, A: Automaton) -> "_Folder":
        f = cls(A.ambient)
        for _ in A.states:
            f.new_state()
        for p, row in enumerate(A.out):
            for a, d in enumerate(row):
                f.out[p][a] = dict(d)
        return f


def fold(fp: FreeProduct, generators) -> Automaton:
    """Folded automaton of the subgroup generated by ``generators`` (normalized words)."""
    f = _Folder(fp)
    base = f.new_state()
    for w in generators:
        f.add_path(base, fp.normalize(w), base)
        f.run()
    return f.freeze(base)


def subgroup(fp: FreeProduct, generators) -> Automaton:
    """fold followed by core."""
    return core(fold(fp, generators))


def is_factor_free(A: Automaton) -> bool:
    return A.factor_free


def membership(A: Automaton, w: Word) -> bool:
    return A.trace(w) == A.base


def index(A: Automaton):
    """Number of states if complete, else ``math.inf``."""
    return A.size if A.complete else float("inf")


def core(A: Automaton) -> Automaton:
    """Prune non-base primary vertices of bipartite degree <= 1."""
    out = [[dict(d) for d in row] for row in A.out]
    alive = [True] * A.size

    def degree(p):
        return sum(1 for d in out[p] if d)

    queue = deque(p for p in A.states if p != A.base and degree(p) <= 1)
    while queue:
        p = queue.popleft()
        if not alive[p] or degree(p) > 1:
            continue
        alive[p] = False
        for a, d in enumerate(out[p]):
            for q in set(d.values()):
                if q == p:
                    continue
                dq = out[q][a]
                for x in [x for x, r in dq.items() if r == p]:
                    del dq[x]
                if q != A.base and degree(q) <= 1:
                    queue.append(q)
            out[p][a] = {}
    kept = {p: tuple(out[p]) for p in A.states if alive[p]}
    return Automaton.canonical(A.ambient, kept, A.base)


def is_normal(A: Automaton) -> bool:
    """True iff re-basing at any state gives the same pointed automaton."""
    if not A.complete:
        return False
    return all(A.rebased(p).key == A.key for p in A.states)


# --- bipartite view, Euler characteristic, bases ------------------------------

@dataclass(frozen=True)
class BipartiteView:
    primary: tuple                # state ids
    secondary: tuple              # (factor, members) per secondary vertex
    edges: tuple                  # (state, secondary index, gauge label)
    comp_of: dict                 # (state, factor) -> secondary index

    @property
    def vertex_count(self) -> int:
        return len(self.primary) + len(self.secondary)

    @property
    def edge_count(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class EulerData:
    view: BipartiteView
    chi: int
    reduced_rank: int


def bipartite_view(A: Automaton, tree_first: dict | None = None) -> BipartiteView:
    """Materialize secondary vertices and gauge labels.

    The label of the edge from state q to a secondary vertex is the element
    taking q to the gauge-reference member (label identity on that member).
    """
    secondary = []
    comp_of = {}
    edges = []
    for a in range(A.ambient.rank):
        for members in A.components(a):
            s = len(secondary)
            secondary.append((a, members))
            ref = (tree_first or {}).get((a, members), members[0])
            back = {q: x for x, q in A.out[ref][a].items()}
            for q in members:
                comp_of[(q, a)] = s
                edges.append((q, s, 0 if q == ref else A.ambient.factors[a].inv(back[q])))
    return BipartiteView(tuple(A.states), tuple(secondary), tuple(edges), comp_of)


def euler_data(A: Automaton) -> EulerData:
    view = bipartite_view(A)
    chi = view.vertex_count - view.edge_count
    deg = {("p", p): 0 for p in A.states}
    for p, s, _ in view.edges:
        deg[("p", p)] += 1
        deg[("s", s)] = deg.get(("s", s), 0) + 1
    twice = sum(d - 2 for d in deg.values())
    if twice != -2 * chi:
        raise AutomatonError(f"degree-sum {twice}/2 disagrees with -chi = {-chi}")
    return EulerData(view, chi, max(0, -chi))


def reduced_rank(A: Automaton) -> int:
    return euler_data(A).reduced_rank


@dataclass(frozen=True)
class FreeBasis:
    """Free basis read off a spanning tree of the bipartite graph.

    ``tree_word[p]`` spells the tree path from the base to state p.
    ``nontree[(q, s)]`` is the generator index of the non-tree edge (q, s).
    """
    generators: tuple
    tree_word: dict
    tree_edges: frozenset
    nontree: dict
    comp_of: dict

    def __len__(self):
        return len(self.generators)


def free_basis(A: Automaton) -> FreeBasis:
    if not A.factor_free:
        raise NotFactorFree("free basis needs a factor-free automaton")
    fp = A.ambient
    comp_key = {}
    comp_members = []
    for a in range(fp.rank):
        for members in A.components(a):
            for q in members:
                comp_key[(q, a)] = len(comp_members)
            comp_members.append((a, members))
    tree_word = {A.base: ()}
    tree_edges = set()
    first = {}
    queue = deque([A.base])
    while queue:
        p = queue.popleft()
        for a in range(fp.rank):
            s = comp_key.get((p, a))
            if s is None or s in first:
                continue
            first[s] = p
            tree_edges.add((p, s))
            for x in sorted(A.out[p][a]):
                q = A.out[p][a][x]
                if q not in tree_word:
                    tree_word[q] = fp.mul(tree_word[p], ((a, x),))
                    tree_edges.add((q, s))
                    queue.append(q)
    gens = []
    nontree = {}
    for s, (a, members) in enumerate(comp_members):
        p0 = first[s]
        for q in members:
            if (q, s) in tree_edges:
                continue
            x = next(y for y, r in A.out[q][a].items() if r == p0)
            nontree[(q, s)] = len(gens)
            gens.append(fp.mul(tree_word[q], ((a, x),), fp.inv(tree_word[p0])))
    chi = euler_data(A).chi
    if gens and len(gens) - 1 != -chi:
        raise AutomatonError("basis size disagrees with Euler characteristic")
    return FreeBasis(tuple(gens), tree_word, frozenset(tree_edges), nontree, comp_key)


def express_in_basis(A: Automaton, B: FreeBasis, w: Word):
    """Reduced word over the basis as ``((index, +-1), ...)``; None if w is not in H."""
    out: list = []

    def push(letter):
        if out and out[-1] == (letter[0], -letter[1]):
            out.pop()
        else:
            out.append(letter)

    p = A.base
    for a, x in w:
        q = A.out[p][a].get(x)
        if q is None:
            return None
        s = B.comp_of[(p, a)]
        i = B.nontree.get((p, s))
        if i is not None:
            push((i, 1))
        j = B.nontree.get((q, s))
        if j is not None:
            push((j, -1))
        p = q
    if p != A.base:
        return None
    return tuple(out)


def expand(fp: FreeProduct, gens, u) -> Word:
    """Evaluate a word over ``gens`` given as ``((index, +-1), ...)``."""
    parts = [gens[i] if e > 0 else fp.inv(gens[i]) for i, e in u]
    return fp.mul(*parts)


# --- constructions ------------------------------------------------------------

def intersect(A1: Automaton, A2: Automaton) -> Automaton:
    """Pullback automaton of H1 and H2, cored."""
    if A1.ambient is not A2.ambient:
        raise AutomatonError("ambient mismatch")
    rank = A1.ambient.rank
    start = (A1.base, A2.base)
    ids = {start: 0}
    pairs = [start]
    rows = []
    i = 0
    while i < len(pairs):
        p1, p2 = pairs[i]
        i += 1
        row = []
        for a in range(rank):
            d1, d2 = A1.out[p1][a], A2.out[p2][a]
            d = {}
            for x, q1 in d1.items():
                q2 = d2.get(x)
                if q2 is None:
                    continue
                key = (q1, q2)
                if key not in ids:
                    ids[key] = len(pairs)
                    pairs.append(key)
                d[x] = ids[key]
            row.append(d)
        rows.append(tuple(row))
    return core(Automaton.canonical(A1.ambient, dict(enumerate(rows)), 0))


def cayley_automaton(fp: FreeProduct, Q, images) -> Automaton:
    """Cayley graph of Q for the map sending factor a through ``images[a]``."""
    gens = sorted({images[a](x) for a in range(fp.rank) for x in fp.nontrivial(a)})
    span = Q.closure(gens)
    if len(span) != Q.order:
        raise AutomatonError(f"images generate a subgroup of order {len(span)}, not {Q.order}")
    out = {}
    for q in range(Q.order):
        out[q] = tuple({x: Q.mul(q, images[a](x)) for x in fp.nontrivial(a)} for a in range(fp.rank))
    return Automaton.canonical(fp, out, 0)


def normal_closure_automaton(fp: FreeProduct, relators, max_states: int = 100000) -> Automaton:
    """Coset enumeration of the normal closure of ``relators`` (HLT style with folding)."""
    relators = [fp.normalize(r) for r in relators]
    f = _Folder(fp)
    f.new_state()
    p = 0
    while p < len(f.parent):
        if f.find(p) != p:
            p += 1
            continue
        for a in range(fp.rank):
            for x in fp.nontrivial(a):
                if f.find(p) != p:
                    break
                if f.delta(p, a, x) is None:
                    f.add_edge(p, a, x, f.new_state())
                    f.run()
        for r in relators:
            if f.find(p) != p:
                break
            _scan_and_fill(f, p, r)
            f.run()
            if f.live > max_states:
                raise Indeterminate(f"coset enumeration exceeded {max_states} states")
        if f.live > max_states:
            raise Indeterminate(f"coset enumeration exceeded {max_states} states")
        p += 1
    A = f.freeze(0)
    if not A.complete:
        raise AutomatonError("coset enumeration finished incomplete")
    return A


def _scan_and_fill(f: _Folder, p: int, w: Word):
    k = len(w)
    cur, i = f.find(p), 0
    while i < k:
        nxt = f.delta(cur, *w[i])
        if nxt is None:
            break
        cur, i = nxt, i + 1
    if i == k:
        if cur != f.find(p):
            f.pending.append((cur, p))
        return
    back, j = f.find(p), k
    while j > i:
        a, x = w[j - 1]
        prv = f.delta(back, a, f.fp.factors[a].inv(x))
        if prv is None:
            break
        back, j = prv, j - 1
    if j == i:
        f.pending.append((cur, back))
        return
    f.add_path(cur, w[i:j], back)


def product_covers_group(A1: Automaton, gens2) -> bool:
    """True iff H2 = <gens2> acts transitively on the cosets of H1 (H1 H2 = G)."""
    return len(coset_orbit(A1, gens2)) == A1.size


def coset_orbit(A1: Automaton, gens2) -> set:
    if not A1.complete:
        raise AutomatonError("product_covers_group needs a complete automaton")
    fp = A1.ambient
    moves = [fp.normalize(g) for g in gens2]
    moves += [fp.inv(g) for g in moves]
    seen = {A1.base}
    stack = [A1.base]
    while stack:
        p = stack.pop()
        for w in moves:
            q = A1.trace(w, p)
            if q not in seen:
                seen.add(q)
                stack.append(q)
    return seen


def brute_force_elements(fp: FreeProduct, gens, max_syllables: int, guard: int = 10 ** 6) -> set:
    """All products of generators whose normal form stays within ``max_syllables``."""
    moves = [fp.normalize(g) for g in gens]
    moves += [fp.inv(g) for g in moves]
    seen = {()}
    frontier = [()]
    while frontier:
        nxt = []
        for w in frontier:
            for g in moves:
                v = fp.join(w, g)
                if len(v) <= max_syllables and v not in seen:
                    seen.add(v)
                    nxt.append(v)
                    if len(seen) > guard:
                        raise Indeterminate("brute-force enumeration exceeded guard")
        frontier = nxt
    return seen


# --- the free-product intersection bound ----------------------------------------

def _is_cyclic(G) -> bool:
    return any(G.element_order(g) == G.order for g in range(G.order))


def special_ambient(fp: FreeProduct) -> bool:
    """Ambients Z2*Zp (p odd prime), Z2*Z4, Z2*(Z2xZ2) and Z2*Z2*Z2.

    For these a complete factor-free pair attains the bound exactly when the
    index of the intersection is the product of the indices.
    """
    orders = sorted(f.order for f in fp.factors)
    if orders == [2, 2, 2]:
        return True
    if len(orders) != 2 or orders[0] != 2:
        return False
    other = max(fp.factors, key=lambda f: f.order)
    n = other.order
    if n == 4:
        return True
    return n > 2 and _is_cyclic(other) and all(n % d for d in range(2, int(n ** 0.5) + 1))


def check_eq2_bound(A1: Automaton, A2: Automaton) -> dict:
    """Compare r(H1 & H2) with 2q/(q-2) r(H1) r(H2) over a free product."""
    from .groups import coefficient, q_star

    for A in (A1, A2):
        if not A.factor_free:
            raise NotFactorFree("the bound is stated for factor-free subgroups")
    P = intersect(A1, A2)
    r1, r2, r12 = reduced_rank(A1), reduced_rank(A2), reduced_rank(P)
    q = q_star(*A1.ambient.factors)
    coef = coefficient(q)
    bound = coef * r1 * r2
    report = {
        "rbar1": r1,
        "rbar2": r2,
        "rbar_intersection": r12,
        "q_star": q,
        "coefficient": coef,
        "bound": bound,
        "holds": r12 <= bound,
        "equality": r12 == bound,
        "indices": [index(A1), index(A2), index(P)],
        "index_multiplicative": None,
        "special_ambient": special_ambient(A1.ambient),
        "equality_consistent": None,
    }
    i1, i2, i12 = report["indices"]
    if A1.complete and A2.complete:
        report["index_multiplicative"] = i12 == i1 * i2
        if report["special_ambient"]:
            report["equality_consistent"] = report["equality"] == report["index_multiplicative"]
    return report
