"""Finite groups stored as Cayley tables.

Element 0 is always the identity.  Tables are numpy integer arrays where
``table[g, h]`` is the index of ``g*h``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

INFINITY = math.inf

SPECTRUM_GUARD = 512
FULL_ASSOCIATIVITY_LIMIT = 64


class GroupError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    table: np.ndarray
    name: str = "G"
    generators: tuple = ()
    labels: tuple = ()
    inverse: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        table = np.asarray(self.table, dtype=np.int64)
        table.setflags(write=False)
        object.__setattr__(self, "table", table)
        _validate_table(table)
        inv = np.argmin(table, axis=1)  # identity 0 is the minimum of each row
        inv.setflags(write=False)
        object.__setattr__(self, "inverse", inv)
        if not self.generators:
            object.__setattr__(self, "generators", greedy_generators(table))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(len(table))))

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, g: int, h: int) -> int:
        return int(self.table[g, h])

    def inv(self, g: int) -> int:
        return int(self.inverse[g])

    def power(self, g: int, k: int) -> int:
        if k < 0:
            g, k = self.inv(g), -k
        out = 0
        for _ in range(k % self.element_order(g)):
            out = self.mul(out, g)
        return out

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != 0:
            x = self.mul(x, g)
            k += 1
        return k

    def conj(self, t: int, g: int) -> int:
        """g^-1 t g."""
        return self.mul(self.mul(self.inv(g), t), g)

    def closure(self, gens) -> frozenset:
        """Subgroup generated by ``gens``."""
        seen = {0}
        frontier = [0]
        gens = [int(g) for g in gens]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = int(self.table[x, g])
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    def is_normal(self, subset) -> bool:
        subset = frozenset(int(s) for s in subset)
        if 0 not in subset or self.closure(subset) != subset:
            return False
        return all(self.conj(s, g) in subset for s in subset for g in range(self.order))

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"


def _validate_table(table: np.ndarray) -> None:
    n = table.shape[0]
    if table.ndim != 2 or table.shape != (n, n) or n < 1:
        raise GroupError("Cayley table must be a non-empty square array")
    if table.min() < 0 or table.max() >= n:
        raise GroupError("Cayley table entry out of range")
    ident = np.arange(n)
    if not (np.array_equal(table[0], ident) and np.array_equal(table[:, 0], ident)):
        raise GroupError("row/column 0 must be the identity maps")
    srt = np.sort(table, axis=1)
    if not (np.all(srt == ident) and np.all(np.sort(table, axis=0) == ident[:, None])):
        raise GroupError("Cayley table is not a Latin square")
    # Light's test over a generating set; the full triple check for small tables.
    probes = range(n) if n <= FULL_ASSOCIATIVITY_LIMIT else greedy_generators(table)
    for g in probes:
        left = table[table[:, g]][:, :]          # (x*g)*y
        right = table[:, table[g]]               # x*(g*y)
        if not np.array_equal(left, right):
            raise GroupError("Cayley table is not associative")


def greedy_generators(table) -> tuple:
    """Small generating set: repeatedly add the least element not yet generated."""
    table = np.asarray(table)
    n = len(table)
    gens: list[int] = []
    span = {0}
    while len(span) < n:
        g = min(set(range(n)) - span)
        gens.append(g)
        span = _closure(table, gens)
    return tuple(gens)


def _closure(table, gens):
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = int(table[x, g])
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


@dataclass(frozen=True, eq=False)
class GroupHom:
    source: FiniteGroup
    target: FiniteGroup
    image: tuple

    def __post_init__(self):
        image = tuple(int(v) for v in self.image)
        object.__setattr__(self, "image", image)
        if len(image) != self.source.order:
            raise GroupError("image has wrong length")
        if image[0] != 0:
            raise GroupError("identity must map to identity")
        src, tgt = self.source.table, self.target.table
        img = np.asarray(image)
        if not np.array_equal(img[src], tgt[img[:, None], img[None, :]]):
            raise GroupError("map is not a homomorphism")

    def __call__(self, g: int) -> int:
        return self.image[g]

    @property
    def injective(self) -> bool:
        return len(set(self.image)) == len(self.image)

    def kernel(self) -> frozenset:
        return frozenset(g for g, v in enumerate(self.image) if v == 0)

    def image_set(self) -> frozenset:
        return frozenset(self.image)


def hom_from_generators(source: FiniteGroup, target: FiniteGroup, gen_images: dict) -> GroupHom:
    """Extend an assignment on generators of ``source`` to a homomorphism.

    Raises GroupError if the assignment is not well defined.
    """
    gen_images = {int(k): int(v) for k, v in gen_images.items()}
    image = {0: 0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for g, gi in gen_images.items():
                y = source.mul(x, g)
                v = target.mul(image[x], gi)
                if y in image:
                    if image[y] != v:
                        raise GroupError("generator images do not define a homomorphism")
                else:
                    image[y] = v
                    nxt.append(y)
        frontier = nxt
    if len(image) != source.order:
        raise GroupError("given elements do not generate the source group")
    return GroupHom(source, target, tuple(image[g] for g in range(source.order)))


# --- constructors -------------------------------------------------------------

def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise GroupError("cyclic group needs n >= 1")
    idx = np.arange(n)
    return FiniteGroup((idx[:, None] + idx[None, :]) % n, name=f"Z{n}",
                       generators=(1,) if n > 1 else ())


def dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order 2n: elements r^0..r^(n-1), then s r^0..s r^(n-1)."""
    if n < 1:
        raise GroupError("dihedral group needs n >= 1")
    m = 2 * n
    table = np.zeros((m, m), dtype=np.int64)
    for g in range(m):
        gs, gi = divmod(g, n)
        for h in range(m):
            hs, hi = divmod(h, n)
            # r^i s = s r^-i
            k = (hi - gi) % n if hs else (gi + hi) % n
            if hs:
                table[g, h] = ((gs ^ hs) * n) + k
            else:
                table[g, h] = gs * n + k
    labels = tuple(["1"] + [f"r^{i}" for i in range(1, n)] + ["s"] + [f"sr^{i}" for i in range(1, n)])
    gens = tuple(g for g in (1 % n, n) if g) if n > 1 else (n,)
    return FiniteGroup(table, name=f"D{n}", generators=gens, labels=labels)


def direct_product(a: FiniteGroup, b: FiniteGroup) -> FiniteGroup:
    """Element (i, j) is stored at index i*|b| + j."""
    nb = b.order
    ta, tb = a.table, b.table
    table = (ta[:, None, :, None] * nb + tb[None, :, None, :]).reshape(a.order * nb, a.order * nb)
    gens = tuple(g * nb for g in a.generators) + tuple(b.generators)
    labels = tuple(f"({x},{y})" for x in a.labels for y in b.labels)
    return FiniteGroup(table, name=f"{a.name}x{b.name}", generators=gens, labels=labels)


def from_table(table, name: str = "G") -> FiniteGroup:
    return FiniteGroup(np.asarray(table), name=name)


def quotient_map(g: FiniteGroup, normal) -> GroupHom:
    """Projection G -> G/N; cosets are numbered by their least element."""
    normal = frozenset(int(x) for x in normal)
    if not g.is_normal(normal):
        raise GroupError("subset is not a normal subgroup")
    coset_of = {}
    reps = []
    for x in range(g.order):
        if x in coset_of:
            continue
        k = len(reps)
        reps.append(x)
        for t in normal:
            coset_of[g.mul(t, x)] = k
    m = len(reps)
    table = np.array([[coset_of[g.mul(reps[i], reps[j])] for j in range(m)] for i in range(m)])
    gens = tuple(sorted({coset_of[x] for x in g.generators} - {0}))
    q = FiniteGroup(table, name=f"{g.name}/{len(normal)}", generators=gens,
                    labels=tuple(g.labels[r] for r in reps))
    return GroupHom(g, q, tuple(coset_of[x] for x in range(g.order)))


def quotient(g: FiniteGroup, normal) -> FiniteGroup:
    return quotient_map(g, normal).target


def permutation_group(gens, name: str = "P", guard: int = 5000):
    """Close permutations (tuples) under composition.

    Returns ``(group, elements)`` with ``elements[i]`` the permutation of
    element i.  Products follow the right-action convention: ``g*h`` applies
    g first, then h.
    """
    gens = [tuple(int(v) for v in p) for p in gens]
    d = len(gens[0]) if gens else 0
    ident = tuple(range(d))
    elems = [ident]
    index = {ident: 0}
    i = 0
    while i < len(elems):
        x = elems[i]
        for p in gens:
            y = tuple(p[v] for v in x)
            if y not in index:
                if len(elems) >= guard:
                    raise GroupError(f"permutation group exceeds guard {guard}")
                index[y] = len(elems)
                elems.append(y)
        i += 1
    arr = np.array(elems, dtype=np.int64).reshape(len(elems), d)
    n = len(elems)
    table = np.empty((n, n), dtype=np.int64)
    for a in range(n):
        prod = arr[:, arr[a]] if d else arr  # apply a then b: b[a[v]]
        for b in range(n):
            table[a, b] = index[tuple(prod[b])]
    group = FiniteGroup(table, name=name, generators=tuple(index[p] for p in gens if p != ident))
    return group, elems


def symmetric(n: int) -> FiniteGroup:
    if n < 2:
        return cyclic(1)
    gens = [tuple([1, 0] + list(range(2, n))), tuple(list(range(1, n)) + [0])]
    return permutation_group(gens, name=f"S{n}")[0]


def alternating(n: int) -> FiniteGroup:
    if n < 3:
        return cyclic(1)
    gens = [tuple([1, 2, 0] + list(range(3, n)))]
    if n > 3:
        gens.append(tuple([0] + list(range(2, n)) + [1]) if n % 2 == 0
                    else tuple(list(range(1, n)) + [0]))
    return permutation_group(gens, name=f"A{n}")[0]


def construct_group(kind: str, *args, **kwargs) -> FiniteGroup:
    builders = {
        "cyclic": cyclic,
        "dihedral": dihedral,
        "direct_product": direct_product,
        "from_table": from_table,
        "quotient": quotient,
        "symmetric": symmetric,
        "alternating": alternating,
    }
    if kind not in builders:
        raise GroupError(f"unknown group kind {kind!r}")
    return builders[kind](*args, **kwargs)


def find_isomorphism(a: FiniteGroup, b: FiniteGroup):
    """Some isomorphism a -> b as a GroupHom, or None."""
    if a.order != b.order:
        return None
    gens = list(a.generators)
    orders = [a.element_order(g) for g in gens]
    candidates = [[y for y in range(b.order) if b.element_order(y) == o] for o in orders]
    for images in itertools.product(*candidates):
        try:
            hom = hom_from_generators(a, b, dict(zip(gens, images)))
        except GroupError:
            continue
        if hom.injective:
            return hom
    return None


# --- subgroup orders and the q* invariant -------------------------------------

def subgroup_order_spectrum(g: FiniteGroup) -> set:
    """Orders of all subgroups, by exhaustive closure from the trivial group."""
    if g.order > SPECTRUM_GUARD:
        raise GroupError(f"group order {g.order} exceeds spectrum guard {SPECTRUM_GUARD}")
    n = g.order

    def mask(s):
        return sum(1 << x for x in s)

    seen = {1}
    stack = [frozenset([0])]
    orders = {1}
    while stack:
        sub = stack.pop()
        for x in range(n):
            if x in sub:
                continue
            bigger = g.closure(list(sub) + [x])
            m = mask(bigger)
            if m not in seen:
                seen.add(m)
                orders.add(len(bigger))
                stack.append(bigger)
    return orders


def _sylow_q_star(order: int) -> float:
    cands = [p for p in range(3, order + 1, 2) if order % p == 0 and _is_prime(p)]
    if order % 4 == 0:
        cands.append(4)
    return min(cands) if cands else INFINITY


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p ** 0.5) + 1))


def q_star(*groups: FiniteGroup):
    """Least subgroup order > 2 across the groups; ``math.inf`` if none."""
    spectral = min((o for g in groups for o in subgroup_order_spectrum(g) if o > 2),
                   default=INFINITY)
    closed = min((_sylow_q_star(g.order) for g in groups), default=INFINITY)
    if spectral != closed:
        raise GroupError(f"q* mismatch: spectrum {spectral} vs Sylow form {closed}")
    return spectral


def coefficient(q) -> Fraction:
    """2q/(q-2), and 2 for q = infinity."""
    if q == INFINITY:
        return Fraction(2)
    if q <= 2:
        raise GroupError("coefficient needs q > 2")
    return Fraction(2 * q, q - 2)
