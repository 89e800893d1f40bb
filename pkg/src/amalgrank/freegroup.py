"""Basis changes in a free group via Stallings folding with tracked labels.

Letters of a free group word are ``(index, +-1)`` pairs.
"""
from __future__ import annotations


class NotABasis(ValueError):
    pass


def reduce_word(letters) -> tuple:
    out: list = []
    for g in letters:
        if out and out[-1] == (g[0], -g[1]):
            out.pop()
        else:
            out.append(g)
    return tuple(out)


def invert_word(w) -> tuple:
    return tuple((i, -e) for i, e in reversed(w))


def substitute(w, images) -> tuple:
    """Replace each letter i by ``images[i]``."""
    out = []
    for i, e in w:
        out.extend(images[i] if e > 0 else invert_word(images[i]))
    return reduce_word(out)


def inverse_basis_change(words, rank: int) -> list:
    """Invert a basis change of the free group F(c_0..c_{rank-1}).

    ``words[j]`` is the new generator b_j written over the c's.  Returns, for
    each c_i, its expression as a reduced word over the b's.  Raises
    NotABasis if the b's do not freely generate F(c).
    """
    if len(words) != rank:
        raise NotABasis(f"{len(words)} words cannot form a basis of rank {rank}")
    parent = [0]
    # edge: [src, letter, dst, track]; letter c_i is read from src to dst
    edges: dict = {}

    def new_vertex():
        parent.append(len(parent))
        return len(parent) - 1

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for j, w in enumerate(words):
        w = reduce_word(w)
        if not w:
            raise NotABasis(f"word {j} is trivial")
        v = 0
        for k, (i, e) in enumerate(w):
            u = 0 if k == len(w) - 1 else new_vertex()
            track = ((j, 1),) if k == 0 else ()
            src, dst = (v, u) if e > 0 else (u, v)
            edges[len(edges)] = [src, i, dst, track if e > 0 else invert_word(track)]
            v = u

    def gauge(v, g):
        # conjugate the frame at v: edges leaving v get g*f, edges entering get f*g^-1
        ginv = invert_word(g)
        for e in edges.values():
            if find(e[0]) == v:
                e[3] = reduce_word(g + e[3])
            if find(e[2]) == v:
                e[3] = reduce_word(e[3] + ginv)

    def half_edges(e):
        src, i, dst, _ = edges[e]
        return ((find(src), (i, 1)), (find(dst), (i, -1)))

    while True:
        seen: dict = {}
        clash = None
        for e in edges:
            for h in half_edges(e):
                other = seen.setdefault(h, e)
                if other != e:
                    clash = (other, e, h)
                    break
            if clash:
                break
        if clash is None:
            break
        _fold(edges, *clash, find, parent, gauge)

    if any(find(v) != find(0) for v in range(len(parent))):
        raise NotABasis("words generate a proper subgroup")
    images: dict = {}
    for src, i, dst, f in edges.values():
        if i in images:
            raise NotABasis("folded graph is not a rose")
        images[i] = f
    if sorted(images) != list(range(rank)):
        raise NotABasis("words generate a proper subgroup")
    return [images[i] for i in range(rank)]


def _fold(edges, e1, e2, half, find, parent, gauge):
    _, (_, sign) = half

    def read(e):
        # other end and track of e read out of v along the shared half-edge
        src, i, dst, f = edges[e]
        if sign > 0:
            return find(dst), f
        return find(src), invert_word(f)

    w1, f1 = read(e1)
    w2, f2 = read(e2)
    base = find(0)
    if w2 == base and w1 != base:
        e1, e2, w1, w2, f1, f2 = e2, e1, w2, w1, f2, f1
    if w1 != w2:
        gauge(w2, reduce_word(invert_word(f1) + f2))
        parent[w2] = w1
        f1, f2 = read(e1)[1], read(e2)[1]
    if f1 != f2:
        raise NotABasis("folding produced a relation among the words")
    del edges[e2]
