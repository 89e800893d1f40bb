"""Finite permutation quotients of triangle groups T(p,q,r) = <x,y | x^p = y^q = (xy)^r = 1>.

Equality of words in the triangle group itself is decided with the faithful
reflection representation of the Coxeter group with edge labels p, q, r: the
rotations x = s1 s2 and y = s2 s3 generate T(p,q,r).
"""
from __future__ import annotations

import itertools

import mpmath

from .groups import GroupError, permutation_group

PRECISION = 60          # decimal digits
TOLERANCE = mpmath.mpf(10) ** -30


class NotFound(LookupError):
    pass


class TriangleWords:
    """Matrices of the triangle group; words are sequences of (generator, power)."""

    def __init__(self, p: int, q: int, r: int):
        with mpmath.workdps(PRECISION):
            m = {(0, 1): p, (1, 2): q, (0, 2): r}
            bilinear = mpmath.eye(3)
            for (i, j), mij in m.items():
                bilinear[i, j] = bilinear[j, i] = -mpmath.cos(mpmath.pi / mij)
            refl = []
            for i in range(3):
                s = mpmath.eye(3)
                for j in range(3):
                    s[i, j] -= 2 * bilinear[i, j]
                refl.append(s)
            self.gens = (refl[0] * refl[1], refl[1] * refl[2])
        self.orders = (p, q)

    def matrix(self, word):
        with mpmath.workdps(PRECISION):
            out = mpmath.eye(3)
            for g, k in word:
                out = out * self.gens[g] ** (k % self.orders[g])
            return out

    def equal(self, u, v) -> bool:
        with mpmath.workdps(PRECISION):
            d = self.matrix(u) - self.matrix(v)
            return max(abs(d[i, j]) for i in range(3) for j in range(3)) < TOLERANCE

    def distinct(self, words) -> list:
        """One representative word per group element, in input order."""
        reps, mats = [], []
        with mpmath.workdps(PRECISION):
            for w in words:
                m = self.matrix(w)
                if not any(max(abs((m - n)[i, j]) for i in range(3) for j in range(3)) < TOLERANCE
                           for n in mats):
                    reps.append(w)
                    mats.append(m)
        return reps


def _cycle_types(d: int, p: int):
    """Cycle types of permutations of d points whose order is exactly p."""
    parts = [k for k in range(1, p + 1) if p % k == 0]

    def rec(rest, largest):
        if rest == 0:
            yield []
            return
        for k in reversed(parts):
            if k <= min(rest, largest):
                for tail in rec(rest - k, k):
                    yield [k] + tail

    for ctype in rec(d, p):
        if _lcm(ctype) == p:
            yield ctype


def _lcm(nums) -> int:
    out = 1
    for k in nums:
        out = out * k // _gcd(out, k)
    return out


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _perm_from_cycles(d: int, ctype) -> tuple:
    perm = list(range(d))
    start = 0
    for k in ctype:
        for i in range(k):
            perm[start + i] = start + (i + 1) % k
        start += k
    return tuple(perm)


def _y_candidates(x, q: int, r: int):
    """All y with y^q = 1 and every cycle of xy of length dividing r (x acts first).

    Only q = 2 is searched by backtracking; other q fall back to enumeration.
    """
    d = len(x)
    if q != 2:
        for y in itertools.permutations(range(d)):
            yield tuple(y)
        return
    y = [-1] * d

    def consistent():
        for i in range(d):
            j, length = i, 0
            while True:
                nxt = y[x[j]]
                if nxt < 0:
                    if length >= r:
                        return False
                    break
                j = nxt
                length += 1
                if j == i:
                    if r % length:
                        return False
                    break
                if length > r:
                    return False
        return True

    def rec():
        try:
            i = y.index(-1)
        except ValueError:
            yield tuple(y)
            return
        for j in range(i, d):
            if y[j] != -1:
                continue
            y[i], y[j] = j, i
            if consistent():
                yield from rec()
            y[i] = y[j] = -1

    yield from rec()


def _apply(perm_gens, word, d):
    """Permutation of a word (right action: the first letter acts first)."""
    out = list(range(d))
    for g, k in word:
        for _ in range(k):
            out = [perm_gens[g][i] for i in out]
    return tuple(out)


def _power(perm, k):
    out = tuple(range(len(perm)))
    for _ in range(k):
        out = tuple(perm[i] for i in out)
    return out


def _order(perm) -> int:
    k, cur, ident = 1, perm, tuple(range(len(perm)))
    while cur != ident:
        cur = tuple(perm[i] for i in cur)
        k += 1
    return k


def _transitive(perms, d) -> bool:
    seen, stack = {0}, [0]
    while stack:
        i = stack.pop()
        for g in perms:
            if g[i] not in seen:
                seen.add(g[i])
                stack.append(g[i])
    return len(seen) == d


def triangle_quotient_search(p: int, q: int, r: int, M, degree_bound: int = 12,
                             group_guard: int = 5000):
    """Transitive permutation images of T(p,q,r) injective on the words M.

    Returns (group, x index, y index, degree).  Raises NotFound within the bound.
    """
    if mpmath.mpf(1) / p + mpmath.mpf(1) / q + mpmath.mpf(1) / r > 1:
        raise GroupError("the triangle group is finite; search it directly")
    words = TriangleWords(p, q, r).distinct([tuple(w) for w in M])
    for d in range(1, degree_bound + 1):
        for ctype in _cycle_types(d, p):
            x = _perm_from_cycles(d, ctype)
            for y in _y_candidates(x, q, r):
                if _order(y) != q or not _transitive((x, y), d):
                    continue
                xy = tuple(y[i] for i in x)
                if _power(xy, r) != tuple(range(d)):
                    continue
                images = {_apply((x, y), w, d) for w in words}
                if len(images) != len(words):
                    continue
                try:
                    group, elems = permutation_group([x, y], name=f"T({p},{q},{r})/{d}",
                                                     guard=group_guard)
                except GroupError:
                    continue
                index = {e: i for i, e in enumerate(elems)}
                return group, index[x], index[y], d
    raise NotFound(f"no quotient of T({p},{q},{r}) of degree <= {degree_bound} separates M")
