"""Random subgroups for fuzz tests."""
import random

from amalgrank import amalgam as ag
from amalgrank import automaton as am
from amalgrank.groups import permutation_group


def target_groups():
    """Element lists (as permutations) of S3, S4, D4 and A4."""
    out = {}
    out["S3"] = permutation_group([(1, 0, 2), (1, 2, 0)])[1]
    out["S4"] = permutation_group([(1, 0, 2, 3), (1, 2, 3, 0)])[1]
    out["D4"] = permutation_group([(1, 2, 3, 0), (0, 3, 2, 1)])[1]
    out["A4"] = permutation_group([(1, 2, 0, 3), (1, 0, 3, 2)])[1]
    return out


TARGETS = target_groups()


def _compose(p, q):
    return tuple(q[i] for i in p)


def _involutions(elems):
    ident = elems[0]
    return [g for g in elems if g != ident and _compose(g, g) == ident]


def random_kernel(fp, rng: random.Random):
    """Kernel of a random map of the ambient onto a subgroup of S3, S4, D4 or A4
    that is injective on every factor (so the kernel is factor-free)."""
    while True:
        elems = TARGETS[rng.choice(sorted(TARGETS))]
        images = []
        ok = True
        for f in fp.factors:
            if f.order == 2:
                images.append({1: rng.choice(_involutions(elems))})
            elif f.order == 4 and all(f.element_order(x) <= 2 for x in range(4)):
                invs = _involutions(elems)
                pairs = [(y, z) for y in invs for z in invs
                         if y != z and _compose(y, z) == _compose(z, y)]
                if not pairs:
                    ok = False
                    break
                y, z = rng.choice(pairs)
                images.append({2: y, 1: z, 3: _compose(y, z)})
            else:
                order = f.order
                cands = [g for g in elems if _order(g) == order]
                if not cands:
                    ok = False
                    break
                g = rng.choice(cands)
                images.append({k: _power(g, k) for k in range(1, order)})
        if not ok:
            continue
        gens = sorted({p for d in images for p in d.values()})
        Q, qel = permutation_group(gens)
        idx = {p: i for i, p in enumerate(qel)}
        maps = [(lambda d: (lambda x: idx[d[x]]))(d) for d in images]
        return am.cayley_automaton(fp, Q, maps)


def _power(g, k):
    out = tuple(range(len(g)))
    for _ in range(k):
        out = _compose(out, g)
    return out


def _order(g):
    k, cur = 1, g
    while cur != tuple(range(len(g))):
        cur = _compose(cur, g)
        k += 1
    return k


def random_words_subgroup(fp, rng, count=3, length=6):
    while True:
        gens = []
        for _ in range(rng.randint(1, count)):
            raw = []
            for _ in range(rng.randint(1, length)):
                a = (raw[-1][0] + rng.randint(1, fp.rank - 1)) % fp.rank if raw else rng.randrange(fp.rank)
                raw.append((a, rng.randint(1, fp.factors[a].order - 1)))
            gens.append(fp.normalize(raw))
        A = am.subgroup(fp, gens)
        if A.factor_free:
            return A


def random_factor_free(fp, rng):
    if rng.random() < 0.6:
        return random_kernel(fp, rng)
    return random_words_subgroup(fp, rng)


def random_lifted(spec, rng, A=None):
    A = A if A is not None else random_factor_free(spec.ambient_quotient, rng)
    n = len(am.free_basis(A))
    twists = {i: rng.randrange(spec.T.order) for i in range(n) if rng.random() < 0.7}
    return ag.make_lifted_subgroup(spec, A, twists=twists)
