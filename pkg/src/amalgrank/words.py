"""Free products of finite groups and their normal-form words.

A word is a tuple of ``(factor, element)`` syllables with no identity
elements and no two adjacent syllables from the same factor.
"""
from __future__ import annotations

import itertools
import string
from collections import deque
from dataclasses import dataclass, field

from .groups import FiniteGroup

Word = tuple  # tuple[tuple[int, int], ...]


class WordError(ValueError):
    pass


class WordSyntaxError(WordError):
    def __init__(self, msg, text, pos):
        super().__init__(f"{msg} at position {pos}: {text[:pos]}|{text[pos:]}")
        self.pos = pos


@dataclass(frozen=True, eq=False)
class FreeProduct:
    factors: tuple
    letters: dict = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        factors = tuple(self.factors)
        object.__setattr__(self, "factors", factors)
        if len(factors) < 2:
            raise WordError("a free product needs at least two factors")
        if any(f.order < 2 for f in factors):
            raise WordError("every factor must be nontrivial")
        if not self.letters:
            pool = iter(string.ascii_lowercase)
            letters = {}
            for a, f in enumerate(factors):
                for g in f.generators:
                    letters[next(pool)] = (a, int(g))
            object.__setattr__(self, "letters", letters)
        for name, (a, x) in self.letters.items():
            if len(name) != 1 or not name.isalpha():
                raise WordError(f"letter {name!r} must be a single alphabetic character")
            if not (0 <= a < len(factors)) or not (0 < x < factors[a].order):
                raise WordError(f"letter {name!r} names an invalid element")
        if not self.name:
            object.__setattr__(self, "name", "*".join(f.name for f in factors))
        object.__setattr__(self, "_names", self._element_names())

    def _element_names(self):
        # shortest spelling of every factor element as a product of letter powers
        names = []
        for a, f in enumerate(self.factors):
            steps = []
            for ch, (b, x) in sorted(self.letters.items()):
                if b != a:
                    continue
                for k in range(1, f.element_order(x)):
                    steps.append((f.power(x, k), ch if k == 1 else f"{ch}^{k}"))
            best = {0: ""}
            queue = deque([0])
            while queue:
                g = queue.popleft()
                for y, tok in steps:
                    h = f.mul(g, y)
                    if h not in best:
                        best[h] = best[g] + tok
                        queue.append(h)
            names.append(best)
        return names

    @property
    def rank(self) -> int:
        return len(self.factors)

    def nontrivial(self, a: int) -> range:
        return range(1, self.factors[a].order)

    # --- word arithmetic ------------------------------------------------------

    def normalize(self, raw) -> Word:
        out: list = []
        for a, x in raw:
            a, x = int(a), int(x)
            if not (0 <= a < self.rank) or not (0 <= x < self.factors[a].order):
                raise WordError(f"invalid syllable {(a, x)}")
            if x == 0:
                continue
            if out and out[-1][0] == a:
                y = self.factors[a].mul(out[-1][1], x)
                out.pop()
                if y:
                    out.append((a, y))
            else:
                out.append((a, x))
        return tuple(out)

    def mul(self, *words) -> Word:
        return self.normalize(itertools.chain.from_iterable(words))

    def join(self, u: Word, v: Word) -> Word:
        """Product of two words already in normal form; only the seam is reduced."""
        i = 0
        while i < len(u) and i < len(v):
            (a, x), (b, y) = u[-1 - i], v[i]
            if a != b:
                break
            z = self.factors[a].mul(x, y)
            if z:
                return u[:len(u) - 1 - i] + ((a, z),) + v[i + 1:]
            i += 1
        return u[:len(u) - i] + v[i:]

    def inv(self, w: Word) -> Word:
        return tuple((a, self.factors[a].inv(x)) for a, x in reversed(w))

    def power(self, w: Word, k: int) -> Word:
        if k < 0:
            w, k = self.inv(w), -k
        return self.normalize(itertools.chain.from_iterable([w] * k))

    def conj(self, w: Word, by: Word) -> Word:
        """w^by = by^-1 w by."""
        return self.mul(self.inv(by), w, by)

    # --- text -----------------------------------------------------------------

    def parse(self, text: str) -> Word:
        return self.normalize(_Parser(self, text).parse())

    def format(self, w: Word) -> str:
        if not w:
            return "1"
        return "".join(self._names[a][x] for a, x in w)

    def all_words(self, max_len: int):
        """Every normalized word with at most ``max_len`` syllables."""
        yield ()
        level = [()]
        for _ in range(max_len):
            nxt = []
            for w in level:
                last = w[-1][0] if w else -1
                for a in range(self.rank):
                    if a == last:
                        continue
                    for x in self.nontrivial(a):
                        nxt.append(w + ((a, x),))
            yield from nxt
            level = nxt

    def __repr__(self):
        return f"FreeProduct({self.name})"


def free_product(*factors: FiniteGroup, letters=None, name="") -> FreeProduct:
    return FreeProduct(tuple(factors), dict(letters or {}), name)


class _Parser:
    """Recursive-descent parser for words like ``((ab)^6)^{ba^-1ba^{-2}}``.

    word   := term*
    term   := atom ('^' suffix)*
    atom   := letter | '(' word ')' | '{' word '}'
    suffix := int | '{' int '}' | atom        (an atom suffix means conjugation)
    """

    def __init__(self, fp: FreeProduct, text: str):
        self.fp = fp
        self.text = text
        self.pos = 0

    def error(self, msg):
        raise WordSyntaxError(msg, self.text, self.pos)

    def peek(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self):
        w = self.word()
        if self.peek():
            self.error("unexpected character")
        return w

    def word(self):
        out = []
        while self.peek() and self.peek() not in ")}":
            out.extend(self.term())
        return out

    def term(self):
        base = self.atom()
        while self.peek() == "^":
            self.pos += 1
            k = self.integer()
            if k is not None:
                base = list(self.fp.power(self.fp.normalize(base), k))
            else:
                by = self.fp.normalize(self.atom())
                base = list(self.fp.conj(self.fp.normalize(base), by))
        return base

    def integer(self):
        start = self.pos
        ch = self.peek()
        braced = ch == "{"
        if braced:
            self.pos += 1
            ch = self.peek()
        j = self.pos
        if j < len(self.text) and self.text[j] in "+-":
            j += 1
        k = j
        while k < len(self.text) and self.text[k].isdigit():
            k += 1
        if k == j:
            self.pos = start
            return None
        value = int(self.text[self.pos:k])
        self.pos = k
        if braced:
            if self.peek() != "}":
                self.pos = start
                return None
            self.pos += 1
        return value

    def atom(self):
        ch = self.peek()
        if ch in "({":
            close = ")" if ch == "(" else "}"
            self.pos += 1
            inner = self.word()
            if self.peek() != close:
                self.error(f"expected {close!r}")
            self.pos += 1
            return inner
        if ch == "1":
            self.pos += 1
            return []
        if ch in self.fp.letters:
            self.pos += 1
            return [self.fp.letters[ch]]
        if not ch:
            self.error("unexpected end of input")
        self.error(f"unknown letter {ch!r}")
