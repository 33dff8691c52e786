"""Free-group words: reduction, printing, evaluation and enumeration.

A word is a tuple of (symbol, exponent) letters with exponent +1 or -1,
read left to right as a matrix product.
"""

from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np

Word = tuple


def letter_inverse(a):
    return (a[0], -a[1])


def reduce(word: Iterable) -> Word:
    out = []
    for a in word:
        if out and out[-1][0] == a[0] and out[-1][1] == -a[1]:
            out.pop()
        else:
            out.append((a[0], a[1]))
    return tuple(out)


def inverse(word: Word) -> Word:
    return tuple(letter_inverse(a) for a in reversed(word))


def mul(*words: Word) -> Word:
    out = ()
    for w in words:
        out = reduce(out + tuple(w))
    return out


def conj(c: Word, w: Word) -> Word:
    """c w c^-1."""
    return mul(c, w, inverse(c))


def commutator(a: Word, b: Word) -> Word:
    return mul(a, b, inverse(a), inverse(b))


def gen(symbol: str, exp: int = 1) -> Word:
    return ((symbol, exp),)


def to_str(word: Word) -> str:
    if not word:
        return "1"
    return " ".join(s if e == 1 else f"{s}^-1" for s, e in word)


def parse(text: str) -> Word:
    text = text.strip()
    if text in ("", "1"):
        return ()
    out = []
    for tok in text.split():
        if tok.endswith("^-1"):
            out.append((tok[:-3], -1))
        else:
            out.append((tok, 1))
    return reduce(out)


def inv3(m: np.ndarray) -> np.ndarray:
    """Inverse of a 3x3 matrix via the adjugate (exact for unimodular integer input)."""
    m = np.asarray(m, dtype=float)
    adj = np.array([
        [m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1], m[0, 2] * m[2, 1] - m[0, 1] * m[2, 2], m[0, 1] * m[1, 2] - m[0, 2] * m[1, 1]],
        [m[1, 2] * m[2, 0] - m[1, 0] * m[2, 2], m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0], m[0, 2] * m[1, 0] - m[0, 0] * m[1, 2]],
        [m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0], m[0, 1] * m[2, 0] - m[0, 0] * m[2, 1], m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]],
    ])
    det = m[0, 0] * adj[0, 0] + m[0, 1] * adj[1, 0] + m[0, 2] * adj[2, 0]
    return adj / det


class Evaluator:
    """Evaluates words against a symbol -> matrix table, caching inverses."""

    def __init__(self, mats: dict):
        self.mats = {k: np.asarray(v, dtype=float) for k, v in mats.items()}
        self._inv = {}

    def letter(self, a) -> np.ndarray:
        s, e = a
        if e == 1:
            return self.mats[s]
        if s not in self._inv:
            self._inv[s] = inv3(self.mats[s])
        return self._inv[s]

    def __call__(self, word: Word) -> np.ndarray:
        out = np.eye(3)
        for a in word:
            out = out @ self.letter(a)
        return out


def evaluate(word: Word, mats: dict) -> np.ndarray:
    return Evaluator(mats)(word)


def reduced_words(symbols, max_len: int) -> Iterator[Word]:
    """All nonempty reduced words of length <= max_len, shortlex order."""
    letters = [(s, 1) for s in symbols] + [(s, -1) for s in symbols]
    layer = [()]
    for _ in range(max_len):
        nxt = []
        for w in layer:
            for a in letters:
                if w and w[-1][0] == a[0] and w[-1][1] == -a[1]:
                    continue
                nxt.append(w + (a,))
        yield from nxt
        layer = nxt


def trace_table(mats: dict, max_len: int) -> dict:
    """Trace of every reduced word up to max_len, built incrementally."""
    ev = Evaluator(mats)
    letters = [(s, 1) for s in mats] + [(s, -1) for s in mats]
    out = {}
    layer = [((), np.eye(3))]
    for _ in range(max_len):
        nxt = []
        for w, m in layer:
            for a in letters:
                if w and w[-1][0] == a[0] and w[-1][1] == -a[1]:
                    continue
                mm = m @ ev.letter(a)
                out[w + (a,)] = float(np.trace(mm))
                nxt.append((w + (a,), mm))
        layer = nxt
    return out
