"""Cactus group J_n as words in the segment-reversal generators s_{p,q}."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class CactusError(ValueError):
    """Malformed generator, word or arity mismatch."""


@dataclass(frozen=True, order=True)
class CactusGenerator:
    p: int
    q: int
    n: int

    def __post_init__(self):
        if not (1 <= self.p < self.q <= self.n):
            raise CactusError(f"need 1 <= p < q <= n, got p={self.p} q={self.q} n={self.n}")

    def __str__(self):
        return f"s_{{{self.p},{self.q}}}"


@dataclass(frozen=True)
class BlockSwap:
    """Exchange of the adjacent segments [start, mid] and [mid+1, end]."""

    start: int
    mid: int
    end: int

    def __post_init__(self):
        if not (1 <= self.start <= self.mid < self.end):
            raise CactusError(f"bad block swap {self.start},{self.mid},{self.end}")

    @property
    def left(self) -> tuple[int, int]:
        return (self.start, self.mid)

    @property
    def right(self) -> tuple[int, int]:
        return (self.mid + 1, self.end)

    def apply_to_order(self, order: Sequence) -> list:
        a, b, c = self.start - 1, self.mid, self.end
        seq = list(order)
        return seq[:a] + seq[b:c] + seq[a:b] + seq[c:]


@dataclass(frozen=True)
class Permutation:
    """Arrangement of factors: ``images[i-1]`` is the original index now at position i."""

    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise CactusError(f"not a permutation: {self.images}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @property
    def n(self) -> int:
        return len(self.images)

    def is_identity(self) -> bool:
        return self.images == tuple(range(1, self.n + 1))

    def __call__(self, i: int) -> int:
        return self.images[i - 1]


@dataclass(frozen=True)
class CactusWord:
    """A word in J_n; ``gens[-1]`` acts first."""

    n: int
    gens: tuple[CactusGenerator, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gens", tuple(self.gens))
        if self.n < 1:
            raise CactusError("arity must be positive")
        for g in self.gens:
            if g.n != self.n:
                raise CactusError(f"generator {g} has arity {g.n}, word has {self.n}")

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Sequence[int]]) -> "CactusWord":
        return cls(n, tuple(CactusGenerator(int(p), int(q), n) for p, q in pairs))

    def pairs(self) -> list[list[int]]:
        return [[g.p, g.q] for g in self.gens]

    def __mul__(self, other: "CactusWord") -> "CactusWord":
        if other.n != self.n:
            raise CactusError("cannot compose words of different arity")
        return CactusWord(self.n, self.gens + other.gens)

    def __len__(self):
        return len(self.gens)

    def __iter__(self) -> Iterator[CactusGenerator]:
        return iter(self.gens)

    def inverse(self) -> "CactusWord":
        return CactusWord(self.n, tuple(reversed(self.gens)))

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "word": self.pairs()})

    @classmethod
    def from_json(cls, text: str | dict) -> "CactusWord":
        data = json.loads(text) if isinstance(text, str) else text
        return cls.from_pairs(data["n"], data["word"])

    def __str__(self):
        return " ".join(str(g) for g in self.gens) or "e"


def gen(p: int, q: int, n: int) -> CactusGenerator:
    return CactusGenerator(p, q, n)


def word(n: int, *pairs: Sequence[int]) -> CactusWord:
    return CactusWord.from_pairs(n, pairs)


def all_generators(n: int) -> list[CactusGenerator]:
    return [CactusGenerator(p, q, n) for p in range(1, n) for q in range(p + 1, n + 1)]


def reverse_segment(order: Sequence, p: int, q: int) -> list:
    seq = list(order)
    seq[p - 1:q] = seq[p - 1:q][::-1]
    return seq


def project_to_symmetric(w: CactusWord) -> Permutation:
    order = list(range(1, w.n + 1))
    for g in reversed(w.gens):
        order = reverse_segment(order, g.p, g.q)
    return Permutation(tuple(order))


def is_pure(w: CactusWord) -> bool:
    return project_to_symmetric(w).is_identity()


def relation_instances(n: int) -> list[tuple[CactusWord, CactusWord]]:
    """Every instance of the three defining relation families of J_n.

    The nesting family skips ``(p2, q2) == (p1, q1)``, which is implied by
    the involution relation.
    """
    if n < 2:
        raise CactusError("relations need n >= 2")
    gens = all_generators(n)
    out = []
    for g in gens:
        out.append((CactusWord(n, (g, g)), CactusWord(n)))
    for g1 in gens:
        for g2 in gens:
            if g1.q < g2.p:
                out.append((CactusWord(n, (g1, g2)), CactusWord(n, (g2, g1))))
    for g1 in gens:
        for g2 in gens:
            if g1.p <= g2.p < g2.q <= g1.q and (g1.p, g1.q) != (g2.p, g2.q):
                image = CactusGenerator(g1.p + g1.q - g2.q, g1.p + g1.q - g2.p, n)
                out.append((CactusWord(n, (g1, g2, g1)), CactusWord(n, (image,))))
    return out


def decompose_generator(g: CactusGenerator) -> list[BlockSwap]:
    """Unroll s_{p,q} = swap([p,q-1],{q}) . s_{p,q-1} into block swaps.

    The returned list is in word order: the last entry acts first.
    """
    return [BlockSwap(g.p, m - 1, m) for m in range(g.q, g.p, -1)]


def block_swap_word(k: int, l: int, m: int, n: int) -> CactusWord:
    """s_{[k,l,m]} = s_{k,m} s_{k,l} s_{l+1,m}, dropping trivial factors."""
    if not (1 <= k <= l < m <= n):
        raise CactusError(f"need k <= l < m, got {k},{l},{m}")
    gens = [CactusGenerator(k, m, n)]
    if k < l:
        gens.append(CactusGenerator(k, l, n))
    if l + 1 < m:
        gens.append(CactusGenerator(l + 1, m, n))
    return CactusWord(n, tuple(gens))


def word_block_swaps(w: CactusWord) -> list[BlockSwap]:
    """All block swaps of a word in the order they act (first acting first)."""
    swaps = []
    for g in reversed(w.gens):
        swaps.extend(reversed(decompose_generator(g)))
    return swaps


def pure_loop_n3() -> CactusWord:
    """The generator of PJ_3 traced 0 -> 1 -> infinity -> 0 around RP^1."""
    return word(3, (1, 3), (2, 3), (1, 2), (2, 3))
