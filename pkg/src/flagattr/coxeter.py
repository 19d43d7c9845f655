"""Symmetric group combinatorics in one-line notation.

A permutation of ``{1..n}`` is a tuple ``w`` with ``w[i-1] = w(i)``.  Products
compose as maps, ``(u*w)(i) = u(w(i))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import factorial, prod

from .errors import InvalidSignature, SizeMismatch
from .poset import FinitePoset

import numpy as np

Permutation = tuple[int, ...]
# a Permutation increasing on every block of a DimensionSignature
CosetRep = tuple[int, ...]


def validate_permutation(w) -> Permutation:
    w = tuple(int(i) for i in w)
    if sorted(w) != list(range(1, len(w) + 1)):
        raise ValueError(f"{w} is not a permutation of 1..{len(w)}")
    return w


def identity(n: int) -> Permutation:
    return tuple(range(1, n + 1))


def compose(u: Permutation, w: Permutation) -> Permutation:
    if len(u) != len(w):
        raise SizeMismatch("permutations of different sizes")
    return tuple(u[w[i] - 1] for i in range(len(w)))


def inverse(w: Permutation) -> Permutation:
    inv = [0] * len(w)
    for i, wi in enumerate(w, start=1):
        inv[wi - 1] = i
    return tuple(inv)


def transposition(n: int, i: int, j: int) -> Permutation:
    w = list(range(1, n + 1))
    w[i - 1], w[j - 1] = w[j - 1], w[i - 1]
    return tuple(w)


def length(w: Permutation) -> int:
    """Inversion count."""
    return sum(1 for i in range(len(w)) for j in range(i + 1, len(w)) if w[i] > w[j])


def _dominance(w: Permutation) -> np.ndarray:
    # r[i, j] = #{k <= i : w(k) >= j}, for 1 <= i, j <= n
    n = len(w)
    hits = np.zeros((n, n), dtype=np.int64)
    for k, wk in enumerate(w):
        hits[k, :wk] = 1
    return np.cumsum(hits, axis=0)


def bruhat_leq(u: Permutation, w: Permutation) -> bool:
    """Bruhat order by the rank (tableau) criterion."""
    if len(u) != len(w):
        raise SizeMismatch(f"cannot compare permutations of sizes {len(u)} and {len(w)}")
    return bool(np.all(_dominance(u) <= _dominance(w)))


def longest_element(n: int) -> Permutation:
    if n < 1:
        raise ValueError("n must be positive")
    return tuple(range(n, 0, -1))


@dataclass(frozen=True)
class DimensionSignature:
    """Flag type ``0 < d_1 < ... < d_k < n``; the empty tuple is the trivial flag."""

    dims: tuple[int, ...]
    n: int

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if self.n < 1:
            raise InvalidSignature("ambient dimension must be positive")
        bounds = (0,) + dims + (self.n,)
        if any(a >= b for a, b in zip(bounds, bounds[1:])):
            raise InvalidSignature(f"dims {dims} must be strictly increasing inside (0, {self.n})")

    @classmethod
    def full(cls, n: int) -> "DimensionSignature":
        return cls(tuple(range(1, n)), n)

    @property
    def top(self) -> int:
        """Dimension of the largest subspace in the flag (frame width)."""
        return self.dims[-1] if self.dims else 0

    @property
    def blocks(self) -> list[range]:
        """0-based position ranges of the blocks, the last one ending at n."""
        bounds = (0,) + self.dims + (self.n,)
        return [range(a, b) for a, b in zip(bounds, bounds[1:])]

    @property
    def block_sizes(self) -> list[int]:
        return [len(b) for b in self.blocks]

    @property
    def manifold_dim(self) -> int:
        """Complex dimension of the flag manifold."""
        sizes = self.block_sizes
        return sum(a * b for i, a in enumerate(sizes) for b in sizes[i + 1:])

    def is_full(self) -> bool:
        return self.dims == tuple(range(1, self.n))


def is_coset_rep(w: Permutation, sig: DimensionSignature) -> bool:
    return all(all(w[i] < w[i + 1] for i in list(b)[:-1]) for b in sig.blocks)


def coset_rep_of(w: Permutation, sig: DimensionSignature) -> CosetRep:
    """Sort *w* within each block: the minimal element of ``w W_M``."""
    out: list[int] = []
    for b in sig.blocks:
        out.extend(sorted(w[i] for i in b))
    return tuple(out)


def rep_from_levels(levels: list[frozenset], sig: DimensionSignature) -> CosetRep:
    """Coset representative whose first ``d_i`` values form the ``i``-th nested set."""
    out: list[int] = []
    prev: frozenset = frozenset()
    for s in list(levels) + [frozenset(range(1, sig.n + 1))]:
        out.extend(sorted(s - prev))
        prev = s
    return tuple(out)


@lru_cache(maxsize=None)
def minimal_coset_reps(sig: DimensionSignature) -> tuple[CosetRep, ...]:
    """All minimal-length representatives of ``S_n / W_M``, sorted by (length, one-line)."""
    reps: list[CosetRep] = []

    def fill(remaining: frozenset, k: int, acc: tuple) -> None:
        if k == len(sig.blocks):
            reps.append(acc)
            return
        for chosen in combinations(sorted(remaining), sig.block_sizes[k]):
            fill(remaining - set(chosen), k + 1, acc + chosen)

    fill(frozenset(range(1, sig.n + 1)), 0, ())
    expected = factorial(sig.n) // prod(factorial(s) for s in sig.block_sizes)
    assert len(reps) == expected
    return tuple(sorted(reps, key=lambda w: (length(w), w)))


@lru_cache(maxsize=None)
def coset_poset(sig: DimensionSignature) -> FinitePoset:
    """Bruhat order restricted to the minimal coset representatives."""
    reps = minimal_coset_reps(sig)
    doms = [_dominance(w) for w in reps]
    m = np.array([[bool(np.all(a <= b)) for b in doms] for a in doms], dtype=bool)
    return FinitePoset(reps, m)
