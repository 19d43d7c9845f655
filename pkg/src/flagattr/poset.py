"""Finite posets, upper sets and the distributive lattice they form.

Elements are arbitrary hashable labels kept in a fixed order; the order
relation is a boolean matrix ``leq[i, j] == (elements[i] <= elements[j])``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, Sequence

import numpy as np

from .errors import CycleDetected, TooLarge

MAX_UPPER_SET_ELEMENTS = 24

POSET_JSON_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["elements", "leq", "upper_sets", "covers"],
    "additionalProperties": False,
    "properties": {
        "elements": {"type": "array", "items": {"type": "string"}},
        "leq": {"type": "array", "items": {"type": "array", "items": {"type": "boolean"}}},
        "upper_sets": {"type": "array", "items": {"type": "array", "items": {"type": "string"}}},
        "covers": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
        },
    },
}


def format_label(x: Hashable) -> str:
    """Printable label: permutations become one-line strings, sets become braces."""
    if isinstance(x, tuple) and all(isinstance(i, (int, np.integer)) for i in x):
        sep = "" if all(0 <= i < 10 for i in x) else ","
        return sep.join(str(i) for i in x)
    if isinstance(x, frozenset):
        return "{" + ",".join(sorted(format_label(y) for y in x)) + "}"
    if isinstance(x, float):
        return f"{x:g}"
    return str(x)


def _closure(m: np.ndarray) -> np.ndarray:
    m = m.copy()
    np.fill_diagonal(m, True)
    for k in range(m.shape[0]):
        m |= np.outer(m[:, k], m[k, :])
    return m


@dataclass(frozen=True, eq=False)
class FinitePoset:
    elements: tuple
    leq: np.ndarray
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        leq = np.asarray(self.leq, dtype=bool)
        n = len(self.elements)
        if leq.shape != (n, n):
            raise ValueError(f"relation table has shape {leq.shape}, expected {(n, n)}")
        if len(set(self.elements)) != n:
            raise ValueError("duplicate elements")
        if not np.all(np.diag(leq)):
            raise ValueError("relation is not reflexive")
        if np.any(leq & leq.T & ~np.eye(n, dtype=bool)):
            raise CycleDetected("relation is not antisymmetric")
        if not np.array_equal(_closure(leq), leq):
            raise ValueError("relation is not transitive")
        leq = leq.copy()
        leq.setflags(write=False)
        object.__setattr__(self, "leq", leq)
        object.__setattr__(self, "_index", {x: i for i, x in enumerate(self.elements)})

    def __len__(self) -> int:
        return len(self.elements)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinitePoset) or set(self.elements) != set(other.elements):
            return False
        return self.pairs() == other.pairs()

    __hash__ = None

    def index(self, x) -> int:
        return self._index[x]

    def le(self, x, y) -> bool:
        return bool(self.leq[self._index[x], self._index[y]])

    def pairs(self) -> set[tuple]:
        """All ordered pairs (x, y) with x <= y, reflexive ones included."""
        ii, jj = np.nonzero(self.leq)
        return {(self.elements[i], self.elements[j]) for i, j in zip(ii, jj)}

    def covers(self) -> list[tuple]:
        """Transitive reduction: pairs x < y with nothing strictly between."""
        strict = self.leq & ~np.eye(len(self), dtype=bool)
        s = strict.astype(np.int64)
        between = (s @ s) > 0
        cov = strict & ~between
        return [(self.elements[i], self.elements[j]) for i, j in zip(*np.nonzero(cov))]

    def ranks(self) -> list[int]:
        """Length of the longest chain from a minimal element up to each element."""
        strict = self.leq & ~np.eye(len(self), dtype=bool)
        order = sorted(range(len(self)), key=lambda i: int(strict[:, i].sum()))
        rank = [0] * len(self)
        for j in order:
            below = np.flatnonzero(strict[:, j])
            rank[j] = 1 + max((rank[i] for i in below), default=-1)
        return rank

    def dual(self) -> "FinitePoset":
        return FinitePoset(self.elements, self.leq.T)

    def is_upper_set(self, members: Iterable) -> bool:
        mask = np.zeros(len(self), dtype=bool)
        for x in members:
            mask[self._index[x]] = True
        return not np.any(self.leq[mask] & ~mask[None, :])

    def is_lower_set(self, members: Iterable) -> bool:
        return self.dual().is_upper_set(members)

    def upper_closure(self, members: Iterable) -> frozenset:
        idx = [self._index[x] for x in members]
        mask = self.leq[idx].any(axis=0) if idx else np.zeros(len(self), dtype=bool)
        return frozenset(self.elements[i] for i in np.flatnonzero(mask))


def make_poset(elements: Sequence[Hashable], pairs: Iterable[tuple]) -> FinitePoset:
    """Reflexive-transitive closure of *pairs*; raises CycleDetected on a cycle."""
    elements = tuple(elements)
    index = {x: i for i, x in enumerate(elements)}
    m = np.zeros((len(elements), len(elements)), dtype=bool)
    for a, b in pairs:
        m[index[a], index[b]] = True
    m = _closure(m)
    if np.any(m & m.T & ~np.eye(len(elements), dtype=bool)):
        raise CycleDetected("input relation contains a cycle")
    return FinitePoset(elements, m)


def chain(elements: Sequence[Hashable]) -> FinitePoset:
    """Total order in the given (ascending) order."""
    elements = tuple(elements)
    return make_poset(elements, zip(elements, elements[1:]))


def enumerate_upper_sets(p: FinitePoset, max_elements: int = MAX_UPPER_SET_ELEMENTS) -> list[frozenset]:
    """All upper sets of *p*, empty and full set included.

    Backtracking over a linear extension taken from the top down: an element
    may join only if all of its upper covers already did, so every upper set
    is produced exactly once.
    """
    n = len(p)
    if n > max_elements:
        raise TooLarge(f"poset has {n} elements; enumeration is capped at {max_elements}")
    ranks = p.ranks()
    order = sorted(range(n), key=lambda i: (-ranks[i], i))
    upper_covers = {i: [] for i in range(n)}
    for a, b in p.covers():
        upper_covers[p.index(a)].append(p.index(b))

    out: list[frozenset] = []
    chosen = [False] * n

    def backtrack(k: int) -> None:
        if k == n:
            out.append(frozenset(p.elements[i] for i in range(n) if chosen[i]))
            return
        i = order[k]
        backtrack(k + 1)
        if all(chosen[j] for j in upper_covers[i]):
            chosen[i] = True
            backtrack(k + 1)
            chosen[i] = False

    backtrack(0)
    out.sort(key=lambda s: (len(s), sorted(p.index(x) for x in s)))
    return out


@dataclass(frozen=True, eq=False)
class AttractorLattice:
    """Upper sets of a poset under union (join) and intersection (meet)."""

    poset: FinitePoset
    nodes: tuple[frozenset, ...]

    @classmethod
    def of(cls, p: FinitePoset) -> "AttractorLattice":
        return cls(p, tuple(enumerate_upper_sets(p)))

    def __len__(self) -> int:
        return len(self.nodes)

    def join(self, a: frozenset, b: frozenset) -> frozenset:
        return a | b

    def meet(self, a: frozenset, b: frozenset) -> frozenset:
        return a & b

    def is_closed(self) -> bool:
        nodes = set(self.nodes)
        if frozenset() not in nodes or frozenset(self.poset.elements) not in nodes:
            return False
        return all((a | b) in nodes and (a & b) in nodes for a in self.nodes for b in self.nodes)

    def is_distributive(self) -> bool:
        ns = self.nodes
        return all(
            self.meet(x, self.join(y, z)) == self.join(self.meet(x, y), self.meet(x, z))
            for x in ns for y in ns for z in ns
        )

    def as_poset(self) -> FinitePoset:
        """The lattice ordered by inclusion, nodes labelled by their member sets."""
        labels = [format_label(s) for s in self.nodes]
        m = np.array([[a <= b for b in self.nodes] for a in self.nodes], dtype=bool)
        return FinitePoset(tuple(labels), m)


def to_json_dict(obj: FinitePoset | AttractorLattice) -> dict:
    if isinstance(obj, AttractorLattice):
        p = obj.as_poset()
        uppers = [[format_label(x) for x in obj.poset.elements if x in s] for s in obj.nodes]
    else:
        p = obj
        uppers = [[format_label(x) for x in p.elements if x in s]
                  for s in enumerate_upper_sets(p)] if len(p) <= MAX_UPPER_SET_ELEMENTS else []
    return {
        "elements": [format_label(x) for x in p.elements],
        "leq": p.leq.tolist(),
        "upper_sets": uppers,
        "covers": [[format_label(a), format_label(b)] for a, b in sorted(
            p.covers(), key=lambda c: (p.index(c[0]), p.index(c[1])))],
    }


def poset_from_json(data: dict | str) -> FinitePoset:
    """Rebuild a poset (with string labels) from the JSON form."""
    if isinstance(data, str):
        data = json.loads(data)
    return FinitePoset(tuple(data["elements"]), np.array(data["leq"], dtype=bool).reshape(
        len(data["elements"]), len(data["elements"])))


def _dot_id(label: str) -> str:
    return '"' + label.replace('"', '\\"') + '"'


def hasse_export(obj: FinitePoset | AttractorLattice, fmt: str = "dot") -> str:
    """Hasse diagram as DOT (cover edges, grouped by rank) or JSON text."""
    if fmt == "json":
        return json.dumps(to_json_dict(obj), indent=2)
    if fmt != "dot":
        raise ValueError(f"unknown format {fmt!r}")
    p = obj.as_poset() if isinstance(obj, AttractorLattice) else obj
    labels = [format_label(x) for x in p.elements]
    ranks = p.ranks()
    lines = ["digraph {", "  rankdir=BT;", "  node [shape=box];"]
    for r in sorted(set(ranks)):
        members = " ".join(_dot_id(labels[i]) + ";" for i in range(len(p)) if ranks[i] == r)
        lines.append(f"  {{ rank=same; {members} }}")
    for a, b in sorted(p.covers(), key=lambda c: (p.index(c[0]), p.index(c[1]))):
        lines.append(f"  {_dot_id(format_label(a))} -> {_dot_id(format_label(b))};")
    lines.append("}")
    return "\n".join(lines) + "\n"
