"""Clopen subsets of the path space as per-vertex index sets at a level.

A clopen set is a finite union of cylinders, stored as the set of canonical
path indices it contains at each vertex of one level.  Refining to a deeper
level replaces every index by the contiguous block of its extensions, so the
same point set has many representations; equality and the Boolean operations
refine both operands to a common level first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .diagram import BratteliDiagram
from .errors import DepthExceeded, IndexOutOfRange


@dataclass(frozen=True, eq=False)
class ClopenSet:
    diagram: BratteliDiagram
    level: int
    parts: tuple[frozenset[int], ...]

    def __post_init__(self):
        counts = self.diagram.path_counts(self.level)
        if len(self.parts) != len(counts):
            raise IndexOutOfRange("one index set per vertex required")
        for v, s in enumerate(self.parts):
            for i in s:
                if not 0 <= i < counts[v]:
                    raise IndexOutOfRange(f"index {i} out of range at vertex {v}")

    # -- constructors --------------------------------------------------------

    @staticmethod
    def from_indices(d: BratteliDiagram, level: int, indices: dict[int, Iterable[int]]) -> "ClopenSet":
        parts = [frozenset() for _ in d.vertices(level)]
        for v, s in indices.items():
            parts[v] = frozenset(int(i) for i in s)
        return ClopenSet(d, level, tuple(parts))

    @staticmethod
    def full(d: BratteliDiagram, level: int) -> "ClopenSet":
        return ClopenSet(d, level, tuple(frozenset(range(h)) for h in d.path_counts(level)))

    @staticmethod
    def empty(d: BratteliDiagram, level: int) -> "ClopenSet":
        return ClopenSet(d, level, tuple(frozenset() for _ in d.vertices(level)))

    @staticmethod
    def cylinder(d: BratteliDiagram, level: int, v: int, i: int) -> "ClopenSet":
        if not 0 <= i < d.path_count(level, v):
            raise IndexOutOfRange(f"no path {i} at vertex {v}, level {level}")
        parts = [frozenset() for _ in d.vertices(level)]
        parts[v] = frozenset([i])
        return ClopenSet(d, level, tuple(parts))

    # -- basic queries ---------------------------------------------------------

    def size(self) -> int:
        return sum(len(s) for s in self.parts)

    def is_empty(self) -> bool:
        return self.size() == 0

    def is_full(self) -> bool:
        return all(len(s) == h for s, h in zip(self.parts, self.diagram.path_counts(self.level)))

    def __contains__(self, vi: tuple[int, int]) -> bool:
        v, i = vi
        return i in self.parts[v]

    # -- refinement and Boolean algebra ---------------------------------------

    def refine(self, m: int) -> "ClopenSet":
        """The same point set written at level ``m >= level``."""
        if m < self.level:
            raise DepthExceeded(f"cannot refine from level {self.level} down to {m}")
        d = self.diagram
        parts = self.parts
        for n in range(self.level, m):
            counts = d.path_counts(n)
            mat = d.incidence_matrix(n)
            nxt = []
            for u in d.vertices(n + 1):
                row = mat[u]
                got = set()
                off = 0
                for v in d.vertices(n):
                    f = row[v]
                    if f:
                        for i in parts[v]:
                            base = off + i * f
                            got.update(range(base, base + f))
                        off += counts[v] * f
                nxt.append(frozenset(got))
            parts = tuple(nxt)
        return ClopenSet(d, m, parts)

    def _common(self, other: "ClopenSet") -> tuple["ClopenSet", "ClopenSet"]:
        if other.diagram is not self.diagram:
            raise IndexOutOfRange("operands live on different diagrams")
        m = max(self.level, other.level)
        return self.refine(m), other.refine(m)

    def union(self, other: "ClopenSet") -> "ClopenSet":
        a, b = self._common(other)
        return ClopenSet(a.diagram, a.level, tuple(x | y for x, y in zip(a.parts, b.parts)))

    def intersect(self, other: "ClopenSet") -> "ClopenSet":
        a, b = self._common(other)
        return ClopenSet(a.diagram, a.level, tuple(x & y for x, y in zip(a.parts, b.parts)))

    def minus(self, other: "ClopenSet") -> "ClopenSet":
        a, b = self._common(other)
        return ClopenSet(a.diagram, a.level, tuple(x - y for x, y in zip(a.parts, b.parts)))

    def complement(self) -> "ClopenSet":
        return ClopenSet.full(self.diagram, self.level).minus(self)

    __or__ = union
    __and__ = intersect
    __sub__ = minus
    __invert__ = complement

    def __eq__(self, other) -> bool:
        if not isinstance(other, ClopenSet):
            return NotImplemented
        a, b = self._common(other)
        return a.parts == b.parts

    __hash__ = None  # equality is up to refinement; hashing would need a normal form

    def __le__(self, other: "ClopenSet") -> bool:
        a, b = self._common(other)
        return all(x <= y for x, y in zip(a.parts, b.parts))

    # -- invariance -------------------------------------------------------------

    def is_gn_invariant(self, n: int) -> bool:
        """True iff membership depends only on the level-``n`` terminal vertex
        and the suffix, i.e. the set survives every permutation of level-``n``
        prefixes that fixes terminal vertices."""
        if n > self.level:
            raise DepthExceeded(f"set at level {self.level} cannot be tested against level {n}")
        d = self.diagram
        m = self.level
        prefix_counts = d.path_counts(n)
        seen: dict[tuple, int] = {}
        for v in d.vertices(m):
            for i in self.parts[v]:
                path = d.path_of_index(m, v, i)
                u = path[n - 1][0] if n > 0 else 0
                key = (u, path[n:])
                seen[key] = seen.get(key, 0) + 1
        return all(c == prefix_counts[u] for (u, _), c in seen.items())


def boolean(op: str, a: ClopenSet, b: Optional[ClopenSet] = None) -> ClopenSet:
    """Dispatch by name; ``complement`` ignores ``b``."""
    if op == "complement":
        return a.complement()
    if b is None:
        raise IndexOutOfRange(f"operation {op!r} needs two operands")
    if op == "union":
        return a.union(b)
    if op == "intersect":
        return a.intersect(b)
    if op == "minus":
        return a.minus(b)
    raise IndexOutOfRange(f"unknown Boolean operation {op!r}")


@dataclass(frozen=True)
class HalvingWitness:
    level: int
    first: ClopenSet
    second: ClopenSet
    involution: "GroupElement"  # noqa: F821 - imported lazily to avoid a cycle


def can_halve(a: ClopenSet, search_bound: int) -> Optional[HalvingWitness]:
    """Split ``a`` into two group-equivalent halves if some level allows it.

    Searches for the first level ``m`` within the bound at which every vertex
    holds an even number of paths of ``a``; the halves pair the sorted indices
    of each vertex (low block against high block) and the returned involution
    swaps them, so its support stays inside ``a``.  ``None`` only means no
    qualifying level was found up to the bound.
    """
    from .group import GroupElement

    if a.is_empty():
        raise IndexOutOfRange("cannot halve the empty set")
    d = a.diagram
    depth = d.depth
    cap = search_bound if depth is None else min(search_bound, depth)
    for m in range(a.level, cap + 1):
        b = a.refine(m)
        if any(len(s) % 2 for s in b.parts):
            continue
        first, second, perms = [], [], []
        for v in d.vertices(m):
            idx = sorted(b.parts[v])
            t = len(idx) // 2
            lo, hi = idx[:t], idx[t:]
            first.append(frozenset(lo))
            second.append(frozenset(hi))
            perm = list(range(d.path_count(m, v)))
            for x, y in zip(lo, hi):
                perm[x], perm[y] = y, x
            perms.append(tuple(perm))
        return HalvingWitness(
            level=m,
            first=ClopenSet(d, m, tuple(first)),
            second=ClopenSet(d, m, tuple(second)),
            involution=GroupElement(d, m, tuple(perms)),
        )
    return None
