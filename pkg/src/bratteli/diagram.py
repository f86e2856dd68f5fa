"""Bratteli diagrams with exact integer incidence data.

A diagram is a graded multigraph: one root vertex at level 0, finitely many
vertices per level, and an incidence matrix ``F_n`` whose entry ``F_n[w][v]``
counts the edges between vertex ``v`` of level ``n`` and vertex ``w`` of
level ``n+1``.  Unbounded diagrams are described by a *tail rule* that
produces the incidence matrices on demand; every operation that would need
levels past an explicit depth raises :class:`~bratteli.errors.DepthExceeded`
instead of truncating silently.

Finite paths from the root are indexed canonically per terminal vertex:
inside ``M_n^(v)`` the key of a path is

    (source vertex of the last edge, index of the length-(n-1) prefix,
     edge index within the bundle)

compared lexicographically.  This makes the index blocks of the standard
decomposition of ``M_n^(v)`` into copies of the ``M_{n-1}^(w)`` contiguous,
so group embeddings and cylinder refinement are pure index arithmetic.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    DepthExceeded,
    EmptyRootLevel,
    IndexOutOfRange,
    InvalidCuts,
    ShapeMismatch,
    ZeroRowOrColumn,
)

Matrix = tuple[tuple[int, ...], ...]

# A finite path is a tuple of (target_vertex, edge_index) pairs, root first;
# entry k describes the edge from the previous vertex into level k+1.
Path = tuple[tuple[int, int], ...]


def as_matrix(rows: Sequence[Sequence[int]]) -> Matrix:
    """Freeze ``rows`` into a rectangular tuple matrix of nonnegative ints."""
    mat = tuple(tuple(int(x) for x in row) for row in rows)
    if not mat:
        raise ShapeMismatch("matrix has no rows")
    width = len(mat[0])
    for row in mat:
        if len(row) != width:
            raise ShapeMismatch("matrix rows have unequal lengths")
        for x in row:
            if x < 0:
                raise ShapeMismatch("matrix entries must be nonnegative")
    return mat


def ones_matrix(rows: int, cols: int) -> Matrix:
    return tuple((1,) * cols for _ in range(rows))


def identity_matrix(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    """Exact product ``a @ b`` of integer matrices."""
    if len(a[0]) != len(b):
        raise ShapeMismatch(f"cannot multiply {len(a)}x{len(a[0])} by {len(b)}x{len(b[0])}")
    bt = tuple(zip(*b))
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def mat_vec(a: Matrix, v: Sequence[int]) -> tuple[int, ...]:
    if len(a[0]) != len(v):
        raise ShapeMismatch("matrix/vector shape mismatch")
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


# ---------------------------------------------------------------------------
# Tail rules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExplicitTail:
    """No rule: the diagram ends at its explicit depth."""

    kind = "explicit"


@dataclass(frozen=True)
class StationaryTail:
    """Repeat one square matrix forever past the explicit prefix."""

    matrix: Matrix
    kind = "stationary"

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if len(m) != len(m[0]):
            raise ShapeMismatch("stationary tail matrix must be square")
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class OdometerTail:
    """One vertex per level, ``base`` parallel edges."""

    base: int
    kind = "odometer"

    def __post_init__(self):
        if self.base < 2:
            raise ShapeMismatch("odometer base must be >= 2 (path space must be a Cantor set)")


@dataclass(frozen=True)
class BRTail:
    """Level ``n`` has ``n+1`` vertices, consecutive levels fully joined by single edges."""

    kind = "br"


@dataclass(frozen=True)
class ProductTail:
    """Telescope of ``base``: level ``k`` of the new diagram is level ``cut(k)``
    of the base, edges are base paths between consecutive cut levels.

    ``cuts`` is the finite cut list; past its end the cuts continue with the
    final gap, so telescoping a rule-generated diagram stays rule-generated.
    """

    base: "BratteliDiagram"
    cuts: tuple[int, ...]
    gap: int
    kind = "product"

    def cut(self, k: int) -> int:
        if k < len(self.cuts):
            return self.cuts[k]
        return self.cuts[-1] + (k - len(self.cuts) + 1) * self.gap


Tail = ExplicitTail | StationaryTail | OdometerTail | BRTail | ProductTail


# ---------------------------------------------------------------------------
# The diagram
# ---------------------------------------------------------------------------


class BratteliDiagram:
    """Validated Bratteli diagram; immutable after construction.

    ``vertex_counts`` and ``incidence`` give the explicit prefix (``n+1``
    counts and ``n`` matrices); ``tail`` extends it.  Levels are realized
    lazily under a lock, so shared diagrams are safe for concurrent reads.
    """

    def __init__(
        self,
        vertex_counts: Sequence[int],
        incidence: Sequence[Sequence[Sequence[int]]],
        tail: Tail = ExplicitTail(),
    ):
        counts = [int(c) for c in vertex_counts]
        if not counts or counts[0] != 1:
            raise EmptyRootLevel("level 0 must consist of exactly one vertex")
        if any(c < 1 for c in counts):
            raise ShapeMismatch("every level needs at least one vertex")
        mats = [as_matrix(m) for m in incidence]
        if len(mats) != len(counts) - 1:
            raise ShapeMismatch(
                f"{len(counts)} vertex counts require {len(counts)-1} incidence matrices, got {len(mats)}"
            )
        for n, m in enumerate(mats):
            self._check_shape(n, m, counts[n], counts[n + 1])
        if isinstance(tail, StationaryTail) and len(tail.matrix) != counts[-1]:
            raise ShapeMismatch("stationary tail matrix does not fit the last explicit level")
        self._counts = counts
        self._mats = mats
        self._prefix_len = len(counts)
        self.tail = tail
        self._lock = threading.Lock()
        self._path_counts: list[tuple[int, ...]] = [(1,)]

    @staticmethod
    def _check_shape(n: int, m: Matrix, cols: int, rows: int) -> None:
        if len(m) != rows or len(m[0]) != cols:
            raise ShapeMismatch(
                f"F_{n} must be {rows}x{cols}, got {len(m)}x{len(m[0])}"
            )
        for v in range(cols):
            if all(m[w][v] == 0 for w in range(rows)):
                raise ZeroRowOrColumn(f"F_{n} has an all-zero column at vertex {v}")
        for w in range(rows):
            if all(x == 0 for x in m[w]):
                raise ZeroRowOrColumn(f"F_{n} has an all-zero row at vertex {w}")

    # -- level realization --------------------------------------------------

    @property
    def depth(self) -> Optional[int]:
        """Deepest representable level, or ``None`` for rule-generated tails."""
        if isinstance(self.tail, ExplicitTail):
            return len(self._counts) - 1
        return None

    @property
    def tail_start(self) -> int:
        """First level whose outgoing incidence matrix comes from the tail rule."""
        return self._prefix_len - 1

    def _next_level(self, n: int) -> tuple[int, Matrix]:
        """Produce ``(|V_{n+1}|, F_n)`` from the tail rule; ``n`` is the last realized level."""
        tail = self.tail
        if isinstance(tail, StationaryTail):
            return len(tail.matrix), tail.matrix
        if isinstance(tail, OdometerTail):
            return 1, ((tail.base,),)
        if isinstance(tail, BRTail):
            return n + 2, ones_matrix(n + 2, n + 1)
        if isinstance(tail, ProductTail):
            lo, hi = tail.cut(n), tail.cut(n + 1)
            mat = product_matrix(tail.base, lo, hi)
            return len(mat), mat
        raise DepthExceeded(f"level {n + 1} exceeds explicit depth {len(self._counts) - 1}")

    def _ensure(self, n: int) -> None:
        if n < len(self._counts):
            return
        with self._lock:
            while n >= len(self._counts):
                k = len(self._counts) - 1
                count, mat = self._next_level(k)
                self._check_shape(k, mat, self._counts[-1], count)
                self._mats.append(mat)
                self._counts.append(count)

    def vertex_count(self, n: int) -> int:
        if n < 0:
            raise IndexOutOfRange("negative level")
        self._ensure(n)
        return self._counts[n]

    def vertices(self, n: int) -> range:
        return range(self.vertex_count(n))

    def incidence_matrix(self, n: int) -> Matrix:
        """``F_n``, connecting level ``n`` to level ``n+1``."""
        self._ensure(n + 1)
        return self._mats[n]

    def bundle_size(self, n: int, w: int, v: int) -> int:
        """Number of edges between vertex ``v`` of level ``n`` and ``w`` of level ``n+1``."""
        return self.incidence_matrix(n)[w][v]

    # -- path counting -------------------------------------------------------

    def path_counts(self, n: int) -> tuple[int, ...]:
        """``h^(n)``: per-vertex counts of root paths, the iterated incidence product."""
        while len(self._path_counts) <= n:
            k = len(self._path_counts) - 1
            self._path_counts.append(mat_vec(self.incidence_matrix(k), self._path_counts[-1]))
        return self._path_counts[n]

    def path_count(self, n: int, v: int) -> int:
        return self.path_counts(n)[v]

    def path_table(self, n: int) -> "PathTable":
        return PathTable(self, n, self.path_counts(n))

    # -- canonical indexing ---------------------------------------------------

    def path_of_index(self, n: int, v: int, i: int) -> Path:
        """Decode the ``i``-th canonical path into vertex ``v`` at level ``n``."""
        if not 0 <= v < self.vertex_count(n):
            raise IndexOutOfRange(f"vertex {v} out of range at level {n}")
        if not 0 <= i < self.path_count(n, v):
            raise IndexOutOfRange(f"path index {i} out of range for vertex {v} at level {n}")
        edges: list[tuple[int, int]] = []
        while n > 0:
            f_row = self.incidence_matrix(n - 1)[v]
            counts = self.path_counts(n - 1)
            for w, h_w in enumerate(counts):
                block = h_w * f_row[w]
                if i < block:
                    p, e = divmod(i, f_row[w])
                    edges.append((v, e))
                    v, i = w, p
                    break
                i -= block
            n -= 1
        edges.reverse()
        return tuple(edges)

    def index_of_path(self, path: Path) -> tuple[int, int]:
        """Inverse of :meth:`path_of_index`; returns ``(terminal vertex, index)``."""
        v, i = 0, 0
        for n, (u, e) in enumerate(path):
            if not 0 <= u < self.vertex_count(n + 1):
                raise IndexOutOfRange(f"vertex {u} out of range at level {n + 1}")
            f_row = self.incidence_matrix(n)[u]
            if not 0 <= e < f_row[v]:
                raise IndexOutOfRange(f"edge {e} out of range in bundle ({v},{u}) at level {n}")
            counts = self.path_counts(n)
            offset = sum(counts[w] * f_row[w] for w in range(v))
            i = offset + i * f_row[v] + e
            v = u
        return v, i

    # -- misc -----------------------------------------------------------------

    def spec(self, depth: Optional[int] = None) -> dict:
        """Plain-data description (used by the file format and round-trips)."""
        if depth is None:
            depth = len(self._counts) - 1
        self._ensure(depth)
        d = {
            "levels": list(self._counts[: depth + 1]),
            "incidence": [[list(r) for r in m] for m in self._mats[:depth]],
        }
        t = self.tail
        if isinstance(t, ExplicitTail):
            d["tail"] = "explicit"
        elif isinstance(t, StationaryTail):
            d["tail"] = {"stationary": [list(r) for r in t.matrix]}
        elif isinstance(t, OdometerTail):
            d["tail"] = {"odometer": t.base}
        elif isinstance(t, BRTail):
            d["tail"] = "br"
        else:
            d["tail"] = "explicit"  # telescopes serialize as their realized prefix
        return d

    def __repr__(self) -> str:
        kind = getattr(self.tail, "kind", "explicit")
        return f"BratteliDiagram(levels~{self._counts[:4]}..., tail={kind})"


@dataclass(frozen=True)
class PathTable:
    """Canonical bijection between ``{0,...,h_v-1}`` and root paths at one level."""

    diagram: BratteliDiagram
    level: int
    counts: tuple[int, ...]

    def path_at(self, v: int, i: int) -> Path:
        return self.diagram.path_of_index(self.level, v, i)

    def index_of(self, path: Path) -> tuple[int, int]:
        if len(path) != self.level:
            raise IndexOutOfRange(f"path has length {len(path)}, table is at level {self.level}")
        return self.diagram.index_of_path(path)


# ---------------------------------------------------------------------------
# Constructors for the built-in families
# ---------------------------------------------------------------------------


def build_diagram(vertex_counts, incidence, tail: Tail = ExplicitTail()) -> BratteliDiagram:
    """Validate and build; the constructor already checks every invariant."""
    return BratteliDiagram(vertex_counts, incidence, tail)


def odometer(base: int) -> BratteliDiagram:
    return BratteliDiagram([1], [], OdometerTail(base))


def br_diagram() -> BratteliDiagram:
    """The diagram with ``n+1`` vertices at level ``n``, fully joined by single edges."""
    return BratteliDiagram([1], [], BRTail())


def stationary(matrix, root=None) -> BratteliDiagram:
    """Stationary diagram repeating ``matrix``; ``root`` is ``F_0`` as a column (default all ones)."""
    mat = as_matrix(matrix)
    k = len(mat)
    if root is None:
        root = [1] * k
    f0 = tuple((int(x),) for x in root)
    return BratteliDiagram([1, k], [f0], StationaryTail(mat))


# ---------------------------------------------------------------------------
# Products, telescoping, simplicity
# ---------------------------------------------------------------------------


def product_matrix(d: BratteliDiagram, lo: int, hi: int) -> Matrix:
    """``F_{hi-1} ... F_lo``; counts paths between levels ``lo`` and ``hi``."""
    if hi < lo:
        raise InvalidCuts(f"bad level range [{lo},{hi})")
    if hi == lo:
        return identity_matrix(d.vertex_count(lo))
    acc = d.incidence_matrix(lo)
    for n in range(lo + 1, hi):
        acc = mat_mul(d.incidence_matrix(n), acc)
    return acc


def telescope(d: BratteliDiagram, cuts: Sequence[int]) -> BratteliDiagram:
    """Collapse ``d`` to the given cut levels.

    ``cuts`` must be strictly increasing and start at 0.  With an explicit
    tail the result is explicit; otherwise the final gap repeats forever.
    """
    cuts = [int(c) for c in cuts]
    if len(cuts) < 2 or cuts[0] != 0 or any(a >= b for a, b in zip(cuts, cuts[1:])):
        raise InvalidCuts(f"cuts must be strictly increasing from 0, got {cuts}")
    if isinstance(d.tail, ExplicitTail):
        if cuts[-1] > d.depth:
            raise InvalidCuts(f"cut {cuts[-1]} exceeds diagram depth {d.depth}")
        counts = [d.vertex_count(m) for m in cuts]
        mats = [product_matrix(d, a, b) for a, b in zip(cuts, cuts[1:])]
        return BratteliDiagram(counts, mats, ExplicitTail())
    return BratteliDiagram([1], [], ProductTail(d, tuple(cuts), cuts[-1] - cuts[-2]))


@dataclass(frozen=True)
class Simplicity:
    kind: str  # "simple" | "not-simple" | "unknown"
    witnesses: tuple[tuple[int, int], ...] = ()
    bound: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.kind == "simple"


def is_primitive(matrix: Matrix) -> bool:
    """Wielandt test: a nonnegative square matrix is primitive iff its
    ``(k-1)^2 + 1`` power is strictly positive."""
    k = len(matrix)
    e = (k - 1) ** 2 + 1
    acc = identity_matrix(k)
    base = matrix
    while e:
        if e & 1:
            acc = mat_mul(acc, base)
        e >>= 1
        if e:
            base = mat_mul(base, base)
    return all(x > 0 for row in acc for x in row)


def is_simple(d: BratteliDiagram, search_bound: int) -> Simplicity:
    """Bounded positivity scan for the connectivity criterion.

    Simple: every start level up to the bound reaches a level with a strictly
    positive path-count product.  Not simple is only reported when a
    stationary tail is provably stuck (non-primitive matrix); otherwise the
    verdict past the bound stays unknown.
    """
    depth = d.depth
    cap = search_bound if depth is None else min(search_bound, depth)
    witnesses = []
    for n in range(cap):
        acc = None
        hit = None
        for m in range(n + 1, cap + 1):
            acc = d.incidence_matrix(m - 1) if acc is None else mat_mul(d.incidence_matrix(m - 1), acc)
            if all(x > 0 for row in acc for x in row):
                hit = m
                break
        if hit is None:
            tail = d.tail
            if isinstance(tail, StationaryTail) and not is_primitive(tail.matrix):
                return Simplicity("not-simple", reason=f"stationary tail matrix is not primitive (stuck from level {n})")
            return Simplicity("unknown", bound=search_bound)
        witnesses.append((n, hit))
    if not witnesses:
        return Simplicity("unknown", bound=search_bound)
    return Simplicity("simple", witnesses=tuple(witnesses))


def find_even_telescoping(d: BratteliDiagram, search_bound: int) -> Optional[tuple[int, ...]]:
    """Greedy cut search making every telescoped entry even and at least 2.

    Returns the cut levels found within the bound, or ``None``.  On a
    rule-generated diagram :func:`telescope` repeats the final gap, so the
    caller should recheck deeper levels if it matters.
    """
    depth = d.depth
    cap = search_bound if depth is None else min(search_bound, depth)
    cuts = [0]
    while True:
        lo = cuts[-1]
        found = None
        acc = None
        for m in range(lo + 1, cap + 1):
            acc = d.incidence_matrix(m - 1) if acc is None else mat_mul(d.incidence_matrix(m - 1), acc)
            if all(x >= 2 and x % 2 == 0 for row in acc for x in row):
                found = m
                break
        if found is None:
            break
        cuts.append(found)
    if len(cuts) < 2:
        return None
    return tuple(cuts)
