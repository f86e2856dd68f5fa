"""Elements of the full group of a Bratteli diagram.

An element at level ``n`` is one permutation of the canonical path indices
per level-``n`` vertex; it acts on an infinite path by rewriting the length-n
prefix and keeping the tail.  Embedding to a deeper level is block placement
on index ranges, so the inductive-limit group structure is plain index
arithmetic.  Binary operations embed both operands to the larger level first;
elements are stored at their defining level.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .clopen import ClopenSet
from .diagram import BratteliDiagram, product_matrix, telescope
from .errors import (
    ArgumentOutOfRange,
    BundlesTooSmall,
    DepthExceeded,
    IndexOutOfRange,
    NoPairableEdges,
)

Perm = tuple[int, ...]


def _check_perm(perm: Sequence[int], size: int, where: str) -> Perm:
    p = tuple(int(x) for x in perm)
    if len(p) != size or sorted(p) != list(range(size)):
        raise IndexOutOfRange(f"{where}: not a permutation of {size} path indices")
    return p


@dataclass(frozen=True, eq=False)
class GroupElement:
    diagram: BratteliDiagram
    level: int
    perms: tuple[Perm, ...]

    def __post_init__(self):
        counts = self.diagram.path_counts(self.level)
        if len(self.perms) != len(counts):
            raise IndexOutOfRange("one permutation per vertex required")
        object.__setattr__(
            self,
            "perms",
            tuple(_check_perm(p, h, f"vertex {v} at level {self.level}")
                  for v, (p, h) in enumerate(zip(self.perms, counts))),
        )

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def identity(d: BratteliDiagram, level: int) -> "GroupElement":
        return GroupElement(d, level, tuple(tuple(range(h)) for h in d.path_counts(level)))

    @staticmethod
    def from_vertex_perms(d: BratteliDiagram, level: int, perms: dict[int, Sequence[int]]) -> "GroupElement":
        """Missing vertices act as the identity."""
        base = [list(range(h)) for h in d.path_counts(level)]
        for v, p in perms.items():
            base[int(v)] = list(p)
        return GroupElement(d, level, tuple(tuple(p) for p in base))

    # -- the group operations ---------------------------------------------------

    def is_identity(self) -> bool:
        return all(p[i] == i for p in self.perms for i in range(len(p)))

    def apply(self, v: int, i: int) -> int:
        return self.perms[v][i]

    def embed(self, m: int) -> "GroupElement":
        """Image at level ``m`` under the block-diagonal inclusion."""
        if m < self.level:
            raise DepthExceeded(f"cannot embed from level {self.level} down to {m}")
        d = self.diagram
        perms = self.perms
        for n in range(self.level, m):
            counts = d.path_counts(n)
            mat = d.incidence_matrix(n)
            nxt = []
            for w in d.vertices(n + 1):
                row = mat[w]
                perm = list(range(d.path_count(n + 1, w)))
                off = 0
                for v in d.vertices(n):
                    f = row[v]
                    if f:
                        pv = perms[v]
                        for p in range(counts[v]):
                            tp = pv[p]
                            if tp != p:
                                src, dst = off + p * f, off + tp * f
                                for e in range(f):
                                    perm[src + e] = dst + e
                        off += counts[v] * f
                nxt.append(tuple(perm))
            perms = tuple(nxt)
        return GroupElement(d, m, perms)

    def _common(self, other: "GroupElement") -> tuple["GroupElement", "GroupElement"]:
        if other.diagram is not self.diagram:
            raise ArgumentOutOfRange("elements live on different diagrams")
        m = max(self.level, other.level)
        return self.embed(m), other.embed(m)

    def compose(self, other: "GroupElement") -> "GroupElement":
        """``(self * other)(x) = self(other(x))``."""
        a, b = self._common(other)
        return GroupElement(
            a.diagram, a.level,
            tuple(tuple(p[q[i]] for i in range(len(q))) for p, q in zip(a.perms, b.perms)),
        )

    __mul__ = compose

    def inverse(self) -> "GroupElement":
        out = []
        for p in self.perms:
            inv = [0] * len(p)
            for i, t in enumerate(p):
                inv[t] = i
            out.append(tuple(inv))
        return GroupElement(self.diagram, self.level, tuple(out))

    def conjugate_by(self, q: "GroupElement") -> "GroupElement":
        return q * self * q.inverse()

    def act_on(self, a: ClopenSet) -> ClopenSet:
        """Image of a clopen set, after moving both to a common level."""
        m = max(self.level, a.level)
        g, b = self.embed(m), a.refine(m)
        return ClopenSet(
            g.diagram, m,
            tuple(frozenset(p[i] for i in s) for p, s in zip(g.perms, b.parts)),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        a, b = self._common(other)
        return a.perms == b.perms

    __hash__ = None  # equality is up to embedding

    # -- supports and cycles -----------------------------------------------------

    def fix(self) -> ClopenSet:
        """The fixed-point set: the union of cylinders with a fixed index."""
        return ClopenSet(
            self.diagram, self.level,
            tuple(frozenset(i for i, t in enumerate(p) if t == i) for p in self.perms),
        )

    def support(self) -> ClopenSet:
        return ClopenSet(
            self.diagram, self.level,
            tuple(frozenset(i for i, t in enumerate(p) if t != i) for p in self.perms),
        )

    def cycle_data(self) -> "CycleData":
        lengths, periods = [], []
        for p in self.perms:
            seen = [False] * len(p)
            per = [0] * len(p)
            lens = []
            for i in range(len(p)):
                if seen[i]:
                    continue
                cyc = [i]
                seen[i] = True
                j = p[i]
                while j != i:
                    seen[j] = True
                    cyc.append(j)
                    j = p[j]
                lens.append(len(cyc))
                for x in cyc:
                    per[x] = len(cyc)
            lengths.append(tuple(sorted(lens)))
            periods.append(tuple(per))
        return CycleData(tuple(lengths), tuple(periods))

    def consists_of_even_cycles(self) -> bool:
        return self.cycle_data().is_even()

    def __repr__(self) -> str:
        return f"GroupElement(level={self.level}, perms={self.perms!r})"


@dataclass(frozen=True)
class CycleData:
    """Per-vertex cycle structure: sorted length multiset plus per-index periods."""

    lengths: tuple[tuple[int, ...], ...]
    periods: tuple[tuple[int, ...], ...]

    def period(self, v: int, i: int) -> int:
        return self.periods[v][i]

    def is_even(self) -> bool:
        return all(l == 1 or l % 2 == 0 for vertex in self.lengths for l in vertex)

    def nontrivial_lengths(self) -> set[int]:
        return {l for vertex in self.lengths for l in vertex if l > 1}


# ---------------------------------------------------------------------------
# Conjugacy at a fixed level
# ---------------------------------------------------------------------------


def conjugate_at_level(g: GroupElement, h: GroupElement, m: int) -> Optional[GroupElement]:
    """A witness ``q`` with ``q g q^-1 == h`` inside the level-``m`` group.

    Two elements are conjugate there iff the per-vertex cycle types agree
    after embedding; the witness aligns the cycles.  ``None`` means not
    conjugate at this level (which says nothing about deeper levels).
    """
    if m < max(g.level, h.level):
        raise DepthExceeded("level below the operands")
    a, b = g.embed(m), h.embed(m)
    qs = []
    for pa, pb in zip(a.perms, b.perms):
        ca = _cycles_sorted(pa)
        cb = _cycles_sorted(pb)
        if [len(c) for c in ca] != [len(c) for c in cb]:
            return None
        q = [0] * len(pa)
        for cyc_a, cyc_b in zip(ca, cb):
            for x, y in zip(cyc_a, cyc_b):
                q[x] = y
        qs.append(tuple(q))
    return GroupElement(a.diagram, m, tuple(qs))


def _cycles_sorted(p: Perm) -> list[list[int]]:
    seen = [False] * len(p)
    out = []
    for i in range(len(p)):
        if seen[i]:
            continue
        cyc = [i]
        seen[i] = True
        j = p[i]
        while j != i:
            seen[j] = True
            cyc.append(j)
            j = p[j]
        out.append(cyc)
    out.sort(key=lambda c: (len(c), c[0]))
    return out


# ---------------------------------------------------------------------------
# The commuting involutions h_n
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HnResult:
    element: GroupElement
    fixed_fractions: dict[tuple[int, int], Fraction]
    max_fixed_fraction: Fraction


def make_hn(a: ClopenSet, n: int) -> HnResult:
    """The level-``(n+1)`` involution that swaps paired edges below ``a``.

    Within each edge bundle ``(v, w)`` reachable from ``a`` the first
    ``floor(f/2)`` edges are paired with the next ``floor(f/2)`` (at most one
    leftover); the involution swaps the ``(n+1)``-st edge of every path whose
    level-``n`` prefix lies in ``a``.  It therefore commutes with everything
    in the level-``n`` subgroup supported on ``a``.  The report carries the
    fixed fraction ``(f mod 2)/f`` per bundle.
    """
    if a.level > n:
        raise DepthExceeded(f"set at level {a.level} is deeper than level {n}")
    a = a.refine(n)
    d = a.diagram
    mat = d.incidence_matrix(n)
    counts = d.path_counts(n)
    fractions: dict[tuple[int, int], Fraction] = {}
    for v in d.vertices(n):
        if not a.parts[v]:
            continue
        for w in d.vertices(n + 1):
            f = mat[w][v]
            if f == 1:
                raise NoPairableEdges(
                    f"bundle ({v},{w}) between levels {n} and {n + 1} has a single edge; telescope first"
                )
            if f:
                fractions[(v, w)] = Fraction(f % 2, f)
    perms = []
    for w in d.vertices(n + 1):
        row = mat[w]
        perm = list(range(d.path_count(n + 1, w)))
        off = 0
        for v in d.vertices(n):
            f = row[v]
            if f:
                half = f // 2
                for p in a.parts[v]:
                    base = off + p * f
                    for e in range(half):
                        perm[base + e] = base + e + half
                        perm[base + e + half] = base + e
                off += counts[v] * f
        perms.append(tuple(perm))
    element = GroupElement(d, n + 1, tuple(perms))
    max_frac = max(fractions.values(), default=Fraction(0))
    return HnResult(element, fractions, max_frac)


# ---------------------------------------------------------------------------
# The two-cycle pairs behind the s-families
# ---------------------------------------------------------------------------


def claim1_pair(p: int) -> tuple[Perm, Perm, int]:
    """Two ``p``-cycles on ``m`` points whose quotient has even cycles and full support.

    ``m`` is ``2p`` for even ``p`` (disjoint cycles) and ``2p - 2`` for odd
    ``p``, where the overlapping pair multiplies out to two cycles of the even
    length ``p - 1``.
    """
    if p < 2:
        raise ArgumentOutOfRange("cycle length must be at least 2")
    if p % 2 == 0:
        m = 2 * p
        h0 = _cycle_perm(m, list(range(p)))
        h1 = _cycle_perm(m, list(range(p, 2 * p)))
    else:
        m = 2 * p - 2
        h0 = _cycle_perm(m, list(range(p)))
        h1 = _cycle_perm(m, list(range(2 * p - 3, p - 3, -1)))
    return h0, h1, m


def _cycle_perm(m: int, symbols: Sequence[int]) -> Perm:
    perm = list(range(m))
    for x, y in zip(symbols, symbols[1:]):
        perm[x] = y
    perm[symbols[-1]] = symbols[0]
    return tuple(perm)


def _compose_perm(p: Perm, q: Perm) -> Perm:
    return tuple(p[q[i]] for i in range(len(q)))


def _invert_perm(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, t in enumerate(p):
        inv[t] = i
    return tuple(inv)


def _tiled_pair(p: int, f: int) -> tuple[Perm, Perm]:
    """Tile the claim-1 pair across a bundle of ``f`` edges; the remainder stays fixed."""
    h0, h1, m = claim1_pair(p)
    t = f // m
    g0, g1 = list(range(f)), list(range(f))
    for i in range(t):
        base = i * m
        for e in range(m):
            g0[base + e] = base + h0[e]
            g1[base + e] = base + h1[e]
    return tuple(g0), tuple(g1)


# ---------------------------------------------------------------------------
# s-families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SiFamily:
    """Result of :func:`si_family`.

    ``diagram`` is the working diagram (a telescope of the input when the
    bundles had to grow), ``base`` is the seed element moved to level 1 of it,
    ``elements`` holds the ``2^r`` family members at level ``r + 1``, and
    ``generators[j]`` the commuting pair acting between levels ``j+1`` and
    ``j+2``.  ``max_defect`` is the worst measured support defect over all
    pairs and supplied measures (``None`` when no measures were given).
    """

    diagram: BratteliDiagram
    cuts: Optional[tuple[int, ...]]
    base: GroupElement
    elements: tuple[GroupElement, ...]
    generators: tuple[tuple[GroupElement, GroupElement], ...]
    required: Optional[Fraction]
    max_defect: Optional[Fraction]


def _min_positive_entry(mat) -> Optional[int]:
    vals = [x for row in mat for x in row if x > 0]
    return min(vals) if vals else None


def si_family(
    d: BratteliDiagram,
    s: GroupElement,
    r: int,
    eps: Fraction,
    measures: Sequence = (),
    search_bound: int = 64,
) -> SiFamily:
    """Build ``2^r`` elements conjugate to ``s`` whose pairwise quotients have
    even cycles and supports filling ``supp(s)`` up to measure ``eps``.

    The diagram is telescoped (first cut at ``s``'s level, so ``s`` becomes a
    level-1 element) until every used bundle exceeds ``2p/eps`` edges and fits
    at least one claim-1 block, for every nontrivial point period ``p`` of
    ``s``.  Each level then contributes a commuting pair of period-``p``
    rotations of its edge bundles, applied only below the moving prefixes.
    """
    if s.diagram is not d:
        raise ArgumentOutOfRange("element does not belong to the diagram")
    eps = Fraction(eps)
    if eps <= 0:
        raise ArgumentOutOfRange("eps must be positive")
    if r == 0:
        return SiFamily(d, None, s, (s,), (), None, None)
    periods = s.cycle_data().nontrivial_lengths()
    if not periods:
        elem = s
        return SiFamily(d, None, s, tuple([elem] * (2 ** r)), (), None, Fraction(0))

    required = max(Fraction(2 * p, 1) / eps for p in periods)
    min_block = max(claim1_pair(p)[2] for p in periods)

    def bundles_ok(mat) -> bool:
        mp = _min_positive_entry(mat)
        return mp is not None and mp > required and mp >= min_block

    level0 = max(s.level, 1)
    s = s.embed(level0)

    use_original = s.level == 1 and all(
        bundles_ok(d.incidence_matrix(k)) for k in range(1, r + 1)
    )
    if use_original:
        work, cuts, s1 = d, None, s
    else:
        cuts = [0, s.level]
        best = None
        for _ in range(r):
            lo = cuts[-1]
            found = None
            for m in range(lo + 1, lo + 1 + search_bound):
                if d.depth is not None and m > d.depth:
                    break
                mat = product_matrix(d, lo, m)
                mp = _min_positive_entry(mat)
                best = mp if best is None else max(best, mp)
                if bundles_ok(mat):
                    found = m
                    break
            if found is None:
                raise BundlesTooSmall(required, best)
            cuts.append(found)
        work = telescope(d, cuts)
        s1 = GroupElement(work, 1, s.perms)
        cuts = tuple(cuts)

    embedded = [None, s1]  # embedded[k] = s at level k
    for k in range(2, r + 2):
        embedded.append(embedded[k - 1].embed(k))

    generators = []
    for j in range(1, r + 1):
        sd = embedded[j].cycle_data()
        mat = work.incidence_matrix(j)
        counts = work.path_counts(j)
        perm0s, perm1s = [], []
        for w in work.vertices(j + 1):
            row = mat[w]
            size = work.path_count(j + 1, w)
            perm0 = list(range(size))
            perm1 = list(range(size))
            off = 0
            for v in work.vertices(j):
                f = row[v]
                if f:
                    tiles: dict[int, tuple[Perm, Perm]] = {}
                    for p_idx in range(counts[v]):
                        per = sd.period(v, p_idx)
                        if per >= 2:
                            if per not in tiles:
                                tiles[per] = _tiled_pair(per, f)
                            g0e, g1e = tiles[per]
                            base = off + p_idx * f
                            for e in range(f):
                                perm0[base + e] = base + g0e[e]
                                perm1[base + e] = base + g1e[e]
                    off += counts[v] * f
            perm0s.append(tuple(perm0))
            perm1s.append(tuple(perm1))
        generators.append(
            (GroupElement(work, j + 1, tuple(perm0s)), GroupElement(work, j + 1, tuple(perm1s)))
        )

    top = r + 1
    elements = []
    for bits in itertools.product((0, 1), repeat=r):
        elem = embedded[top]
        for j, b in enumerate(bits):
            elem = elem * generators[j][b].embed(top)
        elements.append(elem)

    max_defect = None
    if measures:
        mus = [mu if work is d else mu.on_telescope(work) for mu in measures]
        supp = embedded[top].support()
        max_defect = Fraction(0)
        for x, y in itertools.combinations(elements, 2):
            gap = supp.minus((x * y.inverse()).support())
            for mu in mus:
                max_defect = max(max_defect, Fraction(mu.measure(gap)))
    return SiFamily(work, cuts, s1, tuple(elements), tuple(generators), required, max_defect)


# ---------------------------------------------------------------------------
# The uniform metric
# ---------------------------------------------------------------------------


def disagreement_set(g: GroupElement, h: GroupElement) -> ClopenSet:
    a, b = g._common(h)
    return ClopenSet(
        a.diagram, a.level,
        tuple(frozenset(i for i in range(len(p)) if p[i] != q[i]) for p, q in zip(a.perms, b.perms)),
    )


def metric_d(g: GroupElement, h: GroupElement, measures: Sequence) -> Fraction:
    """Largest measure of the disagreement set over the supplied measures."""
    if not measures:
        raise ArgumentOutOfRange("the uniform metric needs at least one measure")
    diff = disagreement_set(g, h)
    return max(Fraction(mu.measure(diff)) for mu in measures)
