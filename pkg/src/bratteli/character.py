"""Fixed-point characters and their finite verification harnesses.

A character here is determined by validated invariant measures ``mu_i`` and
exponents ``alpha_i`` in ``{0, 1, ..., inf}``:

    chi(g) = prod_i mu_i(Fix(g)) ** alpha_i,

with ``0**0 = 1`` (an exponent 0 term contributes the identity character) and
any infinite exponent collapsing the whole thing to the regular character.
The trace of the commutant projection attached to a clopen set ``A`` is the
same product evaluated at ``X minus A``, so ``chi(g)`` always equals the
trace at ``supp(g)``; the harnesses below exercise the limit statements
behind that identity at finite depth, exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .clopen import ClopenSet
from .diagram import BratteliDiagram
from .errors import (
    ArgumentOutOfRange,
    DepthExceeded,
    NoPairableEdges,
    NotSymmetric,
    ToleranceAmbiguous,
    UnreachableTarget,
)
from .group import GroupElement, HnResult, make_hn
from .measure import InvariantMeasure
from .values import RatInterval, Value, is_exact

INF = math.inf

Alpha = int | float  # a nonnegative int, or INF


@dataclass(frozen=True)
class CharacterSpec:
    """A list of (measure, exponent) factors over one diagram."""

    terms: tuple[tuple[InvariantMeasure, Alpha], ...]

    def __post_init__(self):
        if not self.terms:
            raise ArgumentOutOfRange("a character needs at least one (measure, alpha) term")
        d = self.terms[0][0].diagram
        for mu, alpha in self.terms:
            if mu.diagram is not d:
                raise ArgumentOutOfRange("all measures must live on one diagram")
            if alpha != INF and (not isinstance(alpha, int) or alpha < 0):
                raise ArgumentOutOfRange(f"alpha must be a nonnegative integer or inf, got {alpha!r}")

    @property
    def diagram(self) -> BratteliDiagram:
        return self.terms[0][0].diagram

    @property
    def regular(self) -> bool:
        return any(alpha == INF for _, alpha in self.terms)

    @property
    def exact(self) -> bool:
        return all(mu.exact for mu, alpha in self.terms if alpha not in (0, INF))


def make_character(measures: Sequence[InvariantMeasure], alphas: Sequence[Alpha]) -> CharacterSpec:
    if len(measures) != len(alphas):
        raise ArgumentOutOfRange("measures and exponents must align")
    return CharacterSpec(tuple(zip(measures, alphas)))


def phi(spec: CharacterSpec, t: Sequence[Value]) -> Value:
    """The exponent map ``prod t_i**alpha_i`` on ``(0,1]^k`` (finite exponents only)."""
    if spec.regular:
        raise ArgumentOutOfRange("phi is undefined for the regular character")
    if len(t) != len(spec.terms):
        raise ArgumentOutOfRange("one coordinate per character term required")
    out: Value = Fraction(1)
    for x, (_, alpha) in zip(t, spec.terms):
        if alpha:
            out = out * x ** alpha
    return out


def eval_character(spec: CharacterSpec, g: GroupElement) -> Value:
    if spec.regular:
        return Fraction(1) if g.is_identity() else Fraction(0)
    fix = g.fix()
    out: Value = Fraction(1)
    for mu, alpha in spec.terms:
        if alpha:
            out = out * mu.measure(fix) ** alpha
    return out


def trace_projection(spec: CharacterSpec, a: ClopenSet) -> Value:
    """Trace of the projection onto vectors fixed by everything supported in ``a``."""
    if spec.regular:
        return Fraction(1) if a.is_empty() else Fraction(0)
    rest = a.complement()
    out: Value = Fraction(1)
    for mu, alpha in spec.terms:
        if alpha:
            out = out * mu.measure(rest) ** alpha
    return out


# ---------------------------------------------------------------------------
# Gram matrices, centrality, exact positive semidefiniteness
# ---------------------------------------------------------------------------


def gram_matrix(spec: CharacterSpec, elements: Sequence[GroupElement]) -> list[list[Value]]:
    n = len(elements)
    inverses = [g.inverse() for g in elements]
    m = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            val = eval_character(spec, elements[i] * inverses[j])
            m[i][j] = val
            m[j][i] = val
    return m


def centrality_check(spec: CharacterSpec, elements: Sequence[GroupElement]) -> list[tuple[int, int, Value, Value]]:
    """All pairs where ``chi(gh) != chi(hg)``; empty means central on the sample."""
    bad = []
    for i in range(len(elements)):
        for j in range(i + 1, len(elements)):
            ab = eval_character(spec, elements[i] * elements[j])
            ba = eval_character(spec, elements[j] * elements[i])
            if ab != ba:
                bad.append((i, j, ab, ba))
    return bad


@dataclass(frozen=True)
class PsdResult:
    is_psd: bool
    witness: Optional[tuple[Fraction, ...]] = None  # x with x^T M x < 0

    def __bool__(self) -> bool:
        return self.is_psd


def psd_check(matrix: Sequence[Sequence], tolerance=None) -> PsdResult:
    """Schur-complement recursion; exact over the rationals.

    A symmetric matrix is positive semidefinite iff its first pivot is
    positive and the Schur complement is, or the first row vanishes and the
    minor is.  With exact entries (int/Fraction) there is no tolerance; pass
    floats plus ``tolerance`` for the numeric variant, which refuses to
    guess when a pivot lands inside the tolerance band.
    """
    n = len(matrix)
    exact = all(isinstance(x, (int, Fraction)) for row in matrix for x in row)
    if exact:
        m = [[Fraction(x) for x in row] for row in matrix]
        tol = Fraction(0)
    else:
        if tolerance is None:
            raise ToleranceAmbiguous("numeric matrices require an explicit tolerance")
        m = [[float(x) for x in row] for row in matrix]
        tol = float(tolerance)
    for row in m:
        if len(row) != n:
            raise NotSymmetric("matrix is not square")
    for i in range(n):
        for j in range(i):
            if exact:
                if m[i][j] != m[j][i]:
                    raise NotSymmetric(f"entries ({i},{j}) and ({j},{i}) differ")
            elif abs(m[i][j] - m[j][i]) > tol:
                raise NotSymmetric(f"entries ({i},{j}) and ({j},{i}) differ beyond tolerance")
    witness = _psd_recurse(m, tol, exact)
    if witness is None:
        return PsdResult(True)
    return PsdResult(False, tuple(witness))


def _psd_recurse(m, tol, exact):
    n = len(m)
    if n == 0:
        return None
    a = m[0][0]
    if a < -tol:
        return [Fraction(1) if exact else 1.0] + [Fraction(0) if exact else 0.0] * (n - 1)
    if a <= tol:
        j = next((k for k in range(1, n) if abs(m[0][k]) > tol), None)
        if j is not None:
            if not exact:
                raise ToleranceAmbiguous(f"pivot 0 within tolerance but row entry ({0},{j}) is not")
            # a == 0 with m[0][j] != 0: x = t e_0 + e_j gives 2 t m0j + mjj, pick t for value -1
            t = -(m[j][j] + 1) / (2 * m[0][j])
            x = [Fraction(0)] * n
            x[0], x[j] = t, Fraction(1)
            return x
        sub = [[m[i][k] for k in range(1, n)] for i in range(1, n)]
        w = _psd_recurse(sub, tol, exact)
        if w is None:
            return None
        return [Fraction(0) if exact else 0.0] + w
    # positive pivot: recurse on the Schur complement
    schur = [
        [m[i][k] - m[i][0] * m[0][k] / a for k in range(1, n)]
        for i in range(1, n)
    ]
    w = _psd_recurse(schur, tol, exact)
    if w is None:
        return None
    x0 = -sum(m[0][k + 1] * w[k] for k in range(n - 1)) / a
    return [x0] + w


# ---------------------------------------------------------------------------
# Suffix-cylinder sets and the elements fixing exactly them
# ---------------------------------------------------------------------------


def realize_invariant_set(
    spec: CharacterSpec, n: int, targets: Sequence[Fraction]
) -> tuple[ClopenSet, dict[tuple[int, int], frozenset[int]]]:
    """A level-``(n+1)`` union of whole edge-suffix cylinders hitting the targets.

    Sets of the form {x : the (n+1)-st edge lies in a chosen subset of its
    bundle} are invariant under the level-``n`` subgroup.  Edges are added
    greedily against the first measure; if the resulting measures do not
    equal the targets exactly for every term, the best achievable vector is
    reported instead of silently approximating.
    """
    d = spec.diagram
    mus = [mu for mu, _ in spec.terms]
    if not all(mu.exact for mu in mus):
        raise ArgumentOutOfRange("exact targets need exact measures")
    targets = [Fraction(t) for t in targets]
    if len(targets) != len(mus):
        raise ArgumentOutOfRange("one target fraction per character term required")
    counts = d.path_counts(n)
    mat = d.incidence_matrix(n)
    weights = [mu.weights(n + 1) for mu in mus]
    chosen: dict[tuple[int, int], set[int]] = {}
    totals = [Fraction(0)] * len(mus)
    for v in d.vertices(n):
        for w in d.vertices(n + 1):
            f = mat[w][v]
            if not f:
                continue
            unit = [counts[v] * weights[i][w] for i in range(len(mus))]
            take = 0
            while take < f and totals[0] + unit[0] <= targets[0]:
                totals = [t + u for t, u in zip(totals, unit)]
                take += 1
            if take:
                chosen[(v, w)] = set(range(take))
    if totals != targets:
        raise UnreachableTarget(targets, totals)
    parts = [set() for _ in d.vertices(n + 1)]
    for w in d.vertices(n + 1):
        off = 0
        for v in d.vertices(n):
            f = mat[w][v]
            if f:
                t = chosen.get((v, w), set())
                for p in range(counts[v]):
                    base = off + p * f
                    parts[w].update(base + e for e in t)
                off += counts[v] * f
    b = ClopenSet(d, n + 1, tuple(frozenset(s) for s in parts))
    return b, {k: frozenset(v) for k, v in chosen.items()}


def element_fixing_suffix_set(
    d: BratteliDiagram, n: int, chosen: dict[tuple[int, int], frozenset[int]]
) -> GroupElement:
    """An element preserving every level-``n`` cylinder whose fixed-point set is
    exactly the suffix-cylinder union described by ``chosen``.

    Unchosen edges are rotated inside their bundle.  A bundle with a single
    unchosen edge cannot be deranged in place, so that edge is pushed one
    level deeper and its continuations are rotated there instead.
    """
    counts = d.path_counts(n)
    mat = d.incidence_matrix(n)
    shallow: list[list[int]] = [list(range(h)) for h in d.path_counts(n + 1)]
    singles: list[tuple[int, int, int]] = []  # (v, w, lone moved edge)
    for w in d.vertices(n + 1):
        off = 0
        for v in d.vertices(n):
            f = mat[w][v]
            if not f:
                continue
            moved = sorted(set(range(f)) - chosen.get((v, w), frozenset()))
            if len(moved) == 1:
                singles.append((v, w, moved[0]))
            elif len(moved) > 1:
                for p in range(counts[v]):
                    base = off + p * f
                    for a, bdg in zip(moved, moved[1:] + moved[:1]):
                        shallow[w][base + a] = base + bdg
            off += counts[v] * f
    elem = GroupElement(d, n + 1, tuple(tuple(p) for p in shallow))
    if not singles:
        return elem
    # derange the (n+2)-nd edge below each stranded (n+1)-edge
    counts1 = d.path_counts(n + 1)
    mat1 = d.incidence_matrix(n + 1)
    deep: list[list[int]] = [list(range(h)) for h in d.path_counts(n + 2)]
    for v, w, e_star in singles:
        # level-(n+1) indices of paths through (v, ., e_star)
        off = 0
        f = mat[w][v]
        for v2 in d.vertices(n):
            if v2 == v:
                break
            off += counts[v2] * mat[w][v2]
        stranded = [off + p * f + e_star for p in range(counts[v])]
        for u in d.vertices(n + 2):
            f2 = mat1[u][w]
            if not f2:
                continue
            if f2 < 2:
                raise NoPairableEdges(
                    f"bundle ({w},{u}) between levels {n + 1} and {n + 2} too small to fix the target exactly"
                )
            off2 = sum(counts1[w2] * mat1[u][w2] for w2 in range(w))
            for pp in stranded:
                base = off2 + pp * f2
                for e2 in range(f2):
                    deep[u][base + e2] = base + (e2 + 1) % f2
    return elem.embed(n + 2) * GroupElement(d, n + 2, tuple(tuple(p) for p in deep))


# ---------------------------------------------------------------------------
# Harnesses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MultiplicativityRow:
    level: int
    value: Value          # chi(g * h_n)
    target: Value         # chi(g) * prod c_i ** alpha_i
    defect: Value
    set_measures: tuple[Fraction, ...]


def multiplicativity_harness(
    spec: CharacterSpec,
    g: GroupElement,
    targets: Sequence[Fraction],
    levels: Sequence[int],
) -> list[MultiplicativityRow]:
    """Asymptotic multiplicativity made finite: at each level build an
    invariant suffix set ``B_n`` with the target measures, an element ``h_n``
    fixing exactly ``B_n`` while preserving level-``n`` cylinders, and report
    ``chi(g h_n)`` against ``chi(g) * prod c_i**alpha_i``.

    For ``g`` at level <= n the fixed sets intersect exactly, so on product
    diagrams the defect is zero at every step rather than merely vanishing.
    """
    if spec.regular:
        raise ArgumentOutOfRange("the harness compares finite exponents; regular spec given")
    d = spec.diagram
    base = eval_character(spec, g)
    target_val = base * phi(spec, [Fraction(t) for t in targets])
    rows = []
    for n in levels:
        if n < g.level:
            raise ArgumentOutOfRange(f"level {n} is above the element's level {g.level}")
        b, chosen = realize_invariant_set(spec, n, targets)
        hn = element_fixing_suffix_set(d, n, chosen)
        value = eval_character(spec, g * hn)
        defect = abs(value - target_val)
        rows.append(MultiplicativityRow(n, value, target_val, defect,
                                        tuple(Fraction(mu.measure(b)) for mu, _ in spec.terms)))
    return rows


@dataclass(frozen=True)
class ProjectionRow:
    level: int
    value: Value          # chi(h_n)
    trace: Value          # tr(P^A)
    defect: Value
    bound: Value          # propagated per-bundle leftover bound
    max_fixed_fraction: Fraction


def projection_limit_check(
    spec: CharacterSpec, a: ClopenSet, levels: Sequence[int]
) -> list[ProjectionRow]:
    """Compare ``chi(h_n)`` with the projection trace for the paired
    involutions of :func:`~bratteli.group.make_hn`; the defect can only come
    from unpaired leftover edges, and the reported bound propagates that
    per-bundle fraction through the product formula."""
    tr = trace_projection(spec, a)
    rows = []
    for n in levels:
        res: HnResult = make_hn(a.refine(n), n)
        value = eval_character(spec, res.element)
        defect = abs(value - tr)
        if spec.regular:
            bound: Value = Fraction(0)
        else:
            plus: Value = Fraction(1)
            for mu, alpha in spec.terms:
                if alpha:
                    rest = mu.measure(a.complement())
                    slack = mu.measure(a.refine(n)) * res.max_fixed_fraction
                    plus = plus * (rest + slack) ** alpha
            bound = plus - tr
        rows.append(ProjectionRow(n, value, tr, defect, bound, res.max_fixed_fraction))
    return rows
