"""Invariant probability measures on the path space.

A measure assigns one cylinder weight per vertex and level; invariance under
the full group is exactly the statement that all cylinders at a vertex weigh
the same and that the weights satisfy the downward consistency equations

    q_v^(n) = sum_w  F_n[w][v] * q_w^(n+1),

with total mass ``sum_v h_v^(n) q_v^(n) = 1`` at every level.  Measures are
certificates: they are validated level by level, never derived from a claim
of ergodicity.  Built-in measures exist for the odometer, the
factorial-weight diagram of the full family (``1/(n+1)!``), stationary
diagrams with a primitive matrix (Perron weights, exact when the Perron root
is rational, certified intervals otherwise) and telescopes of these.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .clopen import ClopenSet
from .diagram import (
    BratteliDiagram,
    BRTail,
    ExplicitTail,
    OdometerTail,
    ProductTail,
    StationaryTail,
    is_primitive,
    mat_mul,
    identity_matrix,
)
from .errors import (
    ConsistencyViolation,
    DepthExceeded,
    NotNormalized,
    NotPrimitive,
    UnsupportedTail,
)
from .values import RatInterval, Value, is_exact, val_eq


class InvariantMeasure:
    """Cylinder weights per level; immutable once constructed, lazily evaluated."""

    def __init__(
        self,
        diagram: BratteliDiagram,
        provider: Callable[[int], Sequence[Value]],
        exact: bool = True,
        kind: str = "custom",
        max_level: Optional[int] = None,
    ):
        self.diagram = diagram
        self._provider = provider
        self.exact = exact
        self.kind = kind
        self.max_level = max_level
        self._cache: dict[int, tuple[Value, ...]] = {}
        self._lock = threading.Lock()

    def weights(self, n: int) -> tuple[Value, ...]:
        if self.max_level is not None and n > self.max_level:
            raise DepthExceeded(f"measure {self.kind!r} only covers levels up to {self.max_level}")
        with self._lock:
            if n not in self._cache:
                w = tuple(self._provider(n))
                if len(w) != self.diagram.vertex_count(n):
                    raise ConsistencyViolation(n, -1, len(w), self.diagram.vertex_count(n))
                self._cache[n] = w
            return self._cache[n]

    def weight(self, n: int, v: int) -> Value:
        return self.weights(n)[v]

    def measure(self, a: ClopenSet) -> Value:
        """Measure of a clopen set: per-vertex count times cylinder weight."""
        w = self.weights(a.level)
        total: Value = Fraction(0)
        for s, q in zip(a.parts, w):
            if s:
                total = total + len(s) * q
        return total

    def validate(self, depth: int) -> "InvariantMeasure":
        """Check consistency and normalization for all levels up to ``depth``."""
        d = self.diagram
        for n in range(depth + 1):
            w = self.weights(n)
            for v, q in enumerate(w):
                if isinstance(q, RatInterval):
                    if q.hi < 0:
                        raise ConsistencyViolation(n, v, q, "nonnegative weight")
                elif q < 0:
                    raise ConsistencyViolation(n, v, q, "nonnegative weight")
            counts = d.path_counts(n)
            mass: Value = Fraction(0)
            for h, q in zip(counts, w):
                mass = mass + h * q
            if not val_eq(mass, Fraction(1)):
                raise NotNormalized(f"level {n} has total mass {mass}")
        for n in range(depth):
            w, wn = self.weights(n), self.weights(n + 1)
            mat = d.incidence_matrix(n)
            for v in d.vertices(n):
                rhs: Value = Fraction(0)
                for u in d.vertices(n + 1):
                    if mat[u][v]:
                        rhs = rhs + mat[u][v] * wn[u]
                if not val_eq(w[v], rhs):
                    raise ConsistencyViolation(n, v, w[v], rhs)
        return self

    def on_telescope(self, telescoped: BratteliDiagram) -> "InvariantMeasure":
        """The same measure read on a telescope of this measure's diagram."""
        tail = telescoped.tail
        if not isinstance(tail, ProductTail) or tail.base is not self.diagram:
            raise UnsupportedTail("diagram is not a telescope of this measure's diagram")
        return InvariantMeasure(
            telescoped,
            lambda k: self.weights(tail.cut(k)),
            exact=self.exact,
            kind=f"telescope({self.kind})",
            max_level=self.max_level,
        )

    def __repr__(self) -> str:
        return f"InvariantMeasure(kind={self.kind!r}, exact={self.exact})"


def measure_of(mu: InvariantMeasure, a: ClopenSet) -> Value:
    return mu.measure(a)


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------


def validate_certificate(
    d: BratteliDiagram,
    table: Sequence[Sequence[Value]],
    depth: Optional[int] = None,
    tail: str = "explicit",
) -> InvariantMeasure:
    """Accept a finite weight table as a measure iff the equations hold exactly.

    ``table[n][v]`` is the level-``n`` cylinder weight at vertex ``v``.  With
    ``tail="builtin"`` levels past the table delegate to the diagram's
    built-in measure (the seam is part of the validated consistency).
    """
    frozen = tuple(tuple(row) for row in table)
    if depth is None:
        depth = len(frozen) - 1
    if tail == "explicit":
        max_level = len(frozen) - 1

        def provider(n: int) -> Sequence[Value]:
            return frozen[n]

    elif tail == "builtin":
        max_level = None
        base: list[Optional[InvariantMeasure]] = [None]

        def provider(n: int) -> Sequence[Value]:
            if n < len(frozen):
                return frozen[n]
            if base[0] is None:
                base[0] = builtin_measure(d)
            return base[0].weights(n)

    else:
        raise UnsupportedTail(f"unknown measure tail rule {tail!r}")
    exact = all(is_exact(x) for row in frozen for x in row)
    mu = InvariantMeasure(d, provider, exact=exact, kind="certificate", max_level=max_level)
    return mu.validate(depth)


# ---------------------------------------------------------------------------
# Built-in measures
# ---------------------------------------------------------------------------


def builtin_measure(d: BratteliDiagram, interval_digits: int = 40) -> InvariantMeasure:
    """The canonical invariant measure attached to a tail rule.

    Odometer base ``b``: weight ``b^-n``.  Full-family tail: ``1 / (total
    path count)``, i.e. ``1/(n+1)!`` on the pure diagram.  Stationary tail:
    the Perron chain (requires a primitive matrix).  Telescopes inherit the
    base measure at the cut levels.
    """
    tail = d.tail
    if isinstance(tail, ProductTail):
        base = builtin_measure(tail.base, interval_digits)
        return InvariantMeasure(
            d,
            lambda k: base.weights(tail.cut(k)),
            exact=base.exact,
            kind=f"telescope({base.kind})",
        )
    if isinstance(tail, BRTail):
        def provider(n: int) -> Sequence[Value]:
            total = sum(d.path_counts(n))
            return tuple(Fraction(1, total) for _ in d.vertices(n))

        return InvariantMeasure(d, provider, exact=True, kind="br")
    if isinstance(tail, OdometerTail):
        lam: Value = Fraction(tail.base)
        xi: tuple[Value, ...] = (Fraction(1),)
        exact = True
        kind = f"odometer({tail.base})"
    elif isinstance(tail, StationaryTail):
        if not is_primitive(tail.matrix):
            raise NotPrimitive("stationary tail matrix is not primitive")
        lam, xi, exact = _perron_chain(tail.matrix, interval_digits)
        kind = "stationary"
    else:
        raise UnsupportedTail("no built-in measure for an explicit-depth diagram")

    start = d.tail_start
    d.vertex_count(start + 1)  # realize through the seam; validates the tail shape
    if len(xi) != d.vertex_count(start):
        raise UnsupportedTail("tail rule does not fit the explicit prefix")
    # downward pass: u^(n) = F_n^T u^(n+1) below the chain anchor
    down: list[tuple[Value, ...]] = [tuple(xi)]
    for n in range(start - 1, -1, -1):
        mat = d.incidence_matrix(n)
        nxt = down[-1]
        row = tuple(
            sum((mat[u][v] * nxt[u] for u in d.vertices(n + 1)), Fraction(0))
            for v in d.vertices(n)
        )
        down.append(row)
    down.reverse()  # down[n] = unnormalized weights at level n, 0 <= n <= start
    scale = down[0][0]  # forces q^(0) = 1

    inv_lam = (Fraction(1) / lam) if is_exact(lam) else RatInterval.point(1) / lam

    def provider(n: int) -> Sequence[Value]:
        if n <= start:
            return tuple(x / scale for x in down[n])
        factor = inv_lam ** (n - start)
        return tuple(x * factor / scale for x in xi)

    return InvariantMeasure(d, provider, exact=exact, kind=kind)


def _perron_chain(matrix, interval_digits: int):
    """Perron eigendata of the transfer operator ``F^T``.

    Returns ``(lam, xi, exact)``: the spectral radius and a strictly positive
    eigenvector, as exact rationals when the root is rational, otherwise as
    certified rational intervals of width about ``10**-interval_digits``.
    """
    import sympy

    k = len(matrix)
    T = sympy.Matrix(k, k, lambda i, j: int(matrix[j][i]))
    roots = sympy.real_roots(T.charpoly())
    lam_sym = roots[-1]
    if lam_sym.is_Rational:
        lam = Fraction(int(lam_sym.p), int(lam_sym.q))
        null = (T - lam_sym * sympy.eye(k)).nullspace()
        vec = null[0]
        xs = [Fraction(int(sympy.nsimplify(x).p), int(sympy.nsimplify(x).q)) for x in vec]
        if all(x <= 0 for x in xs):
            xs = [-x for x in xs]
        if any(x <= 0 for x in xs):
            raise NotPrimitive("Perron eigenvector is not strictly positive")
        return lam, tuple(xs), True

    # irrational Perron root: isolate it to a rational interval, then evaluate
    # an adjugate column of (T - t I) there; for a primitive matrix its
    # entries all carry one strict sign, which certifies a positive eigenvector.
    t = sympy.Symbol("t")
    adj = (T - t * sympy.eye(k)).adjugate()
    coeffs = [
        [Fraction(int(c.p), int(c.q)) for c in map(sympy.Rational, sympy.Poly(adj[i, 0], t).all_coeffs())]
        for i in range(k)
    ]
    poly = sympy.Poly(T.charpoly().as_expr(), T.charpoly().gen)
    eps = sympy.Rational(1, 10 ** interval_digits)
    for _ in range(8):
        boxes = poly.intervals(eps=eps)
        lo, hi = boxes[-1][0]
        lam_iv = RatInterval(Fraction(int(lo.p), int(lo.q)), Fraction(int(hi.p), int(hi.q)))
        entries = [_horner(cs, lam_iv) for cs in coeffs]
        if all(e.definitely_positive() for e in entries):
            return lam_iv, tuple(entries), False
        if all(e.definitely_negative() for e in entries):
            return lam_iv, tuple(-e for e in entries), False
        eps = eps / 10 ** interval_digits
    raise NotPrimitive("could not certify a positive Perron eigenvector")


def _horner(coeffs: Sequence[Fraction], x: RatInterval) -> RatInterval:
    acc = RatInterval.point(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


# ---------------------------------------------------------------------------
# Finite-depth hull estimate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HullEstimate:
    """Finite-depth images of the level-``N`` simplex corners.

    Candidate ``w`` weights level-``n`` cylinders by (paths from ``v`` to
    ``w``) / (paths to ``w``); each candidate is an exactly consistent
    measure on levels ``0..N``.  ``distances`` holds the pairwise total
    variation at level ``N-1`` (the largest over all shallower levels).
    This is a numeric aid for guessing the number of ergodic measures; it
    proves nothing about the infinite diagram.
    """

    depth: int
    candidates: tuple[InvariantMeasure, ...]
    distances: dict[tuple[int, int], Fraction]
    diameter: Fraction


def ergodic_hull_estimate(d: BratteliDiagram, depth: int) -> HullEstimate:
    n_verts = d.vertex_count(depth)
    counts_top = d.path_counts(depth)
    # acc[n] = path-count matrix between levels n and depth
    acc = identity_matrix(n_verts)
    tables: list[list[tuple[Fraction, ...]]] = [[] for _ in range(n_verts)]
    per_level: list[list[tuple[Fraction, ...]]] = []
    for n in range(depth, -1, -1):
        per_level.append([
            tuple(Fraction(acc[w][v], counts_top[w]) for v in d.vertices(n))
            for w in range(n_verts)
        ])
        if n:
            acc = mat_mul(acc, d.incidence_matrix(n - 1))
    per_level.reverse()
    for w in range(n_verts):
        tables[w] = [per_level[n][w] for n in range(depth + 1)]

    candidates = tuple(
        InvariantMeasure(
            d,
            (lambda table: (lambda n: table[n]))(tables[w]),
            exact=True,
            kind=f"hull-corner({w})",
            max_level=depth,
        )
        for w in range(n_verts)
    )
    distances: dict[tuple[int, int], Fraction] = {}
    level = max(depth - 1, 0)
    h = d.path_counts(level)
    for i, j in itertools.combinations(range(n_verts), 2):
        wi, wj = tables[i][level], tables[j][level]
        distances[(i, j)] = sum(
            (Fraction(hv) * abs(a - b) for hv, a, b in zip(h, wi, wj)), Fraction(0)
        ) / 2
    diameter = max(distances.values(), default=Fraction(0))
    return HullEstimate(depth, candidates, distances, diameter)
