"""Rational permutations of the unit interval.

``RationalPermutation(n, s)`` is the bijection of ``[0,1)`` translating the
subinterval ``[j/n, (j+1)/n)`` onto ``[s(j)/n, (s(j)+1)/n)``.  Refining the
denominator by a factor ``m`` replicates the permutation across blocks of
``m`` (the periodic embedding ``s'(j) = m*s(j//m) + j%m``), which leaves the
interval map unchanged; two values are equal iff they agree at the least
common denominator.

The same group acts on the fully connected diagram with ``n+1`` vertices at
level ``n``: a level-``n`` path reads as the digit string of an integer
below ``(n+1)!`` in the factorial-quotient basis

    i_n(a_1, ..., a_n) = a_1*(n+1)!/2! + a_2*(n+1)!/3! + ... + a_n,

and :func:`to_rperm` transports group elements along this bijection.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, gcd, inf
from typing import Sequence

from .diagram import BratteliDiagram, BRTail
from .errors import ArgumentOutOfRange, WrongDiagram
from .group import GroupElement


@dataclass(frozen=True, eq=False)
class RationalPermutation:
    denominator: int
    perm: tuple[int, ...]

    def __post_init__(self):
        n = self.denominator
        p = tuple(int(x) for x in self.perm)
        if n < 1 or len(p) != n or sorted(p) != list(range(n)):
            raise ArgumentOutOfRange(f"not a permutation of {n} subintervals")
        object.__setattr__(self, "perm", p)

    @staticmethod
    def identity(n: int = 1) -> "RationalPermutation":
        return RationalPermutation(n, tuple(range(n)))

    # -- the directed system ----------------------------------------------------

    def refine(self, m: int) -> "RationalPermutation":
        """Same interval map on ``n*m`` subintervals."""
        if m < 1:
            raise ArgumentOutOfRange("refinement multiplier must be >= 1")
        n = self.denominator
        return RationalPermutation(
            n * m, tuple(m * self.perm[j // m] + j % m for j in range(n * m))
        )

    def reduced(self) -> "RationalPermutation":
        """Smallest-denominator representative of the same interval map."""
        n = self.denominator
        for d in sorted(k for k in range(1, n + 1) if n % k == 0):
            m = n // d
            cand = tuple(self.perm[j * m] // m for j in range(d))
            if (
                sorted(cand) == list(range(d))
                and RationalPermutation(d, cand).refine(m).perm == self.perm
            ):
                return RationalPermutation(d, cand)
        return self

    def _common(self, other: "RationalPermutation"):
        n = self.denominator * other.denominator // gcd(self.denominator, other.denominator)
        return self.refine(n // self.denominator), other.refine(n // other.denominator)

    def compose(self, other: "RationalPermutation") -> "RationalPermutation":
        """``(self * other)(x) = self(other(x))``."""
        a, b = self._common(other)
        return RationalPermutation(a.denominator, tuple(a.perm[b.perm[j]] for j in range(a.denominator)))

    __mul__ = compose

    def inverse(self) -> "RationalPermutation":
        inv = [0] * self.denominator
        for j, t in enumerate(self.perm):
            inv[t] = j
        return RationalPermutation(self.denominator, tuple(inv))

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalPermutation):
            return NotImplemented
        a, b = self._common(other)
        return a.perm == b.perm

    def __hash__(self) -> int:
        r = self.reduced()
        return hash((r.denominator, r.perm))

    # -- the interval action ------------------------------------------------------

    def apply(self, x) -> Fraction:
        x = Fraction(x)
        if not 0 <= x < 1:
            raise ArgumentOutOfRange(f"{x} lies outside [0,1)")
        n = self.denominator
        j = int(x * n)  # floor: x*n >= 0
        return Fraction(self.perm[j] + (x * n - j), n)

    def is_identity(self) -> bool:
        return all(t == j for j, t in enumerate(self.perm))

    def fix_measure(self) -> Fraction:
        """Lebesgue measure of the fixed-point set: the fraction of fixed blocks."""
        return Fraction(sum(1 for j, t in enumerate(self.perm) if t == j), self.denominator)

    def __repr__(self) -> str:
        return f"RationalPermutation({self.denominator}, {self.perm!r})"


def char_r(k, g: RationalPermutation) -> Fraction:
    """The fixed-measure character family: ``fix_measure(g)**k``.

    ``k = 0`` is the identity character, ``k = inf`` the regular one.
    """
    if k == inf:
        return Fraction(1) if g.is_identity() else Fraction(0)
    if not isinstance(k, int) or k < 0:
        raise ArgumentOutOfRange("exponent must be a nonnegative integer or inf")
    return g.fix_measure() ** k


# ---------------------------------------------------------------------------
# Transport along the factorial indexing of the fully connected diagram
# ---------------------------------------------------------------------------


def is_br_diagram(d: BratteliDiagram) -> bool:
    return isinstance(d.tail, BRTail) and d.tail_start == 0


def encode_digits(digits: Sequence[int]) -> int:
    """``i_n``: the integer below ``(n+1)!`` with the given vertex digits."""
    n = len(digits)
    out, w = 0, factorial(n + 1)
    for j, a in enumerate(digits, start=1):
        w //= j + 1
        if not 0 <= a <= j:
            raise ArgumentOutOfRange(f"digit {a} at position {j} out of range")
        out += a * w
    return out


def decode_digits(value: int, n: int) -> tuple[int, ...]:
    if not 0 <= value < factorial(n + 1):
        raise ArgumentOutOfRange(f"{value} is no level-{n} path code")
    digits = []
    w = factorial(n + 1)
    for j in range(1, n + 1):
        w //= j + 1
        a, value = divmod(value, w)
        digits.append(a)
    return tuple(digits)


def to_rperm(g: GroupElement) -> RationalPermutation:
    """Read a full-group element of the fully connected diagram as a rational
    permutation with denominator ``(level+1)!``."""
    if not is_br_diagram(g.diagram):
        raise WrongDiagram("element does not live on the fully connected (n+1)-vertices diagram")
    d, n = g.diagram, g.level
    size = factorial(n + 1)
    out = [0] * size
    for j in range(size):
        digits = decode_digits(j, n)
        path = tuple((a, 0) for a in digits)
        v, idx = d.index_of_path(path)
        image = d.path_of_index(n, v, g.apply(v, idx))
        out[j] = encode_digits(tuple(a for a, _ in image))
    return RationalPermutation(size, tuple(out))


def from_rperm(g: RationalPermutation, d: BratteliDiagram, max_level: int = 12) -> GroupElement:
    """The inverse transport: realize a rational permutation as a group element.

    The permutation is refined to denominators ``(m+1)!`` until it preserves
    residues mod ``m+1`` (i.e. terminal vertices); refining by a factor
    divisible by ``m+1`` always succeeds by level ``m = denominator``.
    """
    if not is_br_diagram(d):
        raise WrongDiagram("target diagram is not the fully connected diagram")
    for m in range(1, max_level + 1):
        size = factorial(m + 1)
        if size % g.denominator:
            continue
        ref = g.refine(size // g.denominator)
        if any(ref.perm[j] % (m + 1) != j % (m + 1) for j in range(size)):
            continue
        perms = [list(range(h)) for h in d.path_counts(m)]
        for j in range(size):
            digits = decode_digits(j, m)
            v, idx = d.index_of_path(tuple((a, 0) for a in digits))
            tdigits = decode_digits(ref.perm[j], m)
            tv, tidx = d.index_of_path(tuple((a, 0) for a in tdigits))
            perms[v][idx] = tidx
        return GroupElement(d, m, tuple(tuple(p) for p in perms))
    raise WrongDiagram(f"no level up to {max_level} realizes denominator {g.denominator}")
