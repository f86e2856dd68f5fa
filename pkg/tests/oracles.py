"""Independent oracles used to freeze expected values.

Nothing in here touches the library's index arithmetic: paths are
enumerated as explicit edge tuples and ordered by the canonical key
computed from first principles, elements act on paths by looking up
positions in those enumerations, set algebra runs on global bitmasks, and
path counts come from literal edge-by-edge summation.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache


# ---------------------------------------------------------------------------
# Canonical path enumeration
# ---------------------------------------------------------------------------


def path_key(path):
    """Nested comparison key: (source of last edge, key of prefix, edge index)."""
    if not path:
        return ()
    prefix = path[:-1]
    _, e = path[-1]
    w = prefix[-1][0] if prefix else 0
    return (w, path_key(prefix), e)


def enum_paths(d, n, v):
    """All root paths into vertex ``v`` at level ``n``, canonically ordered."""
    if n == 0:
        return [()] if v == 0 else []
    mat = d.incidence_matrix(n - 1)
    out = []
    for w in d.vertices(n - 1):
        for prefix in enum_paths(d, n - 1, w):
            for e in range(mat[v][w]):
                out.append(prefix + ((v, e),))
    out.sort(key=path_key)
    return out


def brute_path_counts(d, n):
    """Level-``n`` path counts by explicit edge-by-edge accumulation."""
    counts = [1]
    for k in range(n):
        mat = d.incidence_matrix(k)
        nxt = []
        for u in d.vertices(k + 1):
            total = 0
            for v in d.vertices(k):
                for _ in range(mat[u][v]):
                    total += counts[v]
            nxt.append(total)
        counts = nxt
    return tuple(counts)


def count_paths_between(d, n, v, m, w):
    """Paths from vertex ``v``@``n`` to ``w``@``m`` by depth-first enumeration."""
    if n == m:
        return 1 if v == w else 0
    mat = d.incidence_matrix(n)
    total = 0
    for u in d.vertices(n + 1):
        for _ in range(mat[u][v]):
            total += count_paths_between(d, n + 1, u, m, w)
    return total


def apply_to_path(d, g, path):
    """Act on an explicit path: replace the prefix by its image, keep the tail.

    Prefix positions are resolved through :func:`enum_paths`, so this is an
    index-arithmetic-free statement of what a group element does.
    """
    prefix, suffix = path[: g.level], path[g.level:]
    u = prefix[-1][0] if g.level else 0
    options = enum_paths(d, g.level, u)
    pos = options.index(prefix)
    image = options[g.perms[u][pos]]
    return image + suffix


# ---------------------------------------------------------------------------
# Bitmask semantics for clopen sets
# ---------------------------------------------------------------------------


def clopen_bitmask(a):
    """Global bitmask over all level paths (vertex-major)."""
    counts = a.diagram.path_counts(a.level)
    mask = 0
    off = 0
    for v, h in enumerate(counts):
        for i in a.parts[v]:
            mask |= 1 << (off + i)
        off += h
    return mask, off  # off = total bit width


# ---------------------------------------------------------------------------
# Permutation oracles
# ---------------------------------------------------------------------------


def cycle_type(perm):
    seen = [False] * len(perm)
    out = []
    for i in range(len(perm)):
        if seen[i]:
            continue
        n, j = 1, perm[i]
        seen[i] = True
        while j != i:
            seen[j] = True
            j = perm[j]
            n += 1
        out.append(n)
    return tuple(sorted(out))


def perm_compose(p, q):
    return tuple(p[q[i]] for i in range(len(q)))


def perm_inverse(p):
    inv = [0] * len(p)
    for i, t in enumerate(p):
        inv[t] = i
    return tuple(inv)


def random_even_cycle_perm(rng, size):
    """A full-support permutation with only even cycle lengths (size must be even)."""
    assert size % 2 == 0 and size >= 2
    items = list(range(size))
    rng.shuffle(items)
    perm = list(range(size))
    while items:
        k = 2 * rng.randint(1, len(items) // 2)  # even piece of an even remainder
        cyc, items = items[:k], items[k:]
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            perm[a] = b
    return tuple(perm)


def all_even_cycle_perms(size):
    """Every full-support even-cycle permutation of ``range(size)`` (small sizes)."""
    import itertools

    out = []
    for perm in itertools.permutations(range(size)):
        ct = cycle_type(perm)
        if all(l % 2 == 0 for l in ct):
            out.append(perm)
    return out


# ---------------------------------------------------------------------------
# A DOT grammar checker (the subset sufficient for ranked digraphs)
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r'\s*(?:(?P<str>"(?:[^"\\]|\\.)*")|(?P<id>[A-Za-z_][A-Za-z0-9_]*|-?\d+(?:\.\d+)?)'
    r"|(?P<punct>->|--|[{}\[\];=,]))"
)


def _tokenize(text):
    pos, out = 0, []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise SyntaxError(f"bad DOT token at offset {pos}: {text[pos:pos+20]!r}")
            break
        pos = m.end()
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
    return out


class DotParser:
    """Recursive-descent checker for the DOT digraph grammar."""

    def __init__(self, text):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None)

    def take(self, want_val=None, want_kind=None):
        kind, val = self.peek()
        if want_val is not None and val != want_val:
            raise SyntaxError(f"expected {want_val!r}, got {val!r}")
        if want_kind is not None and kind != want_kind:
            raise SyntaxError(f"expected {want_kind}, got {kind}:{val!r}")
        self.pos += 1
        return val

    def parse(self):
        if self.peek()[1] == "strict":
            self.take()
        if self.take(want_kind="id") not in ("digraph", "graph"):
            raise SyntaxError("not a graph")
        if self.peek()[0] in ("id", "str"):
            self.take()
        self.stmt_list()
        if self.pos != len(self.toks):
            raise SyntaxError("trailing tokens")
        return True

    def stmt_list(self):
        self.take("{")
        while self.peek()[1] != "}":
            self.stmt()
            if self.peek()[1] == ";":
                self.take()
        self.take("}")

    def stmt(self):
        kind, val = self.peek()
        if val == "{":
            self.stmt_list()
            return
        if val in ("graph", "node", "edge"):
            self.take()
            self.attr_list()
            return
        if kind not in ("id", "str"):
            raise SyntaxError(f"unexpected {val!r}")
        self.take()
        nxt = self.peek()[1]
        if nxt == "=":
            self.take()
            if self.peek()[0] not in ("id", "str"):
                raise SyntaxError("rhs of = must be a value")
            self.take()
        elif nxt in ("->", "--"):
            while self.peek()[1] in ("->", "--"):
                self.take()
                if self.peek()[0] not in ("id", "str"):
                    raise SyntaxError("edge target missing")
                self.take()
            if self.peek()[1] == "[":
                self.attr_list()
        elif nxt == "[":
            self.attr_list()
        # bare node statement otherwise

    def attr_list(self):
        self.take("[")
        while self.peek()[1] != "]":
            self.take(want_kind="id")
            self.take("=")
            if self.peek()[0] not in ("id", "str"):
                raise SyntaxError("attribute value missing")
            self.take()
            if self.peek()[1] == ",":
                self.take()
        self.take("]")


def dot_is_valid(text):
    return DotParser(text).parse()
