"""JSON file formats and the DOT export.

All numbers that may be non-integral travel as exact rational strings
("p/q" in lowest terms, plain "p" for integers).  Every reader reports the
offending field path on malformed input, and every ``*_to_dict`` /
``*_from_dict`` pair round-trips.
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import inf
from pathlib import Path
from typing import Optional

from .character import CharacterSpec
from .clopen import ClopenSet
from .diagram import (
    BratteliDiagram,
    BRTail,
    ExplicitTail,
    OdometerTail,
    StationaryTail,
)
from .errors import BratteliError, ParseError
from .group import GroupElement
from .measure import InvariantMeasure, builtin_measure, validate_certificate
from .rperm import RationalPermutation
from .values import RatInterval, Value


def fmt_rational(x: Value) -> str:
    if isinstance(x, RatInterval):
        return f"{x.lo}..{x.hi}"
    return str(Fraction(x))


def parse_rational(s, where: str = "value") -> Fraction:
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: {s!r} is not a rational p/q") from exc


def _need(obj: dict, key: str, where: str):
    if key not in obj:
        raise ParseError(f"{where}: missing key {key!r}")
    return obj[key]


# ---------------------------------------------------------------------------
# Diagrams
# ---------------------------------------------------------------------------


def diagram_to_dict(d: BratteliDiagram, depth: Optional[int] = None) -> dict:
    return d.spec(depth)


def diagram_from_dict(obj: dict, where: str = "diagram") -> BratteliDiagram:
    levels = _need(obj, "levels", where)
    incidence = _need(obj, "incidence", where)
    tail_obj = obj.get("tail", "explicit")
    if tail_obj == "explicit":
        tail = ExplicitTail()
    elif tail_obj == "br":
        tail = BRTail()
    elif isinstance(tail_obj, dict) and "odometer" in tail_obj:
        tail = OdometerTail(int(tail_obj["odometer"]))
    elif isinstance(tail_obj, dict) and "stationary" in tail_obj:
        tail = StationaryTail(tuple(tuple(int(x) for x in row) for row in tail_obj["stationary"]))
    else:
        raise ParseError(f"{where}.tail: unknown tail rule {tail_obj!r}")
    try:
        return BratteliDiagram(levels, incidence, tail)
    except BratteliError:
        raise
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: {exc}") from exc


# ---------------------------------------------------------------------------
# Elements and clopen sets
# ---------------------------------------------------------------------------


def element_to_dict(g: GroupElement) -> dict:
    return {
        "level": g.level,
        "perms": {str(v): list(p) for v, p in enumerate(g.perms) if any(t != i for i, t in enumerate(p))},
    }


def element_from_dict(obj: dict, d: BratteliDiagram, where: str = "element") -> GroupElement:
    level = int(_need(obj, "level", where))
    perms_obj = _need(obj, "perms", where)
    if not isinstance(perms_obj, dict):
        raise ParseError(f"{where}.perms: expected an object keyed by vertex")
    try:
        perms = {int(v): [int(x) for x in p] for v, p in perms_obj.items()}
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}.perms: {exc}") from exc
    return GroupElement.from_vertex_perms(d, level, perms)


def clopen_to_dict(a: ClopenSet) -> dict:
    return {
        "level": a.level,
        "indices": {str(v): sorted(s) for v, s in enumerate(a.parts) if s},
    }


def clopen_from_dict(obj: dict, d: BratteliDiagram, where: str = "set") -> ClopenSet:
    level = int(_need(obj, "level", where))
    idx_obj = _need(obj, "indices", where)
    if not isinstance(idx_obj, dict):
        raise ParseError(f"{where}.indices: expected an object keyed by vertex")
    try:
        indices = {int(v): [int(x) for x in s] for v, s in idx_obj.items()}
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}.indices: {exc}") from exc
    return ClopenSet.from_indices(d, level, indices)


# ---------------------------------------------------------------------------
# Measures and characters
# ---------------------------------------------------------------------------


def measure_to_dict(mu: InvariantMeasure, depth: int) -> dict:
    weights = {
        str(n): {str(v): fmt_rational(q) for v, q in enumerate(mu.weights(n))}
        for n in range(depth + 1)
    }
    return {"weights": weights, "tail": "explicit"}


def measure_from_dict(obj: dict, d: BratteliDiagram, where: str = "measure") -> InvariantMeasure:
    weights_obj = _need(obj, "weights", where)
    tail = obj.get("tail", "explicit")
    if not isinstance(weights_obj, dict) or not weights_obj:
        raise ParseError(f"{where}.weights: expected a non-empty object keyed by level")
    try:
        levels = sorted(int(n) for n in weights_obj)
    except ValueError as exc:
        raise ParseError(f"{where}.weights: levels must be integers") from exc
    if levels != list(range(len(levels))):
        raise ParseError(f"{where}.weights: levels must be contiguous from 0")
    table = []
    for n in levels:
        row_obj = weights_obj[str(n)]
        row = [Fraction(0)] * d.vertex_count(n)
        seen = set()
        for v_str, q in row_obj.items():
            v = int(v_str)
            if not 0 <= v < len(row):
                raise ParseError(f"{where}.weights[{n}]: vertex {v} out of range")
            row[v] = parse_rational(q, f"{where}.weights[{n}][{v}]")
            seen.add(v)
        if len(seen) != len(row):
            raise ParseError(f"{where}.weights[{n}]: every vertex needs a weight")
        table.append(tuple(row))
    return validate_certificate(d, table, depth=len(table) - 1, tail=tail)


def character_from_dict(
    obj: dict, d: BratteliDiagram, base_dir: Optional[Path] = None, where: str = "character"
) -> CharacterSpec:
    terms_obj = _need(obj, "terms", where)
    if not isinstance(terms_obj, list) or not terms_obj:
        raise ParseError(f"{where}.terms: expected a non-empty list")
    terms = []
    for k, term in enumerate(terms_obj):
        ref = _need(term, "measure", f"{where}.terms[{k}]")
        alpha_obj = _need(term, "alpha", f"{where}.terms[{k}]")
        if ref == "builtin":
            mu = builtin_measure(d)
        elif isinstance(ref, str):
            path = Path(ref)
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            mu = measure_from_dict(load_json(path), d, where=str(path))
        else:
            raise ParseError(f"{where}.terms[{k}].measure: expected 'builtin' or a file path")
        if alpha_obj == "inf":
            alpha = inf
        else:
            try:
                alpha = int(alpha_obj)
            except (TypeError, ValueError) as exc:
                raise ParseError(f"{where}.terms[{k}].alpha: expected an integer or 'inf'") from exc
        terms.append((mu, alpha))
    return CharacterSpec(tuple(terms))


def character_to_dict(spec: CharacterSpec) -> dict:
    # measures serialize by reference only when builtin; table measures inline their depth-0 hint
    terms = []
    for mu, alpha in spec.terms:
        terms.append({
            "measure": "builtin" if mu.kind != "certificate" else "certificate",
            "alpha": "inf" if alpha == inf else int(alpha),
        })
    return {"terms": terms}


# ---------------------------------------------------------------------------
# Rational permutations and matrices
# ---------------------------------------------------------------------------


def rperm_to_dict(g: RationalPermutation) -> dict:
    return {"denominator": g.denominator, "perm": list(g.perm)}


def rperm_from_dict(obj: dict, where: str = "rperm") -> RationalPermutation:
    n = int(_need(obj, "denominator", where))
    perm = _need(obj, "perm", where)
    try:
        return RationalPermutation(n, tuple(int(x) for x in perm))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: {exc}") from exc


def matrix_to_dict(m) -> dict:
    return {"matrix": [[fmt_rational(x) for x in row] for row in m]}


def matrix_from_dict(obj: dict, where: str = "matrix") -> list[list[Fraction]]:
    rows = _need(obj, "matrix", where)
    if not isinstance(rows, list) or not rows:
        raise ParseError(f"{where}.matrix: expected a non-empty list of rows")
    return [
        [parse_rational(x, f"{where}.matrix[{i}][{j}]") for j, x in enumerate(row)]
        for i, row in enumerate(rows)
    ]


# ---------------------------------------------------------------------------
# Files
# ---------------------------------------------------------------------------


def load_json(path) -> dict:
    p = Path(path)
    try:
        with open(p) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ParseError(f"{p}: no such file")
    except json.JSONDecodeError as exc:
        raise ParseError(f"{p}:{exc.lineno}:{exc.colno}: {exc.msg}")


def dump_json(obj: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# DOT export
# ---------------------------------------------------------------------------


def to_dot(d: BratteliDiagram, depth: int, collapse_multiedges: bool = False) -> str:
    """Ranked digraph of the first ``depth`` levels; multi-edges either repeat
    or collapse into a single labeled arrow."""
    lines = ["digraph bratteli {", "  rankdir=TB;", '  node [shape=circle];']
    for n in range(depth + 1):
        names = " ".join(f'"v{n}_{v}";' for v in d.vertices(n))
        lines.append(f"  {{ rank=same; {names} }}")
        for v in d.vertices(n):
            lines.append(f'  "v{n}_{v}" [label="{v}"];')
    for n in range(depth):
        mat = d.incidence_matrix(n)
        for w in d.vertices(n + 1):
            for v in d.vertices(n):
                f = mat[w][v]
                if not f:
                    continue
                if collapse_multiedges:
                    label = f' [label="{f}"]' if f > 1 else ""
                    lines.append(f'  "v{n}_{v}" -> "v{n + 1}_{w}"{label};')
                else:
                    lines.extend(f'  "v{n}_{v}" -> "v{n + 1}_{w}";' for _ in range(f))
    lines.append("}")
    return "\n".join(lines) + "\n"
