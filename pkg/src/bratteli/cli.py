"""Command-line surface.

Results print to stdout as JSON with exact rationals serialized "p/q";
``--float`` adds a decimal rendering with an explicit error bound.  Exit
codes: 0 success, 1 domain error (or a failed psd/centrality check), 2 usage
error.  Domain errors go to stderr tagged with the error name.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from math import inf
from pathlib import Path

from . import character as ch
from . import clopen as cl
from . import diagram as dg
from . import group as gr
from . import io as bio
from . import measure as ms
from . import rperm as rp
from .errors import BratteliError
from .values import RatInterval, val_float, val_width


def _out(obj) -> None:
    print(json.dumps(obj, indent=2))


def _value_field(x, want_float: bool) -> dict:
    d = {"value": bio.fmt_rational(x)}
    if want_float:
        d["float"] = val_float(x)
        d["abs_error_bound"] = bio.fmt_rational(val_width(x) / 2)
    return d


def _parse_levels(text: str) -> list[int]:
    if ":" in text:
        a, b = text.split(":", 1)
        return list(range(int(a), int(b) + 1))
    return [int(x) for x in text.split(",") if x]


def _parse_cuts(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def _load_diagram(path) -> dg.BratteliDiagram:
    return bio.diagram_from_dict(bio.load_json(path), where=str(path))


def _load_measure(ref: str, d: dg.BratteliDiagram) -> ms.InvariantMeasure:
    if ref == "builtin":
        return ms.builtin_measure(d)
    return bio.measure_from_dict(bio.load_json(ref), d, where=ref)


def _load_character(path, d: dg.BratteliDiagram) -> ch.CharacterSpec:
    p = Path(path)
    return bio.character_from_dict(bio.load_json(p), d, base_dir=p.parent, where=str(p))


def _load_element(path, d: dg.BratteliDiagram) -> gr.GroupElement:
    return bio.element_from_dict(bio.load_json(path), d, where=str(path))


def _load_set(path, d: dg.BratteliDiagram) -> cl.ClopenSet:
    return bio.clopen_from_dict(bio.load_json(path), d, where=str(path))


# ---------------------------------------------------------------------------
# diagram subcommands
# ---------------------------------------------------------------------------


def _cmd_diagram_validate(args) -> int:
    d = _load_diagram(args.file)
    depth = args.depth if args.depth is not None else (d.depth if d.depth is not None else 8)
    d.path_counts(depth)
    _out({
        "ok": True,
        "levels": [d.vertex_count(n) for n in range(depth + 1)],
        "tail": d.spec(0)["tail"],
        "checked_depth": depth,
    })
    return 0


def _cmd_diagram_paths(args) -> int:
    d = _load_diagram(args.file)
    _out({"level": args.level, "counts": list(d.path_counts(args.level))})
    return 0


def _cmd_diagram_telescope(args) -> int:
    d = _load_diagram(args.file)
    cuts = _parse_cuts(args.cuts)
    t = dg.telescope(d, cuts)
    depth = args.depth if args.depth is not None else len(cuts) - 1
    _out(bio.diagram_to_dict(t, depth))
    return 0


def _cmd_diagram_simple(args) -> int:
    d = _load_diagram(args.file)
    res = dg.is_simple(d, args.bound)
    out = {"result": res.kind}
    if res.kind == "simple":
        out["witnesses"] = [list(x) for x in res.witnesses]
    elif res.kind == "unknown":
        out["bound"] = res.bound
    else:
        out["reason"] = res.reason
    _out(out)
    return 0


def _cmd_diagram_even_telescope(args) -> int:
    d = _load_diagram(args.file)
    cuts = dg.find_even_telescoping(d, args.bound)
    if cuts is None:
        _out({"found": False, "bound": args.bound})
    else:
        _out({"found": True, "cuts": list(cuts)})
    return 0


def _cmd_diagram_dot(args) -> int:
    d = _load_diagram(args.file)
    sys.stdout.write(bio.to_dot(d, args.depth, args.collapse_multiedges))
    return 0


# ---------------------------------------------------------------------------
# measure subcommands
# ---------------------------------------------------------------------------


def _cmd_measure_validate(args) -> int:
    d = _load_diagram(args.diagram)
    mu = bio.measure_from_dict(bio.load_json(args.file), d, where=str(args.file))
    depth = args.depth
    if depth is not None:
        mu.validate(depth)
    _out({"ok": True, "exact": mu.exact})
    return 0


def _cmd_measure_builtin(args) -> int:
    d = _load_diagram(args.diagram)
    mu = ms.builtin_measure(d)
    depth = args.depth if args.depth is not None else 6
    mu.validate(depth)
    _out({"kind": mu.kind, "exact": mu.exact, **bio.measure_to_dict(mu, depth)})
    return 0


def _cmd_measure_of(args) -> int:
    d = _load_diagram(args.diagram)
    mu = _load_measure(args.measure, d)
    a = _load_set(args.set, d)
    _out(_value_field(mu.measure(a), args.float))
    return 0


# ---------------------------------------------------------------------------
# group subcommands
# ---------------------------------------------------------------------------


def _cmd_group_compose(args) -> int:
    d = _load_diagram(args.diagram)
    g = _load_element(args.g, d)
    h = _load_element(args.h, d)
    _out(bio.element_to_dict(g * h))
    return 0


def _cmd_group_fix(args) -> int:
    d = _load_diagram(args.diagram)
    g = _load_element(args.g, d)
    _out(bio.clopen_to_dict(g.fix()))
    return 0


def _cmd_group_support(args) -> int:
    d = _load_diagram(args.diagram)
    g = _load_element(args.g, d)
    _out(bio.clopen_to_dict(g.support()))
    return 0


def _cmd_group_cycles(args) -> int:
    d = _load_diagram(args.diagram)
    g = _load_element(args.g, d)
    data = g.cycle_data()
    _out({
        "lengths": {str(v): list(ls) for v, ls in enumerate(data.lengths)},
        "even_cycles": data.is_even(),
    })
    return 0


def _cmd_group_conjugate(args) -> int:
    d = _load_diagram(args.diagram)
    g = _load_element(args.g, d)
    h = _load_element(args.h, d)
    level = args.level if args.level is not None else max(g.level, h.level)
    q = gr.conjugate_at_level(g, h, level)
    if q is None:
        _out({"conjugate": False, "level": level})
    else:
        _out({"conjugate": True, "level": level, "witness": bio.element_to_dict(q)})
    return 0


def _cmd_group_hn(args) -> int:
    d = _load_diagram(args.diagram)
    a = _load_set(args.set, d)
    res = gr.make_hn(a, args.level)
    _out({
        "element": bio.element_to_dict(res.element),
        "fixed_fractions": {f"{v},{w}": bio.fmt_rational(f) for (v, w), f in res.fixed_fractions.items()},
        "max_fixed_fraction": bio.fmt_rational(res.max_fixed_fraction),
    })
    return 0


def _cmd_group_claim1(args) -> int:
    h0, h1, m = gr.claim1_pair(args.p)
    _out({"m": m, "h0": list(h0), "h1": list(h1)})
    return 0


def _cmd_group_si_family(args) -> int:
    d = _load_diagram(args.diagram)
    s = _load_element(args.element, d)
    measures = [_load_measure(ref, d) for ref in args.measure or []]
    fam = gr.si_family(d, s, args.r, Fraction(args.eps), measures)
    out = {
        "count": len(fam.elements),
        "level": fam.elements[0].level,
        "elements": [bio.element_to_dict(e) for e in fam.elements],
    }
    if fam.cuts is not None:
        out["telescoped_cuts"] = list(fam.cuts)
        out["diagram"] = bio.diagram_to_dict(fam.diagram, fam.elements[0].level)
    if fam.required is not None:
        out["required_bundle_bound"] = bio.fmt_rational(fam.required)
    if fam.max_defect is not None:
        out["max_support_defect"] = bio.fmt_rational(fam.max_defect)
    _out(out)
    return 0


def _cmd_group_metric(args) -> int:
    d = _load_diagram(args.diagram)
    g = _load_element(args.g, d)
    h = _load_element(args.h, d)
    measures = [_load_measure(ref, d) for ref in args.measure]
    _out(_value_field(gr.metric_d(g, h, measures), args.float))
    return 0


# ---------------------------------------------------------------------------
# char subcommands
# ---------------------------------------------------------------------------


def _cmd_char_eval(args) -> int:
    d = _load_diagram(args.diagram)
    spec = _load_character(args.character, d)
    g = _load_element(args.element, d)
    _out(_value_field(ch.eval_character(spec, g), args.float))
    return 0


def _cmd_char_trace(args) -> int:
    d = _load_diagram(args.diagram)
    spec = _load_character(args.character, d)
    a = _load_set(args.set, d)
    _out(_value_field(ch.trace_projection(spec, a), args.float))
    return 0


def _cmd_char_gram(args) -> int:
    d = _load_diagram(args.diagram)
    spec = _load_character(args.character, d)
    elements = [_load_element(p, d) for p in args.elements]
    m = ch.gram_matrix(spec, elements)
    _out(bio.matrix_to_dict(m))
    return 0


def _cmd_char_psd(args) -> int:
    rows = bio.matrix_from_dict(bio.load_json(args.file), where=str(args.file))
    tol = Fraction(args.tolerance) if args.tolerance is not None else None
    res = ch.psd_check(rows, tolerance=tol)
    if res.is_psd:
        _out({"psd": True})
        return 0
    _out({"psd": False, "witness": [bio.fmt_rational(x) for x in res.witness]})
    return 1


def _cmd_char_central(args) -> int:
    d = _load_diagram(args.diagram)
    spec = _load_character(args.character, d)
    elements = [_load_element(p, d) for p in args.elements]
    bad = ch.centrality_check(spec, elements)
    _out({
        "central": not bad,
        "violations": [
            {"i": i, "j": j, "chi_gh": bio.fmt_rational(x), "chi_hg": bio.fmt_rational(y)}
            for i, j, x, y in bad
        ],
    })
    return 0 if not bad else 1


def _cmd_char_mult(args) -> int:
    d = _load_diagram(args.diagram)
    spec = _load_character(args.character, d)
    g = _load_element(args.element, d)
    targets = [Fraction(t) for t in args.targets.split(",") if t]
    rows = ch.multiplicativity_harness(spec, g, targets, _parse_levels(args.levels))
    _out({
        "rows": [
            {
                "level": r.level,
                "chi_g_hn": bio.fmt_rational(r.value),
                "target": bio.fmt_rational(r.target),
                "defect": bio.fmt_rational(r.defect),
            }
            for r in rows
        ]
    })
    return 0


def _cmd_char_proj_limit(args) -> int:
    d = _load_diagram(args.diagram)
    spec = _load_character(args.character, d)
    a = _load_set(args.set, d)
    rows = ch.projection_limit_check(spec, a, _parse_levels(args.levels))
    _out({
        "trace": bio.fmt_rational(rows[0].trace) if rows else None,
        "rows": [
            {
                "level": r.level,
                "chi_hn": bio.fmt_rational(r.value),
                "defect": bio.fmt_rational(r.defect),
                "bound": bio.fmt_rational(r.bound),
            }
            for r in rows
        ],
    })
    return 0


# ---------------------------------------------------------------------------
# rperm subcommands
# ---------------------------------------------------------------------------


def _cmd_rperm_refine(args) -> int:
    g = bio.rperm_from_dict(bio.load_json(args.file), where=str(args.file))
    _out(bio.rperm_to_dict(g.refine(args.multiplier)))
    return 0


def _cmd_rperm_compose(args) -> int:
    g = bio.rperm_from_dict(bio.load_json(args.g), where=str(args.g))
    h = bio.rperm_from_dict(bio.load_json(args.h), where=str(args.h))
    _out(bio.rperm_to_dict(g * h))
    return 0


def _cmd_rperm_fix(args) -> int:
    g = bio.rperm_from_dict(bio.load_json(args.file), where=str(args.file))
    _out(_value_field(g.fix_measure(), args.float))
    return 0


def _cmd_rperm_char(args) -> int:
    g = bio.rperm_from_dict(bio.load_json(args.file), where=str(args.file))
    k = inf if args.k == "inf" else int(args.k)
    _out(_value_field(rp.char_r(k, g), args.float))
    return 0


def _cmd_rperm_from_br(args) -> int:
    d = _load_diagram(args.diagram)
    g = _load_element(args.element, d)
    _out(bio.rperm_to_dict(rp.to_rperm(g)))
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bratteli", description=__doc__)
    top = parser.add_subparsers(dest="command", required=True)

    def floaty(p):
        p.add_argument("--float", action="store_true", help="also print a decimal with error bound")

    d = top.add_parser("diagram").add_subparsers(dest="sub", required=True)
    p = d.add_parser("validate")
    p.add_argument("file")
    p.add_argument("--depth", type=int)
    p.set_defaults(fn=_cmd_diagram_validate)
    p = d.add_parser("paths")
    p.add_argument("file")
    p.add_argument("--level", type=int, required=True)
    p.set_defaults(fn=_cmd_diagram_paths)
    p = d.add_parser("telescope")
    p.add_argument("file")
    p.add_argument("--cuts", required=True, help="comma-separated cut levels, e.g. 0,2,4")
    p.add_argument("--depth", type=int, help="levels of the result to realize")
    p.set_defaults(fn=_cmd_diagram_telescope)
    p = d.add_parser("simple")
    p.add_argument("file")
    p.add_argument("--bound", type=int, required=True)
    p.set_defaults(fn=_cmd_diagram_simple)
    p = d.add_parser("even-telescope")
    p.add_argument("file")
    p.add_argument("--bound", type=int, required=True)
    p.set_defaults(fn=_cmd_diagram_even_telescope)
    p = d.add_parser("dot")
    p.add_argument("file")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--collapse-multiedges", action="store_true")
    p.set_defaults(fn=_cmd_diagram_dot)

    m = top.add_parser("measure").add_subparsers(dest="sub", required=True)
    p = m.add_parser("validate")
    p.add_argument("file")
    p.add_argument("--diagram", required=True)
    p.add_argument("--depth", type=int)
    p.set_defaults(fn=_cmd_measure_validate)
    p = m.add_parser("builtin")
    p.add_argument("--diagram", required=True)
    p.add_argument("--depth", type=int)
    p.set_defaults(fn=_cmd_measure_builtin)
    p = m.add_parser("of")
    p.add_argument("--diagram", required=True)
    p.add_argument("--measure", required=True, help="'builtin' or a measure file")
    p.add_argument("--set", required=True)
    floaty(p)
    p.set_defaults(fn=_cmd_measure_of)

    g = top.add_parser("group").add_subparsers(dest="sub", required=True)
    p = g.add_parser("compose")
    p.add_argument("--diagram", required=True)
    p.add_argument("g")
    p.add_argument("h")
    p.set_defaults(fn=_cmd_group_compose)
    for name, fn in (("fix", _cmd_group_fix), ("support", _cmd_group_support), ("cycles", _cmd_group_cycles)):
        p = g.add_parser(name)
        p.add_argument("--diagram", required=True)
        p.add_argument("g")
        p.set_defaults(fn=fn)
    p = g.add_parser("conjugate")
    p.add_argument("--diagram", required=True)
    p.add_argument("g")
    p.add_argument("h")
    p.add_argument("--level", type=int)
    p.set_defaults(fn=_cmd_group_conjugate)
    p = g.add_parser("hn")
    p.add_argument("--diagram", required=True)
    p.add_argument("--set", required=True)
    p.add_argument("--level", type=int, required=True)
    p.set_defaults(fn=_cmd_group_hn)
    p = g.add_parser("claim1")
    p.add_argument("--p", type=int, required=True)
    p.set_defaults(fn=_cmd_group_claim1)
    p = g.add_parser("si-family")
    p.add_argument("--diagram", required=True)
    p.add_argument("--element", required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--eps", required=True, help="rational, e.g. 1/2")
    p.add_argument("--measure", action="append", help="'builtin' or a measure file (repeatable)")
    p.set_defaults(fn=_cmd_group_si_family)
    p = g.add_parser("metric")
    p.add_argument("--diagram", required=True)
    p.add_argument("g")
    p.add_argument("h")
    p.add_argument("--measure", action="append", required=True)
    floaty(p)
    p.set_defaults(fn=_cmd_group_metric)

    c = top.add_parser("char").add_subparsers(dest="sub", required=True)
    p = c.add_parser("eval")
    p.add_argument("--diagram", required=True)
    p.add_argument("--character", required=True)
    p.add_argument("--element", required=True)
    floaty(p)
    p.set_defaults(fn=_cmd_char_eval)
    p = c.add_parser("trace")
    p.add_argument("--diagram", required=True)
    p.add_argument("--character", required=True)
    p.add_argument("--set", required=True)
    floaty(p)
    p.set_defaults(fn=_cmd_char_trace)
    p = c.add_parser("gram")
    p.add_argument("--diagram", required=True)
    p.add_argument("--character", required=True)
    p.add_argument("--elements", nargs="+", required=True)
    p.set_defaults(fn=_cmd_char_gram)
    p = c.add_parser("psd")
    p.add_argument("file")
    p.add_argument("--tolerance")
    p.set_defaults(fn=_cmd_char_psd)
    p = c.add_parser("central")
    p.add_argument("--diagram", required=True)
    p.add_argument("--character", required=True)
    p.add_argument("--elements", nargs="+", required=True)
    p.set_defaults(fn=_cmd_char_central)
    p = c.add_parser("mult")
    p.add_argument("--diagram", required=True)
    p.add_argument("--character", required=True)
    p.add_argument("--element", required=True)
    p.add_argument("--targets", required=True, help="comma-separated rationals")
    p.add_argument("--levels", required=True, help="a:b inclusive, or comma list")
    p.set_defaults(fn=_cmd_char_mult)
    p = c.add_parser("proj-limit")
    p.add_argument("--diagram", required=True)
    p.add_argument("--character", required=True)
    p.add_argument("--set", required=True)
    p.add_argument("--levels", required=True)
    p.set_defaults(fn=_cmd_char_proj_limit)

    r = top.add_parser("rperm").add_subparsers(dest="sub", required=True)
    p = r.add_parser("refine")
    p.add_argument("file")
    p.add_argument("--multiplier", type=int, required=True)
    p.set_defaults(fn=_cmd_rperm_refine)
    p = r.add_parser("compose")
    p.add_argument("g")
    p.add_argument("h")
    p.set_defaults(fn=_cmd_rperm_compose)
    p = r.add_parser("fix")
    p.add_argument("file")
    floaty(p)
    p.set_defaults(fn=_cmd_rperm_fix)
    p = r.add_parser("char")
    p.add_argument("file")
    p.add_argument("--k", required=True, help="nonnegative integer or 'inf'")
    floaty(p)
    p.set_defaults(fn=_cmd_rperm_char)
    p = r.add_parser("from-br")
    p.add_argument("--diagram", required=True)
    p.add_argument("--element", required=True)
    p.set_defaults(fn=_cmd_rperm_from_br)

    return parser


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.fn(args)
    except BratteliError as exc:
        json.dump({"error": exc.name, "detail": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    except ValueError as exc:
        json.dump({"error": "ValueError", "detail": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
