"""Command-line interface.

Exit codes: 0 on success, 1 on domain errors (not well-founded, not
well-pointed, functor mismatch, ...), 2 on I/O, usage and parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import coalgebra as co
from . import dot, instances, rational, wellfounded
from .errors import CoalgebraError, ParseError
from .functor import parse_functor, term_to_json


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load(path: str) -> co.AnyCoalgebra:
    try:
        return co.loads(_read(path))
    except ParseError as e:
        raise ParseError(f"{path}: {e}") from None


def _load_pointed(path: str) -> co.PointedCoalgebra:
    obj = _load(path)
    if not isinstance(obj, co.PointedCoalgebra):
        raise UsageError(f"{path}: this command needs a 'point:' header")
    return obj


def _coalgebra_out(obj: co.AnyCoalgebra, fmt: str) -> str:
    if fmt == "json":
        return co.dumps_json(obj)
    if fmt == "dot":
        return dot.coalgebra_to_dot(obj)
    return co.dumps_text(obj)


def _json(data) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def _no_dot(fmt: str, command: str):
    if fmt == "dot":
        raise UsageError(f"{command}: --format dot is not available for this command")


def _tree_json(t: instances.Tree):
    return {
        "label": t.label,
        "cut": t.cut,
        "children": [{"edge": e, "tree": _tree_json(c)} for e, c in t.children],
    }


# --------------------------------------------------------------------------
# commands; each returns the text to write


def cmd_wp(args) -> str:
    obj = _load(args.file)
    if isinstance(obj, co.PointedCoalgebra):
        return _coalgebra_out(co.wp(obj), args.format)
    raise UsageError(f"{args.file}: wp needs a 'point:' header (use 'minimize' for the simple quotient)")


def cmd_minimize(args) -> str:
    obj = _load(args.file)
    base = obj.base if isinstance(obj, co.PointedCoalgebra) else obj
    q, _, part = co.simple_quotient(base)
    if isinstance(obj, co.PointedCoalgebra):
        return _coalgebra_out(co.PointedCoalgebra(q, part.blocks[obj.point]), args.format)
    return _coalgebra_out(q, args.format)


def cmd_reach(args) -> str:
    sub, _ = co.reachable_part(_load_pointed(args.file))
    return _coalgebra_out(sub, args.format)


def cmd_wf(args) -> str:
    obj = _load(args.file)
    base = obj.base if isinstance(obj, co.PointedCoalgebra) else obj
    r = wellfounded.well_founded_part(base)
    _no_dot(args.format, "wf")
    if args.format == "json":
        return _json({
            "well_founded": r.is_well_founded,
            "rounds": r.rounds,
            "part": sorted(r.part),
            "rank": {str(x): r.rank[x] for x in sorted(r.rank)},
        })
    lines = [
        f"well-founded: {str(r.is_well_founded).lower()}",
        f"rounds: {r.rounds}",
        "part: " + " ".join(map(str, sorted(r.part))),
    ]
    lines += [f"{x}: rank {r.rank[x]}" for x in sorted(r.rank)]
    return "\n".join(lines) + "\n"


def cmd_fold(args) -> str:
    obj = _load(args.file)
    base = obj.base if isinstance(obj, co.PointedCoalgebra) else obj
    if args.algebra == "detector":
        # a non-well-founded graph has two maps; report both
        wellfounded.DETECTOR.check_functor(base.functor)
        report = wellfounded.well_founded_part(base)
        if not report.is_well_founded:
            h1, h2 = wellfounded.detector_homomorphisms(base)
            if args.format == "json":
                return _json({"h1": {str(x): h1[x] for x in h1}, "h2": {str(x): h2[x] for x in h2}})
            return "".join(f"{x}: {h1[x]} {h2[x]}\n" for x in range(base.n))
    rule = wellfounded.builtin_rule(args.algebra, base.functor)
    h = wellfounded.fold(base, rule)
    _no_dot(args.format, "fold")
    if args.format == "json":
        return _json({str(x): str(h[x]) if not isinstance(h[x], int) else h[x] for x in range(base.n)})
    return "".join(f"{x}: {h[x]}\n" for x in range(base.n))


def cmd_canon(args) -> str:
    form = rational.canonical_form(_load_pointed(args.file))
    return _coalgebra_out(form.coalg, args.format)


def cmd_iso(args) -> str:
    a, b = _load_pointed(args.file1), _load_pointed(args.file2)
    result = rational.is_isomorphic(a, b)
    _no_dot(args.format, "iso")
    if args.format == "json":
        return _json({"isomorphic": result})
    return f"{str(result).lower()}\n"


def cmd_aplus(args) -> str:
    obj = _load(args.file)
    base = obj.base if isinstance(obj, co.PointedCoalgebra) else obj
    elems = rational.a_plus(base)
    _no_dot(args.format, "aplus")
    if args.format == "json":
        return _json([
            {"state": x, "digest": e.digest, "size": e.size, "well_founded": e.well_founded}
            for x, e in enumerate(elems)
        ])
    return "".join(f"{x}: {e.digest}\n" for x, e in enumerate(elems))


def cmd_rho_step(args) -> str:
    r = rational.rho_element(_load_pointed(args.file))
    step = rational.rho_structure(r)
    _no_dot(args.format, "rho-step")
    if args.format == "json":
        return _json({"element": r.digest, "term": term_to_json(step.term), "labels": list(step.labels)})
    return step.render() + "\n"


def cmd_enum(args) -> str:
    f = parse_functor(args.functor)
    elems = rational.enumerate_wp(f, args.max_states, args.mu, limit=args.limit)
    _no_dot(args.format, "enum")
    if args.format == "json":
        return _json([{"digest": e.digest, "size": e.size, "well_founded": e.well_founded} for e in elems])
    return "".join(e.digest + "\n" for e in elems)


def cmd_moore_min(args) -> str:
    try:
        m = instances.loads_moore(_read(args.file))
    except ParseError as e:
        raise ParseError(f"{args.file}: {e}") from None
    small = instances.minimize_moore(m)
    if args.format == "json":
        return _json({
            "inputs": list(small.inputs),
            "outputs": list(small.outputs),
            "initial": small.initial,
            "out": list(small.out),
            "next": [list(row) for row in small.next],
        })
    if args.format == "dot":
        return dot.coalgebra_to_dot(instances.moore_to_coalgebra(small))
    return instances.dumps_moore(small)


def cmd_stream_norm(args) -> str:
    s = instances.stream_normalize(instances.parse_stream(args.stream))
    _no_dot(args.format, "stream-norm")
    if args.format == "json":
        if isinstance(s, instances.Lasso):
            return _json({"prefix": s.prefix, "period": s.period})
        return _json({"word": s.word})
    return f"{s}\n"


def cmd_expand(args) -> str:
    tree = instances.tree_expansion(_load_pointed(args.file), args.depth)
    if args.format == "json":
        return _json(_tree_json(tree))
    if args.format == "dot":
        return dot.tree_to_dot(tree)
    return f"{tree}\n"


def cmd_hf_picture(args) -> str:
    return _coalgebra_out(instances.canonical_picture(instances.parse_hf(args.set)), args.format)


def cmd_hf_collapse(args) -> str:
    s = instances.mostowski_collapse(_load_pointed(args.file))
    _no_dot(args.format, "hf-collapse")
    if args.format == "json":
        return _json({"set": str(s)})
    return f"{s}\n"


def cmd_export_dot(args) -> str:
    return dot.coalgebra_to_dot(_load(args.file))


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wellpointed",
        description="Finite coalgebras: well-pointed modification, canonical forms, folds.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "dot"), default="text")
    common.add_argument("-o", "--output", help="write here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_, *files):
        p = sub.add_parser(name, parents=[common], help=help_)
        for f in files:
            p.add_argument(f, help="coalgebra file (text or JSON); '-' reads stdin")
        p.set_defaults(func=func)
        return p

    add("wp", cmd_wp, "well-pointed modification of a pointed coalgebra", "file")
    add("minimize", cmd_minimize, "simple quotient (coarsest bisimulation)", "file")
    add("reach", cmd_reach, "part reachable from the point", "file")
    add("wf", cmd_wf, "well-founded part and ranks", "file")
    p = add("fold", cmd_fold, "unique map into a built-in algebra", "file")
    p.add_argument("--algebra", choices=wellfounded.RULE_NAMES, required=True)
    add("canon", cmd_canon, "canonical form of a well-pointed coalgebra", "file")
    add("iso", cmd_iso, "isomorphism test for well-pointed coalgebras", "file1", "file2")
    add("aplus", cmd_aplus, "digest of the element generated by each state", "file")
    add("rho-step", cmd_rho_step, "one step of the structure on the rational fixed point", "file")
    p = add("enum", cmd_enum, "enumerate well-pointed coalgebras up to isomorphism")
    p.add_argument("--functor", required=True)
    p.add_argument("--max-states", type=int, required=True)
    p.add_argument("--mu", action="store_true", help="only well-founded ones")
    p.add_argument("--limit", type=int, default=rational.DEFAULT_ENUM_LIMIT)
    p = add("moore-min", cmd_moore_min, "minimize a Moore machine")
    p.add_argument("file", help="Moore machine file; '-' reads stdin")
    p = add("stream-norm", cmd_stream_norm, "minimal u(v)^w form of a stream")
    p.add_argument("stream", help="e.g. 'ab(ab)^w' or 'abc'")
    p = add("expand", cmd_expand, "tree expansion from the point", "file")
    p.add_argument("--depth", type=int, default=-1, help="negative: full expansion (default)")
    p = add("hf-picture", cmd_hf_picture, "canonical picture of a hereditarily finite set")
    p.add_argument("set", help="literal such as '{{},{{}}}' or a numeral")
    p = add("hf-collapse", cmd_hf_collapse, "Mostowski collapse of a well-founded graph")
    p.add_argument("file", nargs="?", default="-", help="graph file; default stdin")
    add("export-dot", cmd_export_dot, "canonical graph as Graphviz", "file")
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        text = args.func(args)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    except CoalgebraError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (UsageError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
