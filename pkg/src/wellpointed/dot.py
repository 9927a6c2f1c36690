"""Graphviz output for canonical graphs and trees."""

from __future__ import annotations

from .coalgebra import AnyCoalgebra, PointedCoalgebra, canonical_graph
from .functor import render_term
from .instances import Tree


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def coalgebra_to_dot(obj: AnyCoalgebra, name: str = "coalgebra") -> str:
    """One node per state labelled ``k: alpha(k)``; edges follow the least
    supports. The point, if any, is drawn with a double border."""
    if isinstance(obj, PointedCoalgebra):
        c, point = obj.base, obj.point
    else:
        c, point = obj, None
    lines = [f"digraph {name} {{", "  rankdir=LR;", "  node [shape=box];"]
    for x, t in enumerate(c.structure):
        attrs = [f"label={_quote(f'{x}: {render_term(t)}')}"]
        if x == point:
            attrs.append("peripheries=2")
        lines.append(f"  s{x} [{', '.join(attrs)}];")
    for x, succ in enumerate(canonical_graph(c)):
        for y in sorted(succ):
            lines.append(f"  s{x} -> s{y};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def tree_to_dot(tree: Tree, name: str = "tree") -> str:
    lines = [f"digraph {name} {{", "  node [shape=plaintext];"]
    counter = 0

    def visit(t: Tree) -> int:
        nonlocal counter
        me = counter
        counter += 1
        label = "…" if t.cut else (t.label or "•")
        lines.append(f"  t{me} [label={_quote(label)}];")
        for edge, child in t.children:
            k = visit(child)
            attr = f" [label={_quote(edge)}]" if edge is not None else ""
            lines.append(f"  t{me} -> t{k}{attr};")
        return me

    visit(tree)
    lines.append("}")
    return "\n".join(lines) + "\n"
