"""Adapters between familiar objects and generic coalgebras.

* Moore machines        ``Id^{I}*{J}``
* streams and lassos    ``Id*{I}+{end}``
* tree expansions       any functor; ordered without sets, unordered with them
* hereditarily finite sets and their canonical pictures   ``P(Id)``

Labelled transition systems (``P({A}*Id)``) need no adapter: bisimilarity is
:func:`~wellpointed.coalgebra.simple_quotient` on the generic encoding.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from .coalgebra import Coalgebra, PointedCoalgebra, wp
from .errors import DecodeError, FullExpansionDiverges, FunctorMismatch, ParseError
from .functor import (
    Const,
    ConstVal,
    Coprod,
    Exp,
    FunctorExpr,
    Id,
    Inj,
    Pair,
    Pow,
    Prod,
    SetOf,
    StateRef,
    Tab,
    Term,
    contains_pow,
)
from .wellfounded import AlgebraRule, Val, ValSet, fold, well_founded_part

# --------------------------------------------------------------------------
# Moore machines


@dataclass(frozen=True)
class MooreMachine:
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    next: tuple[tuple[int, ...], ...]  # next[q][k] for input inputs[k]
    out: tuple[str, ...]
    initial: int = 0

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "next", tuple(tuple(row) for row in self.next))
        object.__setattr__(self, "out", tuple(self.out))
        n = len(self.next)
        if len(self.out) != n:
            raise ValueError(f"{n} transition rows but {len(self.out)} outputs")
        if not 0 <= self.initial < n:
            raise ValueError(f"initial state {self.initial} outside 0..{n - 1}")
        for q, row in enumerate(self.next):
            if len(row) != len(self.inputs):
                raise ValueError(f"state {q}: {len(row)} transitions for {len(self.inputs)} inputs")
            for p in row:
                if not 0 <= p < n:
                    raise ValueError(f"state {q}: successor {p} outside 0..{n - 1}")
        for q, o in enumerate(self.out):
            if o not in self.outputs:
                raise ValueError(f"state {q}: output {o!r} not among {list(self.outputs)}")

    @property
    def n(self) -> int:
        return len(self.next)

    def step(self, q: int, a: str) -> int:
        return self.next[q][self.inputs.index(a)]


def moore_functor(inputs: Sequence[str], outputs: Sequence[str]) -> FunctorExpr:
    return Prod(Exp(Id(), tuple(inputs)), Const(tuple(outputs)))


def moore_to_coalgebra(m: MooreMachine) -> PointedCoalgebra:
    structure = [
        Pair(
            Tab(tuple((a, StateRef(m.next[q][k])) for k, a in enumerate(m.inputs))),
            ConstVal(m.out[q], m.outputs.index(m.out[q])),
        )
        for q in range(m.n)
    ]
    f = moore_functor(m.inputs, m.outputs)
    return PointedCoalgebra(Coalgebra.trusted(f, structure), m.initial)


def coalgebra_to_moore(pc: PointedCoalgebra) -> MooreMachine:
    f = pc.functor
    if not (isinstance(f, Prod) and isinstance(f.left, Exp) and isinstance(f.left.base, Id)
            and isinstance(f.right, Const)):
        raise FunctorMismatch(f"{f} is not a Moore functor Id^{{I}}*{{J}}")
    inputs, outputs = f.left.index, f.right.carrier
    nxt, out = [], []
    for t in pc.base.structure:
        nxt.append(tuple(v.index for _, v in t.left.entries))
        out.append(t.right.symbol)
    return MooreMachine(inputs, outputs, tuple(nxt), tuple(out), pc.point)


def moore_behavior(m: MooreMachine, length: int) -> dict[tuple[str, ...], str]:
    """Output after every input word of length at most ``length``."""
    result = {(): m.out[m.initial]}
    frontier = [((), m.initial)]
    for _ in range(length):
        nxt = []
        for w, q in frontier:
            for k, a in enumerate(m.inputs):
                p = m.next[q][k]
                result[w + (a,)] = m.out[p]
                nxt.append((w + (a,), p))
        frontier = nxt
    return result


def behaviors_agree(m1: MooreMachine, m2: MooreMachine, length: int) -> bool:
    """Whether ``moore_behavior(m1, length) == moore_behavior(m2, length)``,
    decided on the product machine instead of listing every word."""
    if m1.inputs != m2.inputs:
        return False
    layer = {(m1.initial, m2.initial)}
    seen = set(layer)
    for step in range(length + 1):
        if any(m1.out[p] != m2.out[q] for p, q in layer):
            return False
        if step == length:
            break
        layer = {(m1.next[p][k], m2.next[q][k]) for p, q in layer for k in range(len(m1.inputs))}
        layer -= seen
        if not layer:
            break
        seen |= layer
    return True


def minimize_moore(m: MooreMachine) -> MooreMachine:
    return coalgebra_to_moore(wp(moore_to_coalgebra(m)))


def dumps_moore(m: MooreMachine) -> str:
    lines = [
        f"inputs: {','.join(m.inputs)}",
        f"outputs: {','.join(m.outputs)}",
        f"initial: {m.initial}",
    ]
    lines += [f"{q}: {m.out[q]} | {' '.join(map(str, m.next[q]))}" for q in range(m.n)]
    return "\n".join(lines) + "\n"


def loads_moore(text: str) -> MooreMachine:
    """Transition-table format::

        inputs: a,b
        outputs: even,odd
        initial: 0
        0: even | 1 0
        1: odd | 0 1
    """
    header: dict = {}
    rows: dict[int, tuple[str, tuple[int, ...]]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise ParseError("expected 'key: value'", line=lineno)
        key, value = key.strip(), value.strip()
        if key in ("inputs", "outputs"):
            header[key] = tuple(s.strip() for s in value.split(",") if s.strip())
        elif key == "initial":
            try:
                header[key] = int(value)
            except ValueError:
                raise ParseError("initial must be an integer", line=lineno) from None
        elif key.isdigit():
            o, bar, targets = value.partition("|")
            if not bar:
                raise ParseError("expected '<output> | <successors>'", line=lineno)
            try:
                rows[int(key)] = (o.strip(), tuple(int(x) for x in targets.split()))
            except ValueError:
                raise ParseError("successors must be integers", line=lineno) from None
        else:
            raise ParseError(f"unknown key {key!r}", line=lineno)
    for key in ("inputs", "outputs"):
        if key not in header:
            raise ParseError(f"missing '{key}:' header")
    n = len(rows)
    if sorted(rows) != list(range(n)):
        raise ParseError("state rows must be numbered 0..n-1")
    try:
        return MooreMachine(
            header["inputs"],
            header["outputs"],
            tuple(rows[q][1] for q in range(n)),
            tuple(rows[q][0] for q in range(n)),
            header.get("initial", 0),
        )
    except ValueError as e:
        raise ParseError(str(e)) from None


# --------------------------------------------------------------------------
# streams


@dataclass(frozen=True)
class Finite:
    word: str

    def __str__(self):
        return self.word or "ε"


@dataclass(frozen=True)
class Lasso:
    prefix: str
    period: str

    def __post_init__(self):
        if not self.period:
            raise ValueError("a lasso needs a nonempty period")

    def __str__(self):
        return f"{self.prefix}({self.period})^w"


StreamSpec = Union[Finite, Lasso]
END = "end"


def parse_stream(src: str) -> StreamSpec:
    """``abc`` (finite; ``ε`` or empty for the empty word) or ``u(v)^w``."""
    s = src.strip()
    if s in ("", "ε"):
        return Finite("")
    if "(" in s:
        head, _, rest = s.partition("(")
        period, close, tail = rest.partition(")")
        if not close or tail != "^w":
            raise ParseError("expected u(v)^w", pos=len(head))
        if not period:
            raise ParseError("empty period", pos=len(head) + 1)
        word = head + period
    else:
        word = s
        head, period = s, None
    bad = [i for i, ch in enumerate(word) if ch.isspace() or ch in "(){}[],:@^+<>\"ε"]
    if bad:
        raise ParseError(f"invalid stream symbol {word[bad[0]]!r}", pos=bad[0])
    return Lasso(head, period) if period is not None else Finite(word)


def stream_alphabet(s: StreamSpec) -> tuple[str, ...]:
    chars = s.word if isinstance(s, Finite) else s.prefix + s.period
    return tuple(sorted(set(chars)))


def stream_functor(alphabet: Sequence[str]) -> FunctorExpr:
    return Coprod((Prod(Id(), Const(tuple(alphabet))), Const((END,))))


def stream_to_coalgebra(s: StreamSpec, alphabet: Sequence[str] | None = None) -> PointedCoalgebra:
    alphabet = tuple(alphabet) if alphabet is not None else stream_alphabet(s)
    f = stream_functor(alphabet)
    pos = {a: i for i, a in enumerate(alphabet)}

    def step(a: str, y: int) -> Term:
        return Inj(0, Pair(StateRef(y), ConstVal(a, pos[a])))

    if isinstance(s, Finite):
        structure = [step(a, i + 1) for i, a in enumerate(s.word)]
        structure.append(Inj(1, ConstVal(END, 0)))
    else:
        word = s.prefix + s.period
        structure = [step(a, i + 1) for i, a in enumerate(word)]
        structure[-1] = step(word[-1], len(s.prefix))
    return PointedCoalgebra(Coalgebra.trusted(f, structure), 0)


def coalgebra_to_stream(pc: PointedCoalgebra) -> StreamSpec:
    """Read off the stream generated by the point (path or lasso shape)."""
    f = pc.functor
    if not (isinstance(f, Coprod) and len(f.summands) == 2
            and isinstance(f.summands[0], Prod) and isinstance(f.summands[0].left, Id)
            and isinstance(f.summands[0].right, Const) and isinstance(f.summands[1], Const)):
        raise FunctorMismatch(f"{f} is not a stream functor Id*{{I}}+{{end}}")
    seen: dict[int, int] = {}
    word: list[str] = []
    x = pc.point
    while True:
        seen[x] = len(word)
        t = pc.base.structure[x]
        if t.tag == 1:
            return Finite("".join(word))
        if not isinstance(t.payload.left, StateRef):
            raise DecodeError(f"state {x}: unexpected term")
        if len(t.payload.right.symbol) != 1:
            raise DecodeError(f"state {x}: stream symbols must be single characters")
        word.append(t.payload.right.symbol)
        x = t.payload.left.index
        if x in seen:
            k = seen[x]
            return Lasso("".join(word[:k]), "".join(word[k:]))


def stream_normalize(s: StreamSpec) -> StreamSpec:
    return coalgebra_to_stream(wp(stream_to_coalgebra(s)))


# --------------------------------------------------------------------------
# trees


@dataclass(frozen=True)
class Tree:
    """A finite labelled tree.

    ``children`` holds ``(edge, subtree)`` pairs. Ordered trees (expansions
    for functors without sets) keep their children in position order with
    ``edge = None``; unordered trees keep them sorted by ``(edge, code)``.
    ``cut`` marks a node whose children were dropped by a depth bound.
    """

    label: str | None
    children: tuple[tuple[str | None, "Tree"], ...] = ()
    ordered: bool = True
    cut: bool = False
    code: str = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        kids = tuple((e, t) for e, t in self.children)
        if not self.ordered:
            kids = tuple(sorted(kids, key=lambda p: (p[0] or "", p[1].code)))
        object.__setattr__(self, "children", kids)
        head = "…" if self.cut else (self.label if self.label is not None else ".")
        if kids:
            inner = ",".join((f"{e}=" if e is not None else "") + t.code for e, t in kids)
            head += "(" + inner + ")"
        object.__setattr__(self, "code", head)

    def __eq__(self, other):
        return isinstance(other, Tree) and self.ordered == other.ordered and self.code == other.code

    def __hash__(self):
        return hash(self.code)

    def __str__(self):
        return self.code

    def subtrees(self) -> Iterable["Tree"]:
        yield self
        for _, t in self.children:
            yield from t.subtrees()

    def size(self) -> int:
        return 1 + sum(t.size() for _, t in self.children)

    def height(self) -> int:
        return 1 + max((t.height() for _, t in self.children), default=-1)

    def levels(self) -> list[list["Tree"]]:
        out, layer = [], [self]
        while layer:
            out.append(layer)
            layer = [t for node in layer for _, t in node.children]
        return out


def _is_leaf(p) -> bool:
    return isinstance(p, (StateRef, Val))


def _has_leaf(p) -> bool:
    if _is_leaf(p):
        return True
    if isinstance(p, Pair):
        return _has_leaf(p.left) or _has_leaf(p.right)
    if isinstance(p, Inj):
        return _has_leaf(p.payload)
    if isinstance(p, Tab):
        return any(_has_leaf(v) for _, v in p.entries)
    if isinstance(p, (SetOf, ValSet)):
        return any(_has_leaf(e) for e in _elements(p))
    return False


def _elements(p):
    return p.elements if isinstance(p, SetOf) else list(p.elements)


def _render(p, mark=None, path=()) -> str:
    """Shape text with leaves printed as ``_``. Without ``mark``, set elements
    holding leaves are left out (they become edges); with ``mark`` (a leaf
    path) every leaf but the marked one prints as ``·``."""
    if _is_leaf(p):
        return "_" if mark is None or path == mark else "·"
    if isinstance(p, ConstVal):
        return p.symbol
    if isinstance(p, Pair):
        return f"({_render(p.left, mark, path + (0,))},{_render(p.right, mark, path + (1,))})"
    if isinstance(p, Inj):
        return f"inj {p.tag} {_render(p.payload, mark, path + (0,))}"
    if isinstance(p, Tab):
        return "[" + ",".join(
            f"{k}:{_render(v, mark, path + (i,))}" for i, (k, v) in enumerate(p.entries)
        ) + "]"
    if isinstance(p, (SetOf, ValSet)):
        parts = sorted(
            _render(e, mark, path + (i,))
            for i, e in enumerate(_elements(p))
            if mark is not None or not _has_leaf(e)
        )
        return "{" + ",".join(parts) + "}"
    raise TypeError(f"unexpected {p!r}")


def _occurrences(p, elem=None, path=(), acc=None):
    """Leaves of ``p`` in order as ``(leaf, enclosing set element, path of
    the leaf inside that element)``."""
    if acc is None:
        acc = []
    if _is_leaf(p):
        acc.append((p, elem, path))
    elif isinstance(p, Pair):
        _occurrences(p.left, elem, path + (0,), acc)
        _occurrences(p.right, elem, path + (1,), acc)
    elif isinstance(p, Inj):
        _occurrences(p.payload, elem, path + (0,), acc)
    elif isinstance(p, Tab):
        for i, (_, v) in enumerate(p.entries):
            _occurrences(v, elem, path + (i,), acc)
    elif isinstance(p, (SetOf, ValSet)):
        for e in _elements(p):
            _occurrences(e, e, (), acc)
    return acc


def _node(p, subtree, ordered: bool, cut: bool = False) -> Tree:
    """Tree node for the term/plugged term ``p``; ``subtree(leaf)`` gives the
    child tree for a leaf, or None when the node is cut."""
    label = _render(p)
    if cut:
        return Tree(label, (), ordered, cut=bool(_occurrences(p)))
    kids = []
    k = 0
    for leaf, elem, path in _occurrences(p):
        if ordered:
            edge = None
        elif elem is None:
            edge = f"#{k}"
            k += 1
        else:
            edge = _render(elem, mark=path)
            edge = None if edge == "_" else edge
        kids.append((edge, subtree(leaf)))
    return Tree(label, tuple(kids), ordered)


def expansion_algebra(functor: FunctorExpr) -> AlgebraRule:
    """Algebra on trees whose fold is the tree expansion. Sets of children
    collapse equal subtrees, so for functors with sets it agrees with
    :func:`tree_expansion` on simple coalgebras."""
    ordered = not contains_pow(functor)
    return AlgebraRule(
        "expansion", lambda p: _node(p, lambda leaf: leaf.value, ordered), lambda f: f == functor
    )


def tree_expansion(pc: PointedCoalgebra, depth: int) -> Tree:
    """Unfold from the point down to ``depth`` (the root is at depth 0); a
    negative depth asks for the full expansion, which must terminate."""
    c = pc.base
    ordered = not contains_pow(c.functor)
    if depth < 0:
        report = well_founded_part(c)
        if pc.point not in report.part:
            raise FullExpansionDiverges(
                f"state {pc.point} reaches a cycle; full expansion is infinite"
            )
        memo: dict[int, Tree] = {}
        for x in sorted(report.part, key=lambda x: (report.rank[x], x)):
            memo[x] = _node(c.structure[x], lambda leaf: memo[leaf.index], ordered)
        return memo[pc.point]

    memo2: dict[tuple[int, int], Tree] = {}

    def go(x: int, d: int) -> Tree:
        key = (x, d)
        if key not in memo2:
            if d == 0:
                memo2[key] = _node(c.structure[x], None, ordered, cut=True)
            else:
                memo2[key] = _node(c.structure[x], lambda leaf: go(leaf.index, d - 1), ordered)
        return memo2[key]

    return go(pc.point, depth)


def is_strongly_extensional(t: Tree) -> bool:
    """True iff the greatest tree-bisimulation of ``t`` with itself is the
    diagonal. Related nodes sit at the same depth, have related parents (or
    are both the root), carry equal labels, and match children edge by edge.
    Cut nodes are related only to themselves."""
    if t.ordered:
        raise ValueError("strong extensionality is defined for unordered trees")
    nodes: list[Tree] = []
    parent: list[int] = []
    depth: list[int] = []
    kids: list[list[tuple[str | None, int]]] = []
    queue = deque([(t, -1, 0, None)])
    while queue:
        node, par, d, edge = queue.popleft()
        i = len(nodes)
        nodes.append(node)
        parent.append(par)
        depth.append(d)
        kids.append([])
        if par >= 0:
            kids[par].append((edge, i))
        for e, child in node.children:
            queue.append((child, i, d + 1, e))

    by_depth: dict[int, list[int]] = {}
    for i, d in enumerate(depth):
        by_depth.setdefault(d, []).append(i)
    rel = {
        (u, v)
        for level in by_depth.values()
        for u, v in itertools.product(level, repeat=2)
        if nodes[u].label == nodes[v].label
        and nodes[u].cut == nodes[v].cut
        and (not nodes[u].cut or u == v)
    }

    def ok(u: int, v: int) -> bool:
        if parent[u] >= 0 and (parent[u], parent[v]) not in rel:
            return False
        for a, b in ((u, v), (v, u)):
            for e, c in kids[a]:
                if not any(e == e2 and (c, d) in rel for e2, d in kids[b]):
                    return False
        return True

    changed = True
    while changed:
        changed = False
        for pair in list(rel):
            if pair in rel and not ok(*pair):
                rel.discard(pair)
                changed = True
    return all(u == v for u, v in rel)


# --------------------------------------------------------------------------
# hereditarily finite sets


class HFSet:
    """A hereditarily finite set; members are kept duplicate-free and sorted
    by (length of literal, literal), so equal sets have equal literals."""

    __slots__ = ("elements", "code")

    def __init__(self, elements: Iterable["HFSet"] = ()):
        uniq = {e.code: e for e in elements}
        self.elements = tuple(uniq[k] for k in sorted(uniq, key=lambda s: (len(s), s)))
        self.code = "{" + ",".join(e.code for e in self.elements) + "}"

    def __eq__(self, other):
        return isinstance(other, HFSet) and self.code == other.code

    def __hash__(self):
        return hash(self.code)

    def __repr__(self):
        return f"HFSet({self.code})"

    def __str__(self):
        return self.code

    def __len__(self):
        return len(self.elements)

    def __contains__(self, item):
        return item in self.elements

    def sort_key(self):
        return (len(self.code), self.code)

    def transitive_members(self) -> list["HFSet"]:
        """The set itself and all hereditary members, each once."""
        seen = {self.code: self}
        stack = [self]
        while stack:
            s = stack.pop()
            for e in s.elements:
                if e.code not in seen:
                    seen[e.code] = e
                    stack.append(e)
        return list(seen.values())


def von_neumann(n: int) -> HFSet:
    s = HFSet()
    members = []
    for _ in range(n):
        members.append(s)
        s = HFSet(members)
    return s


def parse_hf(src: str) -> HFSet:
    """A nested-braces literal such as ``{{},{{}}}``, or a natural number for
    the von Neumann numeral."""
    s = src.strip()
    if s.isdigit():
        return von_neumann(int(s))
    pos = 0

    def skip():
        nonlocal pos
        while pos < len(s) and s[pos].isspace():
            pos += 1

    def item() -> HFSet:
        nonlocal pos
        skip()
        if pos >= len(s) or s[pos] != "{":
            raise ParseError("expected '{'", pos=pos)
        pos += 1
        members = []
        skip()
        if pos < len(s) and s[pos] == "}":
            pos += 1
            return HFSet()
        while True:
            members.append(item())
            skip()
            if pos < len(s) and s[pos] == ",":
                pos += 1
                continue
            if pos < len(s) and s[pos] == "}":
                pos += 1
                return HFSet(members)
            raise ParseError("expected ',' or '}'", pos=pos)

    result = item()
    skip()
    if pos != len(s):
        raise ParseError("trailing input", pos=pos)
    return result


GRAPH = Pow(Id())


def canonical_picture(s: HFSet) -> PointedCoalgebra:
    """Membership graph on ``s`` and its hereditary members, pointed at ``s``,
    in canonical numbering."""
    from .rational import canonical_form

    members = s.transitive_members()
    index = {m.code: i for i, m in enumerate(members)}
    structure = [SetOf(tuple(StateRef(index[e.code]) for e in m.elements)) for m in members]
    c = Coalgebra(GRAPH, len(members), tuple(structure))
    return canonical_form(PointedCoalgebra(c, 0)).coalg


HF_SET = AlgebraRule("hfset", lambda p: HFSet(e.value for e in p.elements), lambda f: f == GRAPH)
"""The algebra ``P(HF) -> HF`` of hereditarily finite sets; folding into it is
the Mostowski collapse."""


def mostowski_collapse(pc: PointedCoalgebra) -> HFSet:
    if pc.functor != GRAPH:
        raise FunctorMismatch(f"Mostowski collapse needs {GRAPH}, got {pc.functor}")
    return fold(pc.base, HF_SET)[pc.point]


def graph_coalgebra(n: int, edges: Iterable[tuple[int, int]]) -> Coalgebra:
    succ: list[set[int]] = [set() for _ in range(n)]
    for a, b in edges:
        succ[a].add(b)
    return Coalgebra(GRAPH, n, tuple(SetOf(tuple(StateRef(y) for y in s)) for s in succ))


__all__ = [
    "MooreMachine", "moore_functor", "moore_to_coalgebra", "coalgebra_to_moore",
    "moore_behavior", "behaviors_agree", "minimize_moore", "dumps_moore", "loads_moore",
    "Finite", "Lasso", "StreamSpec", "parse_stream", "stream_functor",
    "stream_to_coalgebra", "coalgebra_to_stream", "stream_normalize",
    "Tree", "expansion_algebra", "tree_expansion", "is_strongly_extensional",
    "HFSet", "von_neumann", "parse_hf", "canonical_picture", "mostowski_collapse",
    "HF_SET", "GRAPH", "graph_coalgebra",
]
