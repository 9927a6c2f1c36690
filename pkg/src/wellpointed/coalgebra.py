"""Finite coalgebras, homomorphisms, and the well-pointed modification.

States of a coalgebra with ``n`` states are ``0..n-1``; ``structure[x]`` is the
canonical term ``alpha(x)``. The pipeline here is

    simple_quotient  ->  reachable_part  ->  canonical renumbering  =  wp
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Sequence, Union

from .errors import FunctorMismatch, ParseError, TermTypeError
from .functor import (
    FunctorExpr,
    Term,
    map_term,
    parse_functor,
    parse_term,
    render_term,
    resolve_term,
    support,
    term_from_json,
    term_key,
    term_to_json,
)


@dataclass(frozen=True)
class Coalgebra:
    functor: FunctorExpr
    n: int
    structure: tuple[Term, ...]

    def __post_init__(self):
        structure = tuple(self.structure)
        if len(structure) != self.n:
            raise ValueError(f"{self.n} states but {len(structure)} structure terms")
        if isinstance(self.functor, str):
            object.__setattr__(self, "functor", parse_functor(self.functor))
        resolved = []
        for x, t in enumerate(structure):
            try:
                resolved.append(resolve_term(t, self.functor, self.n))
            except TermTypeError as e:
                err = TermTypeError(f"state {x}: {e}")
                err.state = x
                raise err from None
        object.__setattr__(self, "structure", tuple(resolved))

    @classmethod
    def trusted(cls, functor: FunctorExpr, structure: Sequence[Term]) -> "Coalgebra":
        """Build without re-validating; ``structure`` must already be canonical."""
        c = object.__new__(cls)
        object.__setattr__(c, "functor", functor)
        object.__setattr__(c, "n", len(structure))
        object.__setattr__(c, "structure", tuple(structure))
        return c

    def __getitem__(self, x: int) -> Term:
        return self.structure[x]

    def pointed(self, point: int) -> "PointedCoalgebra":
        return PointedCoalgebra(self, point)


@dataclass(frozen=True)
class PointedCoalgebra:
    base: Coalgebra
    point: int

    def __post_init__(self):
        if not 0 <= self.point < self.base.n:
            raise ValueError(f"point {self.point} outside carrier of size {self.base.n}")

    @property
    def functor(self) -> FunctorExpr:
        return self.base.functor

    @property
    def n(self) -> int:
        return self.base.n


@dataclass(frozen=True)
class Hom:
    source: Coalgebra
    target: Coalgebra
    map: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "map", tuple(self.map))


@dataclass(frozen=True)
class Partition:
    blocks: tuple[int, ...]
    count: int

    def classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.count)]
        for x, b in enumerate(self.blocks):
            out[b].append(x)
        return out

    @property
    def is_discrete(self) -> bool:
        return self.count == len(self.blocks)


def check_homomorphism(h: Hom) -> bool:
    if h.source.functor != h.target.functor:
        raise FunctorMismatch(f"{h.source.functor} vs {h.target.functor}")
    if len(h.map) != h.source.n:
        raise ValueError(f"map has {len(h.map)} entries for {h.source.n} states")
    for x, y in enumerate(h.map):
        if not 0 <= y < h.target.n:
            raise IndexError(f"state {x} maps to {y}, outside target of size {h.target.n}")
    return all(
        map_term(h.source.structure[x], h.map) == h.target.structure[h.map[x]]
        for x in range(h.source.n)
    )


def canonical_graph(c: Coalgebra) -> list[frozenset[int]]:
    return [support(t) for t in c.structure]


def induced_subcoalgebra(c: Coalgebra, states: Sequence[int]) -> tuple[Coalgebra, Hom]:
    """Subcoalgebra on ``states`` (listed in the desired new order). The set
    must be closed under successors."""
    new = {old: i for i, old in enumerate(states)}
    try:
        structure = [map_term(c.structure[old], new.__getitem__) for old in states]
    except KeyError as e:
        raise ValueError(f"state set is not closed: successor {e.args[0]} missing") from None
    sub = Coalgebra.trusted(c.functor, structure)
    return sub, Hom(sub, c, tuple(states))


def reachable_states(c: Coalgebra, point: int, order=None) -> list[int]:
    """BFS discovery order from ``point``; successors are visited in ascending
    state index unless ``order`` supplies a sort key."""
    seen = {point}
    out = [point]
    queue = deque([point])
    while queue:
        x = queue.popleft()
        succ = support(c.structure[x])
        for y in sorted(succ, key=order) if order else sorted(succ):
            if y not in seen:
                seen.add(y)
                out.append(y)
                queue.append(y)
    return out


def reachable_part(pc: PointedCoalgebra) -> tuple[PointedCoalgebra, Hom]:
    states = reachable_states(pc.base, pc.point)
    sub, emb = induced_subcoalgebra(pc.base, states)
    return PointedCoalgebra(sub, 0), emb


def quotient_by(c: Coalgebra, blocks: Sequence[int]) -> tuple[Coalgebra, Hom]:
    """Quotient along a stable partition given as block indices ``0..k-1``."""
    count = max(blocks) + 1 if blocks else 0
    rep = [-1] * count
    for x, b in enumerate(blocks):
        if rep[b] < 0:
            rep[b] = x
    q = Coalgebra.trusted(c.functor, [map_term(c.structure[x], blocks) for x in rep])
    return q, Hom(c, q, tuple(blocks))


def refine(c: Coalgebra, blocks: Sequence[int] | None = None) -> Partition:
    """Coarsest stable partition finer than ``blocks`` (default: one block).

    Each round splits blocks by the signature ``alpha(x)`` with states
    replaced by their current block; blocks are numbered by first occurrence.
    """
    n = c.n
    if blocks is None:
        blocks = [0] * n
    blocks = list(blocks)
    count = len(set(blocks))
    while True:
        sigs: dict = {}
        new = []
        for x in range(n):
            key = (blocks[x], term_key(map_term(c.structure[x], blocks)))
            new.append(sigs.setdefault(key, len(sigs)))
        if len(sigs) == count:
            return Partition(tuple(new), count)
        blocks, count = new, len(sigs)


def simple_quotient(c: Coalgebra) -> tuple[Coalgebra, Hom, Partition]:
    part = refine(c)
    q, h = quotient_by(c, part.blocks)
    return q, h, part


def behavior_codes(c: Coalgebra) -> list[int]:
    """Permutation-invariant state codes: iterate ``code(x) = rank of
    (code(x), alpha(x) over codes)`` until the number of classes is stable.

    On a simple coalgebra the final codes are pairwise distinct.
    """
    n = c.n
    codes = [0] * n
    count = 1 if n else 0
    while True:
        keys = [(codes[x], term_key(map_term(c.structure[x], codes))) for x in range(n)]
        distinct = sorted(set(keys))
        if len(distinct) == count:
            return codes
        rank = {k: i for i, k in enumerate(distinct)}
        codes = [rank[k] for k in keys]
        count = len(distinct)


def canonical_renumber(c: Coalgebra, point: int, codes: Sequence[int]) -> tuple[Coalgebra, list[int]]:
    """Renumber the part reachable from ``point`` by BFS, visiting successors
    in ascending code order. Returns the renumbered coalgebra (point = 0) and
    the old state of every new index."""
    order = reachable_states(c, point, order=codes.__getitem__)
    sub, _ = induced_subcoalgebra(c, order)
    return sub, order


def wp(pc: PointedCoalgebra) -> PointedCoalgebra:
    """Well-pointed modification: simple quotient, then the part reachable from
    the image of the point, in canonical numbering."""
    q, _, part = simple_quotient(pc.base)
    reach, _ = reachable_part(PointedCoalgebra(q, part.blocks[pc.point]))
    canon, _ = canonical_renumber(reach.base, 0, behavior_codes(reach.base))
    return PointedCoalgebra(canon, 0)


def permute(c: Coalgebra, perm: Sequence[int]) -> Coalgebra:
    """Relabel state ``x`` as ``perm[x]``."""
    structure: list = [None] * c.n
    for x in range(c.n):
        structure[perm[x]] = map_term(c.structure[x], perm)
    return Coalgebra.trusted(c.functor, structure)


# --------------------------------------------------------------------------
# file formats

AnyCoalgebra = Union[Coalgebra, PointedCoalgebra]


def _split(obj: AnyCoalgebra) -> tuple[Coalgebra, int | None]:
    if isinstance(obj, PointedCoalgebra):
        return obj.base, obj.point
    return obj, None


def dumps_text(obj: AnyCoalgebra) -> str:
    c, point = _split(obj)
    lines = [f"functor: {c.functor}", f"states: {c.n}"]
    if point is not None:
        lines.append(f"point: {point}")
    lines += [f"{x}: {render_term(t)}" for x, t in enumerate(c.structure)]
    return "\n".join(lines) + "\n"


def dumps_json(obj: AnyCoalgebra) -> str:
    c, point = _split(obj)
    data: dict = {"functor": str(c.functor), "states": c.n}
    if point is not None:
        data["point"] = point
    data["structure"] = [term_to_json(t) for t in c.structure]
    return json.dumps(data, indent=2) + "\n"


def _assemble(functor: FunctorExpr, n: int, point, terms: dict, where) -> AnyCoalgebra:
    missing = [x for x in range(n) if x not in terms]
    if missing:
        raise ParseError(f"no structure given for state {missing[0]}")
    try:
        c = Coalgebra(functor, n, tuple(terms[x] for x in range(n)))
    except TermTypeError as e:
        raise ParseError(str(e), line=where.get(getattr(e, "state", None))) from None
    if point is None:
        return c
    if not 0 <= point < n:
        raise ParseError(f"point {point} outside carrier of size {n}")
    return PointedCoalgebra(c, point)


def loads_text(text: str) -> AnyCoalgebra:
    header: dict = {}
    terms: dict = {}
    where: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise ParseError("expected 'key: value'", line=lineno)
        key, value = key.strip(), value.strip()
        if key in ("functor", "states", "point"):
            if key in header:
                raise ParseError(f"duplicate header {key!r}", line=lineno)
            try:
                header[key] = parse_functor(value) if key == "functor" else int(value)
            except ParseError as e:
                raise ParseError(f"bad functor: {e}", line=lineno) from None
            except ValueError:
                raise ParseError(f"{key} must be an integer", line=lineno) from None
        elif key.isdigit():
            x = int(key)
            if x in terms:
                raise ParseError(f"duplicate line for state {x}", line=lineno)
            if "states" in header and x >= header["states"]:
                raise ParseError(f"state {x} outside carrier", line=lineno)
            try:
                terms[x] = parse_term(value)
            except ParseError as e:
                raise ParseError(e.args[0].rsplit(" (", 1)[0], pos=e.pos, line=lineno) from None
            where[x] = lineno
        else:
            raise ParseError(f"unknown key {key!r}", line=lineno)
    for key in ("functor", "states"):
        if key not in header:
            raise ParseError(f"missing '{key}:' header")
    if any(x >= header["states"] for x in terms):
        raise ParseError("state outside carrier")
    return _assemble(header["functor"], header["states"], header.get("point"), terms, where)


def loads_json(text: str) -> AnyCoalgebra:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", pos=e.pos) from None
    if not isinstance(data, dict):
        raise ParseError("top-level JSON value must be an object")
    try:
        functor = parse_functor(data["functor"])
        n = int(data["states"])
        raw = data["structure"]
    except KeyError as e:
        raise ParseError(f"missing field {e.args[0]!r}") from None
    if len(raw) != n:
        raise ParseError(f"{n} states but {len(raw)} structure entries")
    terms = {x: term_from_json(t) for x, t in enumerate(raw)}
    return _assemble(functor, n, data.get("point"), terms, {})


def loads(text: str) -> AnyCoalgebra:
    """Read either format; JSON is recognized by a leading ``{``."""
    return loads_json(text) if text.lstrip().startswith("{") else loads_text(text)


__all__ = [
    "Coalgebra", "PointedCoalgebra", "Hom", "Partition",
    "check_homomorphism", "canonical_graph", "induced_subcoalgebra",
    "reachable_states", "reachable_part", "quotient_by", "refine",
    "simple_quotient", "behavior_codes", "canonical_renumber", "wp", "permute",
    "dumps_text", "dumps_json", "loads_text", "loads_json", "loads",
]
