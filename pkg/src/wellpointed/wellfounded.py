"""Well-founded parts and recursive folds of finite coalgebras.

The next-time operator sends a state set ``S`` to the states all of whose
successors lie in ``S``. Iterating it from the empty set reaches its least
fixpoint, the well-founded part, in at most ``n`` rounds; the round at which a
state enters is its rank. A coalgebra is well-founded when that part is the
whole carrier, and then every algebra admits exactly one
coalgebra-to-algebra map, computed by :func:`fold`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Hashable, Iterable

from .coalgebra import Coalgebra
from .errors import FunctorMismatch, NotWellFounded
from .functor import (
    ConstVal,
    Inj,
    Pair,
    Pow,
    Id,
    SetOf,
    StateRef,
    Tab,
    Term,
    support,
)


@dataclass(frozen=True)
class WfReport:
    part: frozenset[int]
    rank: dict[int, int]
    rounds: int
    is_well_founded: bool


def next_time(c: Coalgebra, s: Iterable[int]) -> frozenset[int]:
    s = frozenset(s)
    return frozenset(x for x, t in enumerate(c.structure) if support(t) <= s)


def well_founded_part(c: Coalgebra) -> WfReport:
    succ = [support(t) for t in c.structure]
    part: set[int] = set()
    rank: dict[int, int] = {}
    rounds = 0
    while True:
        entering = [x for x in range(c.n) if x not in part and succ[x] <= part]
        if not entering:
            break
        for x in entering:
            rank[x] = rounds
        part.update(entering)
        rounds += 1
    return WfReport(frozenset(part), rank, rounds, len(part) == c.n)


# --------------------------------------------------------------------------
# folds


@dataclass(frozen=True)
class Val:
    """A previously computed fold result sitting where a state reference was."""

    value: Any


@dataclass(frozen=True)
class ValSet:
    """A set of plugged terms; equal members collapse, as in ``P(B)``."""

    elements: frozenset


def plug(t: Term, h: Callable[[int], Any]):
    """Replace every ``@y`` in ``t`` by ``Val(h(y))``.

    The result is an element of ``H(B)`` for the value set ``B``: pairs,
    injections and tables keep their shape, sets become :class:`ValSet`.
    """
    if isinstance(t, StateRef):
        return Val(h(t.index))
    if isinstance(t, ConstVal):
        return t
    if isinstance(t, Pair):
        return Pair(plug(t.left, h), plug(t.right, h))
    if isinstance(t, Inj):
        return Inj(t.tag, plug(t.payload, h))
    if isinstance(t, Tab):
        return Tab(tuple((k, plug(v, h)) for k, v in t.entries))
    if isinstance(t, SetOf):
        return ValSet(frozenset(plug(e, h) for e in t.elements))
    raise TypeError(f"not a term: {t!r}")


def child_values(p) -> list:
    """Values in a plugged term, left to right (sets in an arbitrary order)."""
    if isinstance(p, Val):
        return [p.value]
    if isinstance(p, ConstVal):
        return []
    if isinstance(p, Pair):
        return child_values(p.left) + child_values(p.right)
    if isinstance(p, Inj):
        return child_values(p.payload)
    if isinstance(p, Tab):
        return [v for _, x in p.entries for v in child_values(x)]
    if isinstance(p, ValSet):
        return [v for e in p.elements for v in child_values(e)]
    raise TypeError(f"not a plugged term: {p!r}")


@dataclass(frozen=True)
class AlgebraRule:
    """An algebra ``beta: H(B) -> B`` given as a function on plugged terms.

    ``accepts`` optionally restricts the functors the rule is defined for.
    """

    name: str
    evaluate: Callable[[Any], Hashable]
    accepts: Callable[[Any], bool] | None = None

    def __call__(self, plugged) -> Hashable:
        return self.evaluate(plugged)

    def check_functor(self, functor) -> None:
        if self.accepts is not None and not self.accepts(functor):
            raise FunctorMismatch(f"algebra {self.name!r} is not defined for {functor}")


def fold(c: Coalgebra, rule: AlgebraRule) -> dict[int, Any]:
    """The unique map ``h`` with ``h = rule . H(h) . alpha``, by ascending rank."""
    rule.check_functor(c.functor)
    report = well_founded_part(c)
    if not report.is_well_founded:
        bad = sorted(set(range(c.n)) - report.part)
        raise NotWellFounded(
            f"coalgebra is not well-founded; state {bad[0]} lies on or reaches a cycle", bad
        )
    h: dict[int, Any] = {}
    for x in sorted(range(c.n), key=lambda x: (report.rank[x], x)):
        h[x] = rule(plug(c.structure[x], h.__getitem__))
    return h


def fold_demand(c: Coalgebra, rule: AlgebraRule) -> dict[int, Any]:
    """Same map as :func:`fold`, computed on demand by depth-first recursion
    with memoization (explicit stack). Meeting a state that is still open
    means a cycle."""
    rule.check_functor(c.functor)
    h: dict[int, Any] = {}
    open_: set[int] = set()
    for root in range(c.n):
        stack = [root]
        while stack:
            x = stack[-1]
            if x in h:
                stack.pop()
            elif x not in open_:
                open_.add(x)
                for y in sorted(support(c.structure[x]), reverse=True):
                    if y in open_:
                        raise NotWellFounded(f"state {y} lies on a cycle", [y])
                    if y not in h:
                        stack.append(y)
            else:
                h[x] = rule(plug(c.structure[x], h.__getitem__))
                open_.discard(x)
                stack.pop()
    return h


def is_coalgebra_to_algebra(c: Coalgebra, rule: AlgebraRule, h) -> bool:
    """Check ``h(x) == rule(H(h)(alpha(x)))`` at every state."""
    return all(h[x] == rule(plug(c.structure[x], h.__getitem__)) for x in range(c.n))


# --------------------------------------------------------------------------
# built-in algebras


def _size(p) -> int:
    return 1 + sum(child_values(p))


def _depth(p) -> int:
    vals = child_values(p)
    return 1 + max(vals) if vals else 0


def _is_graph_functor(f) -> bool:
    return f == Pow(Id())


def _detector(p) -> int:
    if not isinstance(p, ValSet):
        raise TypeError("the detector algebra expects a set of values")
    vals = {e.value for e in p.elements}
    if vals <= {0}:
        return 0
    if 1 in vals:
        return 1
    return 2


SIZE = AlgebraRule("size", _size)
"""1 + the sum of the child values; for functors without sets this is the node
count of the tree expansion."""

DEPTH = AlgebraRule("depth", _depth)
"""Height of the tree expansion (a state without successors has depth 0)."""

DETECTOR = AlgebraRule("detector", _detector, _is_graph_functor)
"""Three-valued algebra on ``P({0,1,2})``: the empty set and ``{0}`` go to 0,
sets containing 1 go to 1, all others to 2. On a graph that is not
well-founded it admits at least two coalgebra-to-algebra maps."""


def detector_homomorphisms(c: Coalgebra) -> tuple[dict[int, int], dict[int, int]]:
    """The two maps into :data:`DETECTOR`: 0 on the well-founded part and 1
    (respectively 2) on states from which an infinite path starts."""
    part = well_founded_part(c).part
    h1 = {x: 0 if x in part else 1 for x in range(c.n)}
    h2 = {x: 0 if x in part else 2 for x in range(c.n)}
    return h1, h2


RULE_NAMES = ("expansion", "size", "depth", "detector", "hfset")


def builtin_rule(name: str, functor) -> AlgebraRule:
    """Look up a built-in algebra; ``expansion`` is specialized to ``functor``."""
    from .instances import HF_SET, expansion_algebra

    rules = {"size": SIZE, "depth": DEPTH, "detector": DETECTOR, "hfset": HF_SET}
    if name == "expansion":
        return expansion_algebra(functor)
    try:
        return rules[name]
    except KeyError:
        raise ValueError(f"unknown algebra {name!r}; choose from {', '.join(RULE_NAMES)}") from None
