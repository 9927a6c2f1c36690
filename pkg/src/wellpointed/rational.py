"""Canonical forms of well-pointed coalgebras and the rational fixed point.

Every finite well-pointed coalgebra has a canonical numbering, and its text
rendering (the *digest*) identifies it up to isomorphism. Digests are the
elements of the rational fixed point at desk scale; :func:`a_plus` sends a state
to the digest of the well-pointed coalgebra it generates and
:func:`rho_structure` is the coalgebra structure on digests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

from .coalgebra import (
    Coalgebra,
    PointedCoalgebra,
    behavior_codes,
    canonical_renumber,
    reachable_states,
    refine,
    simple_quotient,
)
from .errors import EnumerationTooLarge, NotWellPointed
from .functor import (
    FunctorExpr,
    Term,
    cardinality,
    enumerate_terms,
    functor_of,
    map_term,
    render_term,
    support,
)
from .wellfounded import well_founded_part

DEFAULT_ENUM_LIMIT = 5_000_000


def digest(c: Coalgebra) -> str:
    """``functor|n|t0;t1;...`` in canonical term syntax."""
    return f"{c.functor}|{c.n}|" + ";".join(render_term(t) for t in c.structure)


@dataclass(frozen=True)
class CanonicalForm:
    coalg: PointedCoalgebra
    digest: str


@dataclass(frozen=True)
class RhoElement:
    form: CanonicalForm
    size: int
    well_founded: bool

    @property
    def digest(self) -> str:
        return self.form.digest


@dataclass(frozen=True)
class RhoTerm:
    """An element of ``H(T)`` where ``T`` is the set of digests: ``term``
    refers to ``labels[i]`` by ``@i``; labels are sorted, so equality of
    ``RhoTerm`` values is equality in ``H(T)``."""

    term: Term
    labels: tuple[str, ...]

    def render(self) -> str:
        return render_term(self.term, leaf=lambda i: "<" + self.labels[i] + ">")


def apply_digests(t: Term, digests: Sequence[str] | Mapping[int, str]) -> RhoTerm:
    """``H(d)(t)`` for a map ``d`` from states to digests."""
    labels = tuple(sorted({digests[y] for y in support(t)}))
    index = {d: i for i, d in enumerate(labels)}
    return RhoTerm(map_term(t, lambda y: index[digests[y]]), labels)


def _form(c: Coalgebra, point: int, codes: Sequence[int]) -> CanonicalForm:
    canon, _ = canonical_renumber(c, point, codes)
    return CanonicalForm(PointedCoalgebra(canon, 0), digest(canon))


def check_well_pointed(pc: PointedCoalgebra) -> None:
    reach = reachable_states(pc.base, pc.point)
    if len(reach) < pc.n:
        missing = min(set(range(pc.n)) - set(reach))
        raise NotWellPointed(
            f"state {missing} is not reachable from the point {pc.point}",
            "unreachable",
            frozenset(reach),
        )
    part = refine(pc.base)
    if not part.is_discrete:
        first: dict[int, int] = {}
        for x, b in enumerate(part.blocks):
            if b in first:
                raise NotWellPointed(
                    f"states {first[b]} and {x} are behaviorally equivalent",
                    "mergeable",
                    (first[b], x),
                )
            first[b] = x


def canonical_form(pc: PointedCoalgebra) -> CanonicalForm:
    check_well_pointed(pc)
    return _form(pc.base, pc.point, behavior_codes(pc.base))


def is_isomorphic(a: PointedCoalgebra, b: PointedCoalgebra) -> bool:
    return canonical_form(a).digest == canonical_form(b).digest


def isomorphism(a: PointedCoalgebra, b: PointedCoalgebra) -> tuple[int, ...] | None:
    """The unique isomorphism from ``a`` to ``b`` as a state map, or None."""
    check_well_pointed(a)
    check_well_pointed(b)
    fa, oa = canonical_renumber(a.base, a.point, behavior_codes(a.base))
    fb, ob = canonical_renumber(b.base, b.point, behavior_codes(b.base))
    if digest(fa) != digest(fb):
        return None
    m = [0] * a.n
    for new, old in enumerate(oa):
        m[old] = ob[new]
    return tuple(m)


def rho_element(pc: PointedCoalgebra) -> RhoElement:
    """The element of the rational fixed point generated by the point."""
    return a_plus(pc.base)[pc.point]


def a_plus(c: Coalgebra) -> list[RhoElement]:
    """``a_plus(c)[x]`` is the element for ``wp(c pointed at x)``.

    The simple quotient and its behavior codes are computed once; restricting
    the codes to a reachable part preserves their relative order, so the
    per-state canonical forms agree with running ``wp`` state by state.
    """
    q, _, part = simple_quotient(c)
    codes = behavior_codes(q)
    wf = well_founded_part(q).part
    elems = []
    for b in range(q.n):
        form = _form(q, b, codes)
        elems.append(RhoElement(form, form.coalg.n, b in wf))
    return [elems[part.blocks[x]] for x in range(c.n)]


def rho_structure(r: RhoElement) -> RhoTerm:
    """The structure map on the rational fixed point: the point's term with
    every state replaced by the digest of the element it generates.

    The canonical form is already simple, so only the successors of the
    point need their own canonical forms."""
    base = r.form.coalg.base
    t = base.structure[r.form.coalg.point]
    codes = behavior_codes(base)
    digests = {y: _form(base, y, codes).digest for y in support(t)}
    return apply_digests(t, digests)


def in_mu(r: RhoElement) -> bool:
    return r.well_founded


# --------------------------------------------------------------------------
# enumeration


def raw_enumeration_size(f: FunctorExpr, max_states: int) -> int:
    return sum(cardinality(f, m) ** m for m in range(1, max_states + 1))


def _bfs_ordered_structures(f: FunctorExpr, m: int):
    """Structure maps on ``m`` states whose BFS order from 0 (successors in
    ascending index) is ``0, 1, ..., m-1``. Every reachable pointed coalgebra
    is isomorphic to one of these."""
    terms = enumerate_terms(f, m)
    supports = [sorted(support(t)) for t in terms]
    chosen: list[Term] = []

    def go(i: int, next_new: int):
        if i == m:
            if next_new == m:
                yield tuple(chosen)
            return
        if i >= next_new:
            return
        for t, sup in zip(terms, supports):
            nn = next_new
            ok = True
            for y in sup:
                if y >= nn:
                    if y != nn:
                        ok = False
                        break
                    nn += 1
            if ok:
                chosen.append(t)
                yield from go(i + 1, nn)
                chosen.pop()

    yield from go(0, 1)


def enumerate_wp(
    f: FunctorExpr | str,
    max_states: int,
    only_well_founded: bool = False,
    *,
    limit: int = DEFAULT_ENUM_LIMIT,
    method: str = "bfs",
) -> list[RhoElement]:
    """All well-pointed coalgebras with at most ``max_states`` states, up to
    isomorphism, sorted by digest.

    ``method="exhaustive"`` applies ``wp`` to every structure map and every
    point; the default ``"bfs"`` visits only BFS-numbered reachable structures
    and keeps the simple ones, which yields the same set far faster.
    """
    f = functor_of(f)
    if raw_enumeration_size(f, max_states) > limit:
        raise EnumerationTooLarge(
            f"{raw_enumeration_size(f, max_states)} raw structure maps exceed the limit {limit}"
        )
    found: dict[str, RhoElement] = {}
    for m in range(1, max_states + 1):
        if method == "bfs":
            for structure in _bfs_ordered_structures(f, m):
                c = Coalgebra.trusted(f, structure)
                if not refine(c).is_discrete:
                    continue
                form = _form(c, 0, behavior_codes(c))
                if form.digest not in found:
                    wf = well_founded_part(c).is_well_founded
                    found[form.digest] = RhoElement(form, m, wf)
        elif method == "exhaustive":
            terms = enumerate_terms(f, m)
            for structure in itertools.product(terms, repeat=m):
                for e in a_plus(Coalgebra.trusted(f, structure)):
                    found.setdefault(e.digest, e)
        else:
            raise ValueError(f"unknown enumeration method {method!r}")
    out = sorted(found.values(), key=lambda e: e.digest)
    if only_well_founded:
        out = [e for e in out if e.well_founded]
    return out
