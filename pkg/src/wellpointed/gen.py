"""Random terms and coalgebras for property tests and benchmarks."""

from __future__ import annotations

import random

from .coalgebra import Coalgebra, PointedCoalgebra
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
    canonicalize_term,
    cardinality,
    map_term,
)


def random_term(f: FunctorExpr, n: int, rng: random.Random, max_set: int = 3) -> Term:
    """A random element of H(n); coproduct summands that are empty at ``n``
    are skipped. Raises ValueError if H(n) itself is empty."""
    if cardinality(f, n) == 0:
        raise ValueError(f"{f} has no elements over {n} states")
    if isinstance(f, Const):
        i = rng.randrange(len(f.carrier))
        return ConstVal(f.carrier[i], i)
    if isinstance(f, Id):
        return StateRef(rng.randrange(n))
    if isinstance(f, Prod):
        return Pair(random_term(f.left, n, rng, max_set), random_term(f.right, n, rng, max_set))
    if isinstance(f, Coprod):
        k = rng.choice([k for k, g in enumerate(f.summands) if cardinality(g, n) > 0])
        return Inj(k, random_term(f.summands[k], n, rng, max_set))
    if isinstance(f, Exp):
        return Tab(tuple((i, random_term(f.base, n, rng, max_set)) for i in f.index))
    if isinstance(f, Pow):
        if cardinality(f.inner, n) == 0:
            return SetOf(())
        size = rng.randint(0, max_set)
        return canonicalize_term(SetOf(tuple(random_term(f.inner, n, rng, max_set) for _ in range(size))))
    raise TypeError(f"not a functor expression: {f!r}")


def random_coalgebra(f: FunctorExpr, n: int, rng: random.Random, max_set: int = 3) -> Coalgebra:
    return Coalgebra.trusted(f, [random_term(f, n, rng, max_set) for _ in range(n)])


def random_pointed(
    f: FunctorExpr, rng: random.Random, max_states: int = 8, max_set: int = 3
) -> PointedCoalgebra:
    n = rng.randint(1, max_states)
    return PointedCoalgebra(random_coalgebra(f, n, rng, max_set), rng.randrange(n))


def random_permutation(n: int, rng: random.Random) -> list[int]:
    perm = list(range(n))
    rng.shuffle(perm)
    return perm


def random_dag_coalgebra(f: FunctorExpr, n: int, rng: random.Random, max_set: int = 3) -> Coalgebra:
    """A random well-founded coalgebra: state ``x`` only refers to states
    above ``x`` before a random relabelling. Needs ``H(0)`` nonempty."""
    structure = []
    for x in range(n):
        above = n - x - 1
        t = random_term(f, above, rng, max_set)
        structure.append(map_term(t, lambda y, x=x: x + 1 + y))
    perm = random_permutation(n, rng)
    relabeled: list = [None] * n
    for x in range(n):
        relabeled[perm[x]] = map_term(structure[x], perm)
    return Coalgebra.trusted(f, relabeled)
