import itertools

import pytest

from oracles import count_binary_trees_with_at_most
from wellpointed.coalgebra import (
    Coalgebra,
    Hom,
    PointedCoalgebra,
    check_homomorphism,
    loads,
    permute,
    reachable_part,
    refine,
    simple_quotient,
    wp,
)
from wellpointed.errors import EnumerationTooLarge, NotWellPointed
from wellpointed.functor import ConstVal, Inj, Pair, SetOf, StateRef, parse_functor, parse_term
from wellpointed.gen import random_coalgebra, random_permutation, random_pointed
from wellpointed.instances import Finite, Lasso, stream_to_coalgebra
from wellpointed.rational import (
    a_plus,
    apply_digests,
    canonical_form,
    digest,
    enumerate_wp,
    in_mu,
    is_isomorphic,
    isomorphism,
    rho_element,
    rho_structure,
)
from wellpointed.wellfounded import well_founded_part

GRAPH = parse_functor("P(Id)")


def pointed(functor, *terms, point=0):
    f = parse_functor(functor)
    return PointedCoalgebra(Coalgebra(f, len(terms), tuple(parse_term(t) for t in terms)), point)


OMEGA = pointed("P(Id)", "{@0}")
EMPTY = pointed("P(Id)", "{}")
TWO_CYCLE = pointed("P(Id)", "{@1}", "{@0}")


def test_omega_digest():
    assert canonical_form(OMEGA).digest == "P(Id)|1|{@0}"


def test_permutation_invariance(functor, rng):
    for _ in range(100):
        w = wp(random_pointed(functor, rng))
        perm = random_permutation(w.n, rng)
        moved = PointedCoalgebra(permute(w.base, perm), perm[w.point])
        assert canonical_form(moved).digest == canonical_form(w).digest
        assert is_isomorphic(w, moved)
        iso = isomorphism(moved, w)
        assert check_homomorphism(Hom(moved.base, w.base, iso))
        assert iso[moved.point] == w.point


def test_canonical_form_is_fixpoint(functor, rng):
    for _ in range(100):
        form = canonical_form(wp(random_pointed(functor, rng)))
        again = canonical_form(form.coalg)
        assert again.digest == form.digest
        assert again.coalg == form.coalg


def test_four_state_binary_system(samples):
    pc = loads((samples / "binary4.coalg").read_text())
    form = canonical_form(pc)
    assert form.coalg.n == 4
    assert form.digest == "Id*Id+{leaf}|4|inj 0 (@1,@2);inj 0 (@1,@1);inj 0 (@3,@2);inj 1 leaf"
    assert not in_mu(rho_element(pc))


def test_iso_examples():
    assert is_isomorphic(wp(TWO_CYCLE), OMEGA)
    assert not is_isomorphic(OMEGA, EMPTY)
    assert isomorphism(OMEGA, EMPTY) is None


def test_not_well_pointed_witnesses():
    with pytest.raises(NotWellPointed) as info:
        canonical_form(TWO_CYCLE)
    assert info.value.kind == "mergeable" and info.value.witness == (0, 1)
    unreachable = pointed("P(Id)", "{}", "{@0}")
    with pytest.raises(NotWellPointed) as info:
        canonical_form(unreachable)
    assert info.value.kind == "unreachable" and info.value.witness == frozenset({0})
    with pytest.raises(NotWellPointed):
        is_isomorphic(OMEGA, TWO_CYCLE)


def test_a_plus_on_well_pointed_is_canonical_form(functor, rng):
    for _ in range(100):
        w = wp(random_pointed(functor, rng))
        assert a_plus(w.base)[w.point].form == canonical_form(w)


def test_a_plus_matches_wp_statewise(functor, rng):
    for _ in range(50):
        c = random_coalgebra(functor, rng.randint(1, 7), rng)
        elems = a_plus(c)
        for x in range(c.n):
            w = wp(PointedCoalgebra(c, x))
            assert elems[x].digest == digest(w.base)
            assert elems[x].size == w.n
            assert elems[x].well_founded == well_founded_part(w.base).is_well_founded


def test_a_plus_naturality(functor, rng):
    for _ in range(100):
        c = random_coalgebra(functor, rng.randint(1, 8), rng)
        src = a_plus(c)
        q, h, _ = simple_quotient(c)
        tgt = a_plus(q)
        assert [e.digest for e in src] == [tgt[h.map[x]].digest for x in range(c.n)]
        sub, emb = reachable_part(PointedCoalgebra(c, rng.randrange(c.n)))
        inner = a_plus(sub.base)
        assert [e.digest for e in inner] == [src[emb.map[x]].digest for x in range(sub.n)]


def test_a_plus_injective_on_simple(functor, rng):
    for _ in range(100):
        q, _, _ = simple_quotient(random_coalgebra(functor, rng.randint(1, 8), rng))
        digests = [e.digest for e in a_plus(q)]
        assert len(set(digests)) == len(digests)


def test_finality_law(functor, rng):
    for _ in range(200):
        c = random_coalgebra(functor, rng.randint(1, 8), rng)
        elems = a_plus(c)
        digests = [e.digest for e in elems]
        for x in range(c.n):
            assert rho_structure(elems[x]) == apply_digests(c.structure[x], digests)


def test_rho_structure_examples():
    step = rho_structure(rho_element(OMEGA))
    assert step.term == SetOf((StateRef(0),)) and step.labels == ("P(Id)|1|{@0}",)
    assert step.render() == "{<P(Id)|1|{@0}>}"

    ab = rho_element(stream_to_coalgebra(Finite("ab")))
    tail = rho_element(stream_to_coalgebra(Finite("b"), alphabet=("a", "b")))
    step = rho_structure(ab)
    assert step.term == Inj(0, Pair(StateRef(0), ConstVal("a", 0)))
    assert step.labels == (tail.digest,)

    empty = rho_element(stream_to_coalgebra(Finite(""), alphabet=("a", "b")))
    assert rho_structure(empty).term == Inj(1, ConstVal("end", 0))


def test_in_mu_examples(samples):
    assert not in_mu(rho_element(OMEGA))
    assert in_mu(rho_element(loads((samples / "finite_tree.coalg").read_text())))
    assert not in_mu(rho_element(stream_to_coalgebra(Lasso("a", "b"))))
    assert in_mu(rho_element(stream_to_coalgebra(Finite("ab"))))


@pytest.mark.parametrize(
    "functor, k, mu, expected",
    [
        ("{*}", 3, False, 1),
        ("{0,1}", 3, False, 2),
        ("Id*Id+{leaf}", 1, True, 1),
        ("Id*Id+{leaf}", 2, True, 2),
        ("Id*Id+{leaf}", 3, True, 5),
        ("Id*Id+{leaf}", 3, False, 34),
        ("P(Id)", 3, False, 20),
        ("P(Id)", 4, True, 12),
    ],
)
def test_enumeration_counts(functor, k, mu, expected):
    assert len(enumerate_wp(functor, k, mu)) == expected


@pytest.mark.parametrize("k", [1, 2, 3])
def test_mu_counts_match_tree_oracle(k):
    assert len(enumerate_wp("Id*Id+{leaf}", k, True)) == count_binary_trees_with_at_most(k)


@pytest.mark.parametrize(
    "functor, k",
    [("P(Id)", 3), ("Id*Id+{leaf}", 2), ("Id*{a,b}+{end}", 2), ("Id^{a}*{0,1}", 3), ("P({a}*Id)", 2)],
)
def test_bfs_enumeration_matches_exhaustive(functor, k):
    fast = [e.digest for e in enumerate_wp(functor, k)]
    slow = [e.digest for e in enumerate_wp(functor, k, method="exhaustive")]
    assert fast == slow


def test_enumeration_sorted_and_mu_subset():
    for f in ["P(Id)", "Id*Id+{leaf}", "Id*{a,b}+{end}"]:
        everything = enumerate_wp(f, 3)
        digests = [e.digest for e in everything]
        assert digests == sorted(digests)
        mu = enumerate_wp(f, 3, True)
        assert {e.digest for e in mu} <= set(digests)
        assert all(e.well_founded for e in mu)
        for e in everything:
            assert e.well_founded == well_founded_part(e.form.coalg.base).is_well_founded
            assert refine(e.form.coalg.base).is_discrete


def test_enumeration_guard():
    with pytest.raises(EnumerationTooLarge):
        enumerate_wp("P({a,b}*Id)", 4)
    with pytest.raises(EnumerationTooLarge):
        enumerate_wp("P(Id)", 3, limit=10)


@pytest.mark.parametrize(
    "functor, max_n",
    [("P(Id)", 3), ("Id*Id+{leaf}", 3), ("Id*{a,b}+{end}", 3), ("Id^{a,b}*{0,1}", 2), ("P({a,b}*Id)", 2)],
)
def test_uniqueness_by_exhaustive_search(functor, max_n, rng):
    f = parse_functor(functor)
    table = {e.digest: rho_structure(e) for e in enumerate_wp(f, max_n)}
    candidates = list(table)
    checked = 0
    while checked < 4:
        pc = random_pointed(f, rng, max_states=max_n)
        w = wp(pc)
        c = w.base
        solutions = [
            m
            for m in itertools.product(candidates, repeat=c.n)
            if all(table[m[x]] == apply_digests(c.structure[x], m) for x in range(c.n))
        ]
        assert solutions == [tuple(e.digest for e in a_plus(c))]
        checked += 1
