from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from finehier.checks import random_monotone_family, random_tree
from finehier.families import (FamilyError, KPartition, NotContinuous, TFamily, all_paths,
                               determine, evaluate, format_family, format_partition, is_monotone,
                               is_reduced, is_valid, monotonize, parse_family, parse_partition,
                               parse_path, problems, pullback, reduce_family, terminating_paths,
                               tilde, trivial_family)
from finehier.spaces import (Base, Cylinder, FinitePoset, NoReduction, SpaceFormatError,
                             SpaceMap, all_maps, enumerate_posets, is_continuous,
                             is_surjection, sierpinski)
from finehier.trees import BaseLabel, Node, chain, leaf

C2 = Cylinder(2, 2)
S = sierpinski()
LAMBDA = FinitePoset(("a", "b", "c"), frozenset({("a", "c"), ("b", "c")}))


def chain_family():
    return TFamily.build(chain([1, 0]), C2, {((0,),): C2.cylinder("0")})


def test_tilde_examples():
    F = chain_family()
    assert tilde(F, ((0,),)) == C2.cylinder("0")
    assert tilde(F, ((),)) == C2.whole - C2.cylinder("0")
    with pytest.raises(FamilyError):
        tilde(F, ((5,),))


def test_paths_of_nested_shape():
    shape = Node(chain([0, 1]), (Node(BaseLabel(1)),))
    assert all_paths(shape) == [((),), ((0,),), ((), ()), ((), (0,))]
    assert terminating_paths(shape) == [((0,),), ((), ()), ((), (0,))]


def _random_monotone(seed, d=2, level=1):
    rng = random.Random(seed)
    shape = random_tree(rng, 3, level, 4)
    if isinstance(shape, BaseLabel):
        shape = Node(shape)
    return random_monotone_family(rng, shape, Cylinder(2, d))


def _random_arbitrary(seed, d=2, level=1):
    """Valid but generally non-monotone family on a cylinder."""
    rng = random.Random(seed)
    X = Cylinder(2, d)
    shape = random_tree(rng, 3, level, 4)
    if isinstance(shape, BaseLabel):
        shape = Node(shape)
    out = {}
    for p in all_paths(shape):
        if p[-1] == ():
            if len(p) == 1:
                out[p] = X.whole
            else:
                comp = out[p[:-1]]
                for q, s in out.items():
                    if len(q) == len(p) - 1 and q[:-1] == p[:-2] and \
                            q[-1][:len(p[-2])] == p[-2] and len(q[-1]) > len(p[-2]):
                        comp = comp - s
                out[p] = comp
        else:
            root = out[p[:-1] + ((),)]
            out[p] = X.set(x for x in root.points if rng.random() < 0.5)
    return TFamily(shape, Base(X), out)


seeds = st.integers(0, 10 ** 6)


@given(seeds)
def test_union_of_components_is_union_of_sets(seed):
    F = _random_monotone(seed)
    layer = [p for p in F.sets if len(p) == 1]
    union = frozenset().union(*(F.sets[p].points for p in layer))
    assert frozenset().union(*(tilde(F, p).points for p in layer)) == union


@given(seeds)
def test_components_below_each_other_are_disjoint(seed):
    F = _random_arbitrary(seed, level=2)
    for p in F.sets:
        for q in F.sets:
            if len(p) == len(q) and p[:-1] == q[:-1] and len(q[-1]) > len(p[-1]) \
                    and q[-1][:len(p[-1])] == p[-1]:
                assert not (tilde(F, p).points & tilde(F, q).points)


def test_random_families_are_valid():
    for seed in range(50):
        assert problems(_random_monotone(seed, level=2)) == []
        assert problems(_random_arbitrary(seed, level=2)) == []


@given(seeds)
def test_monotonize_keeps_components(seed):
    F = _random_arbitrary(seed, level=2)
    G = monotonize(F)
    assert is_monotone(G)
    for p in F.sets:
        assert tilde(F, p) == tilde(G, p)


def test_monotonize_is_idempotent_on_monotone_families():
    for seed in range(20):
        F = _random_monotone(seed)
        assert monotonize(F) == F
    F = chain_family()
    assert monotonize(F) == F


def test_is_reduced_examples():
    assert is_reduced(TFamily.build(leaf(0), C2, {}))
    shape = Node(BaseLabel(0), (leaf(1), leaf(2)))
    F = TFamily.build(shape, C2, {((0,),): C2.cylinder("0"), ((1,),): C2.from_generators(["00", "1"])})
    assert not is_reduced(F)
    assert is_reduced(reduce_family(F))


def test_reduce_overlapping_siblings():
    shape = Node(BaseLabel(0), (leaf(1), leaf(1)))
    F = TFamily.build(shape, C2, {((0,),): C2.cylinder("0"), ((1,),): C2.from_generators(["00", "1"])})
    G = reduce_family(F)
    V0, V1 = G.sets[((0,),)], G.sets[((1,),)]
    assert not (V0.points & V1.points)
    assert V0 | V1 == F.sets[((0,),)] | F.sets[((1,),)]
    assert V0 == C2.cylinder("0") and V1 == C2.cylinder("1")
    assert determine(G).partition == determine(F).partition


def test_reduce_leaves_reduced_families_alone():
    F = chain_family()
    assert reduce_family(F) == F


def test_reduce_needs_reducible_level():
    shape = Node(BaseLabel(0), (leaf(1), leaf(1)))
    F = TFamily.build(shape, LAMBDA, {((0,),): LAMBDA.up("a"), ((1,),): LAMBDA.up("b")})
    assert is_valid(F)
    with pytest.raises(NoReduction) as info:
        reduce_family(F)
    assert info.value.point == "c"


def test_reduce_nested_layers():
    inner = Node(BaseLabel(1), (Node(BaseLabel(2), (leaf(1),)),))
    shape = Node(BaseLabel(0), (Node(inner),))
    X = Cylinder(2, 2)
    F = TFamily.build(shape, X, {
        ((0,),): X.cylinder("1"),
        ((0,), (0,)): X.from_generators(["10", "11"]),
        ((0,), (0, 0)): X.cylinder("11"),
    })
    G = reduce_family(F)
    assert is_reduced(G)
    assert determine(G).partition == determine(F).partition


@given(seeds, st.integers(1, 3), st.integers(1, 2))
@settings(max_examples=60)
def test_reduct_properties(seed, d, level):
    F = _random_arbitrary(seed, d, level)
    G = reduce_family(F)
    assert is_reduced(G) and problems(G) == []
    for p in terminating_paths(F.shape):
        assert tilde(G, p) <= tilde(F, p)
    dF, dG = determine(F), determine(G)
    assert dG.ok
    if dF.ok:
        assert dF.partition == dG.partition
    for x in G.space.points:
        assert sum(x in tilde(G, p) for p in terminating_paths(G.shape)) == 1


def test_determine_examples():
    const = trivial_family(BaseLabel(2), C2)
    assert determine(const).partition == KPartition.constant(C2, 2, 3)
    single = TFamily.build(leaf(2), C2, {})
    assert determine(single).partition.values == {x: 2 for x in C2.points}
    A = determine(chain_family()).partition
    assert A.values == {"00": 0, "01": 0, "10": 1, "11": 1}


def test_determine_reports_conflict():
    shape = Node(BaseLabel(0), (leaf(1), leaf(2)))
    F = TFamily.build(shape, C2, {((0,),): C2.cylinder("0"), ((1,),): C2.cylinder("00")})
    d = determine(F)
    assert not d.ok
    assert d.point == "00" and d.labels == {1, 2}
    e = evaluate(F, "00")
    assert e.conflict and e.labels == {1, 2} and e.value is None


@given(seeds, st.integers(1, 2))
def test_evaluate_agrees_with_determine(seed, level):
    F = _random_arbitrary(seed, 2, level)
    d = determine(F)
    for x in F.space.points:
        e = evaluate(F, x)
        assert e.labels
        if d.ok:
            assert e.value == d.partition(x)


def test_validation_errors():
    F = TFamily(chain([0, 1]), Base(S), {((),): S.whole, ((0,),): S.set({"bot"})})
    assert any("level 0" in p for p in problems(F))
    G = TFamily(chain([0, 1]), Base(S), {((),): S.set({"top"}), ((0,),): S.set({"top"})})
    assert any("root" in p for p in problems(G))
    H = TFamily(chain([0, 1]), Base(S), {((),): S.whole})
    assert any("missing" in p for p in problems(H))
    inner = chain([0, 1])
    shape = Node(BaseLabel(1), (Node(inner),))
    X = Cylinder(2, 1)
    K = TFamily(shape, Base(X), {((),): X.whole, ((0,),): X.cylinder("0"),
                                 ((0,), ()): X.cylinder("0"), ((0,), (0,)): X.cylinder("1")})
    assert any("leaves its parent" in p for p in problems(K))
    M = TFamily(Node(BaseLabel(0), (chain([1, 0]),)), Base(X),
                {((),): X.whole, ((0,),): X.cylinder("0"), ((0, 0),): X.whole})
    assert is_valid(M) and not is_monotone(M)


def test_nested_layers_accept_any_subset():
    # below a component, every subset is in level 0 of the shifted base
    shape = Node(chain([0, 1]))
    F = TFamily.build(shape, S, {((), (0,)): S.set({"bot"})})
    assert is_valid(F)
    assert determine(F).partition.values == {"bot": 1, "top": 0}


def test_pullback_examples():
    F = chain_family()
    ident = SpaceMap(C2, C2, {x: x for x in C2.points})
    assert pullback(ident, F) == F
    point = FinitePoset(("*",))
    G = TFamily.build(leaf(1), point, {})
    const = SpaceMap(S, point, {"bot": "*", "top": "*"})
    assert determine(pullback(const, G)).partition == KPartition.constant(S, 1)
    bad = SpaceMap(S, FinitePoset(("x", "y")), {"bot": "x", "top": "y"})
    with pytest.raises(NotContinuous):
        pullback(bad, TFamily.build(leaf(0), bad.codomain, {}))


def test_pullback_composes_partitions_on_small_posets():
    rng = random.Random(11)
    posets = enumerate_posets(3) + rng.sample(enumerate_posets(4), 5)
    shape = Node(BaseLabel(0), (Node(BaseLabel(1), (leaf(0),)),))
    checked = 0
    for X in posets:
        for Y in posets:
            for f in all_maps(X, Y):
                if not is_continuous(f) or not is_surjection(f):
                    continue
                opens = Y.open_sets()
                U1 = rng.choice(opens)
                U2 = rng.choice([o for o in opens if o <= U1])
                F = TFamily.build(shape, Y, {((0,),): U1, ((0, 0),): U2})
                G = pullback(f, F)
                assert is_valid(G)
                assert determine(G).partition == determine(F).partition.compose(f)
                checked += 1
    assert checked > 100


def test_family_format_round_trip():
    for seed in range(20):
        F = _random_arbitrary(seed, 2, 2)
        assert parse_family(format_family(F), F.space) == F
    text = "node(0; node(1))\n# comment\nr.0 => {top}\n"
    F = parse_family(text, S)
    assert F.sets[((0,),)] == S.set({"top"})
    assert parse_path("r/r.0.1") == ((), (0, 1))


@pytest.mark.parametrize("text", ["", "node(0; node(1))\nr.0 => {nowhere}",
                                  "node(0; node(1))\nq.0 => {top}", "node(0; node(1))\n",
                                  "node(0)\nr.3 => {top}"])
def test_family_format_errors(text):
    with pytest.raises(Exception) as info:
        parse_family(text, S)
    assert isinstance(info.value, (SpaceFormatError, ValueError))


def test_partition_format_and_checks():
    A = KPartition(S, {"bot": 0, "top": 1})
    assert parse_partition(format_partition(A), S) == A
    with pytest.raises(ValueError):
        KPartition(S, {"bot": 0})
    with pytest.raises(ValueError):
        KPartition(S, {"bot": 0, "top": 2}, 2)
