from __future__ import annotations

import random

import pytest

from finehier.families import KPartition, TFamily, pullback, trivial_family
from finehier.hierarchy import (MEMBER, NON_MEMBER, UNKNOWN, PreconditionError, ShapeMismatch,
                                classify, cone_family, noncollapse_witness, search_witness,
                                verify_membership)
from finehier.oracles import brute_member_level1
from finehier.spaces import (Base, Cylinder, FinitePoset, all_maps, enumerate_posets, is_continuous,
                             sierpinski)
from finehier.trees import BaseLabel, Node, alternating_chain, chain, dual, leaf, nodes

S = sierpinski()
OPEN_TOP = KPartition(S, {"bot": 0, "top": 1})
OPEN_BOT = KPartition(S, {"bot": 1, "top": 0})


def _opens(X):
    return [o.points if hasattr(o, "points") else frozenset(o) for o in X.open_sets()]


def test_verify_constant_with_trivial_family():
    C = Cylinder(2, 2)
    A = KPartition.constant(C, 1, 3)
    assert verify_membership(A, BaseLabel(1), trivial_family(BaseLabel(1), C))
    assert verify_membership(A, leaf(1), trivial_family(leaf(1), C))


def test_verify_sierpinski_chain_and_dual():
    T = chain([0, 1])
    F = TFamily.build(T, S, {((0,),): S.set({"top"})})
    assert verify_membership(OPEN_TOP, T, F)
    G = TFamily.build(dual(T), S, {((0,),): S.set({"top"})})
    assert not verify_membership(OPEN_TOP, dual(T), G)
    with pytest.raises(ShapeMismatch):
        verify_membership(OPEN_TOP, dual(T), F)


def test_verify_rejects_invalid_family():
    T = chain([1, 0])
    F = TFamily(T, Base(S), {((),): S.whole, ((0,),): S.set({"bot"})})
    assert not verify_membership(OPEN_BOT, T, F)


def test_search_constant():
    A = KPartition.constant(S, 0)
    r = search_witness(A, BaseLabel(0))
    assert r.status == MEMBER and verify_membership(A, BaseLabel(0), r.witness)
    assert search_witness(A, BaseLabel(1)).status == NON_MEMBER


def test_search_sierpinski_open_partition():
    r = search_witness(OPEN_TOP, chain([0, 1]))
    assert r.status == MEMBER
    assert r.witness.sets[((0,),)] == S.set({"top"})
    assert search_witness(OPEN_TOP, leaf(0)).status == NON_MEMBER
    assert search_witness(OPEN_TOP, leaf(1)).status == NON_MEMBER


def test_search_sierpinski_closed_partition():
    assert search_witness(OPEN_BOT, chain([1, 0])).status == MEMBER
    r = search_witness(OPEN_BOT, chain([0, 1]))
    # frozen from the brute-force oracle over all open-set assignments
    assert r.status == NON_MEMBER
    assert not brute_member_level1(OPEN_BOT.values, _opens(S), chain([0, 1]))
    assert brute_member_level1(OPEN_BOT.values, _opens(S), chain([1, 0]))


def test_search_agrees_with_brute_force_on_small_posets():
    rng = random.Random(5)
    trees = [leaf(0), chain([0, 1]), chain([1, 0]), chain([0, 1, 0]), chain([1, 0, 1]),
             Node(BaseLabel(0), (leaf(1), leaf(1))), Node(BaseLabel(1), (leaf(0), chain([1, 0])))]
    for X in enumerate_posets(3):
        opens = _opens(X)
        for _ in range(4):
            A = KPartition(X, {x: rng.randrange(2) for x in X.points})
            for T in trees:
                r = search_witness(A, T)
                assert r.decided
                assert r.is_member == brute_member_level1(A.values, opens, T)
                if r.is_member:
                    assert verify_membership(A, T, r.witness)


def test_search_level_two_on_sierpinski():
    # a singleton tree labeled by chain [0,1] behaves like chain [0,1]
    T = Node(chain([0, 1]))
    r = search_witness(OPEN_TOP, T)
    assert r.status == MEMBER
    # in the second layer every subset is allowed, so the closed partition fits too
    assert search_witness(OPEN_BOT, T).status == MEMBER
    assert search_witness(OPEN_BOT, Node(chain([1, 1]))).status == NON_MEMBER


def test_budget_exhaustion_is_unknown():
    C = Cylinder(2, 3)
    A = KPartition(C, {x: int(x.count("1") % 2) for x in C.points})
    r = search_witness(A, alternating_chain(4), budget=3)
    assert r.status == UNKNOWN and not r.decided and r.witness is None


def test_classify_constant():
    A = KPartition.constant(S, 1)
    c = classify(A, [leaf(0), leaf(1), chain([0, 1]), chain([1, 0])])
    assert c.minimal == [leaf(1)]
    assert not c.violations


def test_classify_open_set_on_cylinder():
    C = Cylinder(2, 2)
    A = KPartition(C, {x: int(x.startswith("1")) for x in C.points})
    c = classify(A, [leaf(0), leaf(1), chain([0, 1]), chain([0, 1, 0]), chain([0, 1, 0, 1])])
    assert c.minimal == [chain([0, 1])]
    assert not c.violations


def test_classify_audit_on_sierpinski():
    cands = [leaf(0), leaf(1), chain([0, 1]), chain([1, 0]), chain([0, 1, 0]), chain([1, 0, 1])]
    for A in (OPEN_TOP, OPEN_BOT):
        c = classify(A, cands)
        assert not c.violations
        assert all(r.decided for _, r in c.results)
    assert classify(OPEN_TOP, cands).minimal == [chain([0, 1])]
    assert classify(OPEN_BOT, cands).minimal == [chain([1, 0])]


def test_noncollapse_examples():
    w = noncollapse_witness(chain([0, 1, 0]), chain([0, 1]))
    assert w.available and w.separates
    assert w.upper.status == MEMBER and w.lower.status == NON_MEMBER
    for T, U in ((chain([1, 0]), chain([0, 1])), (chain([0, 1]), chain([1, 0]))):
        assert noncollapse_witness(T, U).separates
    with pytest.raises(PreconditionError):
        noncollapse_witness(chain([0, 1]), chain([0, 1, 0]))


def test_noncollapse_alternating_chains():
    for n in range(1, 5):
        for start in (0, 1):
            w = noncollapse_witness(alternating_chain(n + 1, start), alternating_chain(n, start))
            assert w.separates
            opens = _opens(w.space)
            assert not brute_member_level1(w.partition.values, opens,
                                           alternating_chain(n, start))


def test_noncollapse_outside_fragment():
    w = noncollapse_witness(Node(chain([0, 1])), leaf(1))
    assert not w.available and w.reason


def test_cone_family_witnesses_tree_labels():
    T = Node(BaseLabel(0), (chain([1, 0]), leaf(1)))
    w = noncollapse_witness(T, chain([0, 1]))
    F = cone_family(T, w.space, w.partition.k)
    assert verify_membership(w.partition, T, F)


def test_pullback_of_witnesses():
    rng = random.Random(3)
    trees = [chain([0, 1]), chain([1, 0]), chain([0, 1, 0])]
    checked = 0
    for Y in enumerate_posets(3):
        for X in rng.sample(enumerate_posets(3), 3):
            for f in all_maps(X, Y):
                if not is_continuous(f):
                    continue
                A = KPartition(Y, {y: rng.randrange(2) for y in Y.points})
                for T in trees:
                    r = search_witness(A, T)
                    if r.is_member:
                        assert verify_membership(A.compose(f), T, pullback(f, r.witness))
                        checked += 1
    assert checked > 50


def test_member_witness_shapes():
    T = Node(BaseLabel(0), (leaf(1), chain([1, 0])))
    X = FinitePoset(("a", "b", "c"), frozenset({("a", "b")}))
    A = KPartition(X, {"a": 0, "b": 1, "c": 1})
    r = search_witness(A, T)
    assert r.is_member
    assert r.witness.shape == T
    assert set(p[0] for p in r.witness.sets) == {a for a, _ in nodes(T)}
