from __future__ import annotations

import itertools
import random

import pytest

from finehier.category import (CategoryError, SubspaceView, category_image, check_baire,
                               check_preservation, good_maps, is_meager, is_nowhere_dense,
                               pushforward)
from finehier.families import KPartition, TFamily, determine, trivial_family
from finehier.hierarchy import MEMBER, NON_MEMBER, search_witness
from finehier.spaces import (Cylinder, FinitePoset, SpaceMap, enumerate_posets,
                             identity_map, sierpinski)
from finehier.trees import BaseLabel, Node, chain, leaf

S = sierpinski()
POINT = FinitePoset(("*",))
TO_POINT = SpaceMap(S, POINT, {"bot": "*", "top": "*"})
CHAIN3 = FinitePoset(("a", "b", "c"), frozenset({("a", "b"), ("a", "c"), ("b", "c")}))
COLLAPSE = SpaceMap(CHAIN3, S, {"a": "bot", "b": "top", "c": "top"})


def _maximal(X, C):
    return {x for x in C if not any(y != x and X.leq(x, y) for y in C)}


def test_meager_examples_on_sierpinski():
    assert is_nowhere_dense({"bot"}, S) and is_meager({"bot"}, S)
    assert not is_nowhere_dense({"top"}, S) and not is_meager({"top"}, S)
    assert is_meager(set(), S)
    assert not is_meager({"bot", "top"}, S)


def test_meager_matches_maximal_point_rule():
    for X in enumerate_posets(4):
        pts = X.points
        for r in range(1, len(pts) + 1):
            for C in itertools.combinations(pts, r):
                V = SubspaceView(X, frozenset(C))
                top = _maximal(X, C)
                for m in range(len(C) + 1):
                    for Sub in itertools.combinations(C, m):
                        assert is_meager(set(Sub), V) == (not top & set(Sub))


def test_nowhere_dense_needs_subset():
    with pytest.raises(CategoryError):
        is_nowhere_dense({"top"}, SubspaceView(S, frozenset({"bot"})))


def test_cylinder_is_rejected():
    C = Cylinder(2, 1)
    with pytest.raises(CategoryError):
        SubspaceView(C, frozenset(C.points))
    f = SpaceMap(C, C, {x: x for x in C.points})
    with pytest.raises(CategoryError):
        category_image(f, C.set({"0"}))


def test_category_image_examples():
    ident = identity_map(S)
    for s in ({"bot"}, {"top"}, set(), {"bot", "top"}):
        assert category_image(ident, S.set(s)) == S.set(s)
    assert category_image(TO_POINT, S.set({"bot"})) == POINT.set(set())
    assert TO_POINT.image(S.set({"bot"})) == POINT.set({"*"})
    assert category_image(TO_POINT, S.set({"top"})) == POINT.set({"*"})


def test_category_image_laws():
    for X in enumerate_posets(3):
        for Y in enumerate_posets(2):
            for f in good_maps(X, Y):
                subsets = X.subsets()
                for a in subsets:
                    A = X.set(a)
                    img = category_image(f, A)
                    assert img.points <= f.image(A).points
                    for b in subsets:
                        B = X.set(b)
                        if a <= b:
                            assert img.points <= category_image(f, B).points
                        assert category_image(f, A | B) == img | category_image(f, B)


def test_check_baire_examples():
    assert check_baire(identity_map(S), 0).ok
    assert check_baire(COLLAPSE, 0).ok
    assert check_baire(COLLAPSE, 1).ok
    r = check_baire(COLLAPSE, 0, samples=2, seed=1)
    assert r.ok and r.checked_images == 2
    bad = SpaceMap(S, S, {"bot": "top", "top": "bot"})
    with pytest.raises(CategoryError):
        check_baire(bad, 0)


def test_pushforward_identity_and_constant():
    F = TFamily.build(chain([0, 1, 0]), CHAIN3, {((0,),): CHAIN3.up("b"), ((0, 0),): CHAIN3.up("c")})
    assert pushforward(identity_map(CHAIN3), F) == F
    G = pushforward(COLLAPSE, trivial_family(leaf(1), CHAIN3))
    assert G == trivial_family(leaf(1), S)
    assert determine(G).partition == KPartition.constant(S, 1)


def test_pushforward_determines_the_codomain_partition():
    rng = random.Random(7)
    shapes = [chain([0, 1]), chain([1, 0, 1]), Node(BaseLabel(0), (leaf(1), chain([1, 0]))),
              Node(chain([0, 1]), (leaf(1),))]
    checked = 0
    posets = enumerate_posets(4)
    for _ in range(300):
        X = rng.choice(posets)
        Y = rng.choice(enumerate_posets(rng.randint(1, 3)))
        maps = list(good_maps(X, Y))
        if not maps:
            continue
        f = rng.choice(maps)
        A = KPartition(Y, {y: rng.randrange(2) for y in Y.points})
        T = rng.choice(shapes)
        r = search_witness(A.compose(f), T)
        if not r.is_member:
            continue
        G = pushforward(f, r.witness)
        d = determine(G)
        assert d.ok and d.partition == A
        checked += 1
    assert checked > 50


def test_pushforward_checks_its_inputs():
    F = trivial_family(leaf(0), S)
    with pytest.raises(CategoryError):
        pushforward(COLLAPSE, F)


def test_preservation_examples():
    A = KPartition(S, {"bot": 0, "top": 1})
    r = check_preservation(COLLAPSE, A, chain([0, 1]))
    assert r.codomain.status == MEMBER and r.domain.status == MEMBER
    assert r.pushed_verifies and r.pulled_verifies and r.holds
    r = check_preservation(COLLAPSE, A, leaf(0))
    assert r.codomain.status == NON_MEMBER and r.domain.status == NON_MEMBER and r.holds
    r = check_preservation(identity_map(S), A, chain([1, 0]))
    assert r.decided and r.holds and not r.codomain.is_member


def test_preservation_rejects_bad_maps():
    f = SpaceMap(S, CHAIN3, {"bot": "a", "top": "b"})
    with pytest.raises(CategoryError):
        check_preservation(f, KPartition.constant(CHAIN3, 0), leaf(0))


def test_good_maps_are_continuous_open_surjections():
    maps = list(good_maps(CHAIN3, S))
    assert COLLAPSE in maps
    assert all(set(f.graph.values()) == set(S.points) for f in maps)
