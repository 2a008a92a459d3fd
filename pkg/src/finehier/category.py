"""Baire category on finite posets and the category image f[S].

In a finite space a set is meager iff each of its points is nowhere dense
(meager sets are finite unions of nowhere dense sets, and subsets of
nowhere dense sets are nowhere dense).  In a subspace C of an Alexandrov
space, {x} is nowhere dense iff x is not maximal in C, so S is meager in C
iff S contains no maximal point of C.  The functions below use the
definitions directly; that characterization serves as a test oracle.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional

from .families import KPartition, TFamily, all_paths, pullback, tilde
from .hierarchy import (DEFAULT_BUDGET, MembershipResult, search_witness,
                        verify_membership)
from .spaces import (Base, Cylinder, FinitePoset, SetRep, SpaceMap, is_continuous,
                     is_open_map, is_surjection, level_member)
from .trees import IterTree


class CategoryError(ValueError):
    pass


@dataclass(frozen=True)
class SubspaceView:
    ambient: FinitePoset
    carrier: FrozenSet

    def __post_init__(self) -> None:
        if isinstance(self.ambient, Cylinder) or not isinstance(self.ambient, FinitePoset):
            raise CategoryError("category operations need a finite poset")
        object.__setattr__(self, "carrier", frozenset(self.carrier))

    def interior(self, S: FrozenSet) -> FrozenSet:
        X = self.ambient
        return frozenset(x for x in S if X.up(x) & self.carrier <= S)

    def closure(self, S: FrozenSet) -> FrozenSet:
        return self.ambient.downclosure(S) & self.carrier


def _view(V) -> SubspaceView:
    if isinstance(V, SubspaceView):
        return V
    if isinstance(V, SetRep):
        return SubspaceView(V.space, V.points)
    return SubspaceView(V, V._all)


def _points(S) -> FrozenSet:
    return S.points if isinstance(S, SetRep) else frozenset(S)


def is_nowhere_dense(S, V) -> bool:
    V = _view(V)
    pts = _points(S)
    if not pts <= V.carrier:
        raise CategoryError("set is not inside the subspace")
    return not V.interior(V.closure(pts))


def is_meager(S, V) -> bool:
    V = _view(V)
    return all(is_nowhere_dense({x}, V) for x in _points(S))


def _require_poset_map(f: SpaceMap) -> None:
    for X in (f.domain, f.codomain):
        if not isinstance(X, FinitePoset):
            raise CategoryError("category operations need finite posets on both sides")


def category_image(f: SpaceMap, S: SetRep) -> SetRep:
    """Points y whose fiber meets S in a non-meager set."""
    _require_poset_map(f)
    out = []
    for y in f.codomain.points:
        fiber = f.fiber(y)
        if fiber and not is_meager(S.points & fiber, SubspaceView(f.domain, fiber)):
            out.append(y)
    return SetRep(f.codomain, frozenset(out))


def _require_good_map(f: SpaceMap) -> None:
    _require_poset_map(f)
    missing = [name for name, ok in (("continuous", is_continuous(f)),
                                     ("open", is_open_map(f)),
                                     ("surjective", is_surjection(f))) if not ok]
    if missing:
        raise CategoryError("map is not " + ", ".join(missing))


# -- level preservation -----------------------------------------------------

@dataclass
class BaireReport:
    checked_images: int = 0
    checked_preimages: int = 0
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_baire(f: SpaceMap, n: int, samples: Optional[int] = None,
                seed: int = 0) -> BaireReport:
    """f[S] stays in level n for S in level n, and f^-1(A) is in level n iff A is.

    All sets of the domain are checked when ``samples`` is None, otherwise a
    seeded random sample of that many.
    """
    _require_good_map(f)
    X, Y = f.domain, f.codomain
    report = BaireReport()
    sets = [s for s in X.subsets() if level_member(SetRep(X, s), n)]
    if samples is not None and samples < len(sets):
        sets = random.Random(seed).sample(sets, samples)
    for s in sets:
        S = SetRep(X, s)
        img = category_image(f, S)
        report.checked_images += 1
        if not img.points <= f.image(S).points:
            report.violations.append(f"f[{S}] = {img} is not inside f({S})")
        if not level_member(img, n):
            report.violations.append(f"f[{S}] = {img} leaves level {n}")
    for a in Y.subsets():
        A = SetRep(Y, a)
        report.checked_preimages += 1
        if level_member(f.preimage(A), n) != level_member(A, n):
            report.violations.append(f"preimage of {A} disagrees on level {n}")
    return report


def pushforward(f: SpaceMap, F: TFamily) -> TFamily:
    """Layer-wise category image of a family over ``f``'s domain.

    Layer 0 takes f[U] for each set.  A nested layer is pushed forward and
    then cut down to the new parent component (its root becoming that
    component), since that component can be smaller than the image of the
    old one.
    """
    _require_good_map(f)
    if F.space != f.domain:
        raise CategoryError("family does not live on the map's domain")
    if F.base.shift or F.base.restriction is not None:
        raise CategoryError("pushforward expects a family over the unshifted base")
    Y = f.codomain
    out: Dict = {}
    for p in all_paths(F.shape):
        prefix = p[:-1]
        if not prefix:
            out[p] = category_image(f, F.sets[p])
            continue
        comp = _tilde_of(out, prefix)
        out[p] = comp if p[-1] == () else category_image(f, F.sets[p]) & comp
    G = TFamily(F.shape, Base(Y), out, F.k)
    for p in all_paths(F.shape):
        if not tilde(G, p) <= category_image(f, tilde(F, p)):
            raise AssertionError(f"component inclusion fails at {p}")
    return G


def _tilde_of(sets, path) -> SetRep:
    out = sets[path]
    for q, S in sets.items():
        if len(q) == len(path) and q[:-1] == path[:-1] and len(q[-1]) > len(path[-1]) \
                and q[-1][:len(path[-1])] == path[-1]:
            out = out - S
    return out


# -- preservation along open surjections ----------------------------------

@dataclass
class PreservationReport:
    codomain: MembershipResult
    domain: MembershipResult
    pushed_verifies: Optional[bool] = None
    pulled_verifies: Optional[bool] = None

    @property
    def decided(self) -> bool:
        return self.codomain.decided and self.domain.decided

    @property
    def holds(self) -> bool:
        if not self.decided:
            return True
        return (self.codomain.is_member == self.domain.is_member
                and self.pushed_verifies is not False and self.pulled_verifies is not False)


def check_preservation(f: SpaceMap, A: KPartition, T: IterTree,
                       budget: int = DEFAULT_BUDGET, cache: Optional[dict] = None
                       ) -> PreservationReport:
    """Search both sides of ``A in Sigma(Y, T) iff A o f in Sigma(X, T)``.

    Witnesses are carried across constructively: a domain witness is pushed
    forward and a codomain witness pulled back, and each must verify.
    ``cache`` may be shared between calls to reuse search results.
    """
    _require_good_map(f)
    if A.space != f.codomain:
        raise CategoryError("partition does not live on the map's codomain")
    B = A.compose(f)

    def search(P: KPartition) -> MembershipResult:
        if cache is None:
            return search_witness(P, T, budget)
        key = (P, T)
        if key not in cache:
            cache[key] = search_witness(P, T, budget)
        return cache[key]

    rc, rd = search(A), search(B)
    report = PreservationReport(rc, rd)
    if rd.is_member:
        report.pushed_verifies = verify_membership(A, T, pushforward(f, rd.witness))
    if rc.is_member:
        report.pulled_verifies = verify_membership(B, T, pullback(f, rc.witness))
    return report


def good_maps(X: FinitePoset, Y: FinitePoset):
    """Every continuous open surjection from X onto Y."""
    for values in itertools.product(Y.points, repeat=len(X.points)):
        if set(values) != set(Y.points):
            continue
        f = SpaceMap(X, Y, dict(zip(X.points, values)))
        if is_continuous(f) and is_open_map(f):
            yield f
