"""Level membership: does some T-family determine a given partition?

``search_witness`` backtracks over monotone families.  Layer sets are drawn
from the base's level sets in canonical order and assigned children-first,
so a node's component is known as soon as its own set is chosen and can be
checked (or recursed into) immediately.  Restricting to monotone families
loses nothing: monotonizing keeps every component, and level-0 sets are
closed under finite unions.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .families import (KPartition, Path, TFamily, determine, format_address, problems)
from .spaces import Base, FinitePoset, SpaceModel
from .trees import BaseLabel, IterTree, Node, h_le, h_leq, iter_level, nodes

MEMBER = "member"
NON_MEMBER = "non_member_exhaustive"
UNKNOWN = "unknown_budget_exhausted"

DEFAULT_BUDGET = 2_000_000


class ShapeMismatch(ValueError):
    pass


class PreconditionError(ValueError):
    pass


class _OutOfBudget(Exception):
    pass


@dataclass
class MembershipResult:
    status: str
    witness: Optional[TFamily] = None
    examined: int = 0
    elapsed: float = 0.0

    @property
    def is_member(self) -> bool:
        return self.status == MEMBER

    @property
    def decided(self) -> bool:
        return self.status != UNKNOWN


def verify_membership(A: KPartition, T: IterTree, F: TFamily) -> bool:
    if F.shape != T:
        raise ShapeMismatch("family shape differs from the tree")
    if F.space != A.space or problems(F):
        return False
    d = determine(F)
    return d.ok and d.partition == A


# -- search -----------------------------------------------------------------

class _Search:
    def __init__(self, A: KPartition, budget: int) -> None:
        self.A = A
        self.budget = budget
        self.examined = 0
        self.memo: Dict[tuple, Optional[Dict[Path, FrozenSet]]] = {}
        self.parts = {i: A.part(i).points for i in range(A.k)}

    def tick(self) -> None:
        self.examined += 1
        if self.examined > self.budget:
            raise _OutOfBudget

    def family(self, tree: Node, base: Base, carrier: FrozenSet
               ) -> Optional[Dict[Path, FrozenSet]]:
        """Sets (relative paths) of a family over ``carrier`` determining A there."""
        key = (tree, carrier, min(base.shift, 1))
        if key not in self.memo:
            self.memo[key] = self._family(tree, base, carrier)
        return self.memo[key]

    def _family(self, tree: Node, base: Base, carrier: FrozenSet
                ) -> Optional[Dict[Path, FrozenSet]]:
        entries = list(nodes(tree))
        kids = {a: [a + (i,) for i in range(len(n.children))] for a, n in entries}
        # children before parents; the root is fixed to the carrier
        order = sorted((a for a, _ in entries if a), key=len, reverse=True)
        labels = {a: n.label for a, n in entries}
        candidates = base.level_sets(0, carrier)
        assigned: Dict[tuple, FrozenSet] = {}
        nested: Dict[tuple, Dict[Path, FrozenSet]] = {}

        def component_ok(a, U: FrozenSet) -> bool:
            below = frozenset().union(*(assigned[c] for c in kids[a]))
            comp = U - below
            lab = labels[a]
            if isinstance(lab, BaseLabel):
                return comp <= self.parts.get(lab.value, frozenset())
            found = self.family(lab, Base(base.space, base.shift + 1, comp), comp)
            if found is None:
                return False
            nested[a] = found
            return True

        def assign(i: int) -> bool:
            if i == len(order):
                return component_ok((), carrier)
            a = order[i]
            lower = frozenset().union(*(assigned[c] for c in kids[a]))
            for U in candidates:
                if not lower <= U:
                    continue
                self.tick()
                assigned[a] = U
                if component_ok(a, U) and assign(i + 1):
                    return True
                nested.pop(a, None)
            assigned.pop(a, None)
            return False

        if not assign(0):
            return None
        assigned[()] = carrier
        out: Dict[Path, FrozenSet] = {}
        for a, _ in entries:
            out[(a,)] = assigned[a]
            for p, S in nested.get(a, {}).items():
                out[(a,) + p] = S
        return out


def search_witness(A: KPartition, T: IterTree, budget: int = DEFAULT_BUDGET
                   ) -> MembershipResult:
    """Look for a T-family determining A; exhaustive unless the budget runs out."""
    start = time.perf_counter()
    X = A.space
    base = Base(X)
    if isinstance(T, BaseLabel):
        if all(v == T.value for v in A.values.values()):
            return MembershipResult(MEMBER, TFamily(T, base, {}, A.k), 0,
                                    time.perf_counter() - start)
        return MembershipResult(NON_MEMBER, None, 0, time.perf_counter() - start)
    s = _Search(A, budget)
    try:
        found = s.family(T, base, X._all)
    except _OutOfBudget:
        return MembershipResult(UNKNOWN, None, s.examined, time.perf_counter() - start)
    elapsed = time.perf_counter() - start
    if found is None:
        return MembershipResult(NON_MEMBER, None, s.examined, elapsed)
    F = TFamily(T, base, {p: X.set(S) for p, S in found.items()}, A.k)
    assert verify_membership(A, T, F), "search produced a non-verifying witness"
    return MembershipResult(MEMBER, F, s.examined, elapsed)


# -- classification ---------------------------------------------------------

@dataclass
class Classification:
    results: List[Tuple[IterTree, MembershipResult]]
    minimal: List[IterTree]
    violations: List[Tuple[IterTree, IterTree]] = field(default_factory=list)


def classify(A: KPartition, candidates: Sequence[IterTree],
             budget: int = DEFAULT_BUDGET) -> Classification:
    """Minimal member trees among the candidates, with an upward-closure audit.

    A violation is a decided pair ``T <=_h S`` with T a member and S not.
    """
    results = [(T, search_witness(A, T, budget)) for T in candidates]
    members = [T for T, r in results if r.is_member]
    minimal: List[IterTree] = []
    for T in members:
        if any(h_le(S, T) and not h_le(T, S) for S in members):
            continue
        if any(h_le(S, T) and h_le(T, S) for S in minimal):
            continue
        minimal.append(T)
    violations = [(T, S) for T, rt in results for S, rs in results
                  if rt.is_member and rs.status == NON_MEMBER and h_le(T, S)]
    return Classification(results, minimal, violations)


# -- non-collapse witnesses -------------------------------------------------

@dataclass
class NonCollapse:
    available: bool
    space: Optional[SpaceModel] = None
    partition: Optional[KPartition] = None
    upper: Optional[MembershipResult] = None
    lower: Optional[MembershipResult] = None
    reason: str = ""

    @property
    def separates(self) -> bool:
        return (self.available and self.upper.status == MEMBER
                and self.lower.status == NON_MEMBER)


def noncollapse_witness(T: IterTree, S: IterTree, budget: int = DEFAULT_BUDGET) -> NonCollapse:
    """A space and partition in Sigma(., T) but not in Sigma(., S).

    The space is T's own node set under the prefix order (opens are the
    sets closed under extension) and the partition reads off T's labels, so
    the cones of T form a witness for T.  Non-membership in S is certified
    by exhaustive search.  Only trees of level <= 1 are supported.
    """
    if h_leq(T, S)[0]:
        raise PreconditionError("T <=_h S, so no separating partition exists")
    if iter_level(T) > 1 or iter_level(S) > 1:
        return NonCollapse(False, reason="only trees of level <= 1 are supported")
    t = Node(T) if isinstance(T, BaseLabel) else T
    entries = list(nodes(t))
    names = {a: format_address(a) for a, _ in entries}
    X = FinitePoset(tuple(names.values()), frozenset(
        (names[a], names[b]) for a in names for b in names if b[:len(a)] == a))
    k = max(2, 1 + max(n.label.value for _, n in entries))
    A = KPartition(X, {format_address(a): n.label.value for a, n in entries}, k)
    upper = search_witness(A, T, budget)
    lower = search_witness(A, S, budget)
    return NonCollapse(True, X, A, upper, lower)


def cone_family(T: Node, X: FinitePoset, k: int) -> TFamily:
    """The family of cones ``{sigma : tau is a prefix of sigma}`` over T's node poset."""
    sets = {(a,): X.set(X.up(format_address(a))) for a, _ in nodes(T)}
    return TFamily(T, Base(X), sets, k)
