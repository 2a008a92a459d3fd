"""Cross-module property checks against the brute-force oracles.

Each ``check_*`` function takes its instance sizes as arguments and returns
a :class:`CheckResult`; the acceptance tests run them at full size and the
``selftest`` command at reduced size.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from . import oracles
from .category import category_image, check_preservation, good_maps
from .families import (KPartition, TFamily, all_paths, determine, is_reduced, problems,
                       reduce_family, terminating_paths, tilde)
from .hausdorff import (from_guess_table, hausdorff_extract, max_mind_changes,
                        random_guess_table)
from .hierarchy import noncollapse_witness
from .ordinals import OMEGA, ord_compare
from .spaces import Base, Cylinder, FinitePoset, SetRep, enumerate_posets, is_open
from .trees import (BaseLabel, IterTree, Node, alternating_chain, chain_rank,
                    enumerate_trees, h_leq, linearize, nodes)


@dataclass
class CheckResult:
    name: str
    passed: bool
    cases: int = 0
    failures: List[str] = field(default_factory=list)
    seconds: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        extra = f"; first failure: {self.failures[0]}" if self.failures else ""
        return f"{mark} {self.name}: {self.cases} cases in {self.seconds:.1f}s{extra}"


class _Recorder:
    def __init__(self, name: str) -> None:
        self.result = CheckResult(name, True)
        self.start = time.perf_counter()

    def case(self, ok: bool, describe=lambda: "") -> None:
        self.result.cases += 1
        if not ok:
            self.result.passed = False
            if len(self.result.failures) < 5:
                self.result.failures.append(describe())

    def done(self, time_limit: Optional[float] = None) -> CheckResult:
        self.result.seconds = time.perf_counter() - self.start
        if time_limit is not None and self.result.seconds > time_limit:
            self.result.passed = False
            self.result.failures.append(f"took {self.result.seconds:.1f}s, limit {time_limit}s")
        return self.result


# -- random instances -------------------------------------------------------

def random_tree(rng: random.Random, k: int, level: int, max_nodes: int) -> IterTree:
    """Random tree of the given level (labels of level < level)."""
    if level == 0:
        return BaseLabel(rng.randrange(k))
    n = rng.randint(1, max_nodes)
    parents = [None] + [rng.randrange(i) for i in range(1, n)]
    labels = [random_tree(rng, k, rng.randrange(level), max_nodes) for _ in range(n)]
    labels[0] = random_tree(rng, k, level - 1, max_nodes)

    def build(i: int) -> Node:
        return Node(labels[i], tuple(build(j) for j in range(n) if parents[j] == i))

    return build(0)


def random_monotone_family(rng: random.Random, shape: IterTree, X: Cylinder,
                           p_keep: float = 0.6) -> TFamily:
    """Random family with each set a random subset of its parent's set."""
    sets: Dict = {}

    def fill(prefix, tree: Node, carrier: frozenset) -> None:
        for a, n in nodes(tree):
            path = prefix + (a,)
            if not a:
                sets[path] = X.set(carrier)
            else:
                parent = sets[prefix + (a[:-1],)].points
                sets[path] = X.set(x for x in parent if rng.random() < p_keep)
        for a, n in nodes(tree):
            if isinstance(n.label, Node):
                comp = _tilde_points(sets, prefix + (a,))
                fill(prefix + (a,), n.label, comp)

    if isinstance(shape, Node):
        fill((), shape, X._all)
    return TFamily(shape, Base(X), sets)


def _tilde_points(sets, path) -> frozenset:
    out = sets[path].points
    for q, S in sets.items():
        if len(q) == len(path) and q[:-1] == path[:-1] and len(q[-1]) > len(path[-1]) \
                and q[-1][:len(path[-1])] == path[-1]:
            out = out - S.points
    return out


# -- criterion runners ------------------------------------------------------

def check_h_preorder(sizes: Sequence = ((2, 4), (3, 3)),
                     time_limit: Optional[float] = 60.0) -> CheckResult:
    rec = _Recorder("h-preorder agrees with exhaustive map search")
    for k, n in sizes:
        trees = enumerate_trees(k, 1, n)
        brute = oracles.brute_trees(k, 1, n)
        rec.case(sorted(map(oracles.tree_key, trees)) == sorted(map(oracles.tree_key, brute)),
                 lambda: f"enumeration of T_{k}(1) up to {n} nodes differs from brute force")
        for t, s in itertools.product(trees, repeat=2):
            rec.case(h_leq(t, s)[0] == oracles.brute_h_leq(t, s), lambda: f"{t} vs {s}")
    return rec.done(time_limit)


def check_linearization(max_len: int = 6) -> CheckResult:
    rec = _Recorder("alternating chains linearize into dual-pair ranks")
    chains = [alternating_chain(n, s) for n in range(1, max_len + 1) for s in (0, 1)]
    ranks = linearize(chains)
    rec.case(len(ranks) == max_len, lambda: f"{len(ranks)} ranks")
    for r in ranks:
        want = {(r.position + 1, 0), (r.position + 1, 1)}
        got = {(len(list(nodes(c[0]))), c[0].label.value) for c in r.classes}
        rec.case(len(r.classes) == 2 and got == want, lambda: f"rank {r.position}: {got}")
    for a in chains:
        for b in chains:
            la, lb = len(list(nodes(a))), len(list(nodes(b)))
            expected = la < lb or a == b
            rec.case(oracles.brute_h_leq(a, b) == expected, lambda: f"{a} vs {b}")
    return rec.done()


def _reduction_instances(count: int, seed: int):
    rng = random.Random(seed)
    for i in range(count):
        X = Cylinder(2, rng.randint(1, 3))
        level = 1 if i % 2 == 0 else 2
        shape = random_tree(rng, 3, level, 3 if level == 2 else 4)
        if isinstance(shape, BaseLabel):
            shape = Node(shape)
        yield random_monotone_family(rng, shape, X)


def check_reduction(count: int = 500, seed: int = 0) -> List[CheckResult]:
    """Reduct properties (first result) and unique determination by reducts (second)."""
    rec = _Recorder("reduct is reduced, shrinks components, keeps unions and partitions")
    rec_det = _Recorder("reduced families determine exactly one partition")
    determined = 0
    for F in _reduction_instances(count, seed):
        G = reduce_family(F)
        rec.case(not problems(F) and not problems(G), lambda: "invalid family")
        rec.case(is_reduced(G), lambda: f"not reduced: {F}")
        rec.case(all(tilde(G, p) <= tilde(F, p) for p in terminating_paths(F.shape)),
                 lambda: "a terminating component grew")
        rec.case(_unions_kept(F, G), lambda: "a layer union changed")
        dF = determine(F)
        if dF.ok:
            determined += 1
            rec.case(determine(G).partition == dF.partition, lambda: "partition changed")
        term = terminating_paths(G.shape)
        for x in G.space.points:
            hits = [p for p in term if x in tilde(G, p)]
            rec_det.case(len(hits) == 1, lambda: f"point {x} in {len(hits)} components")
        rec_det.case(determine(G).ok, lambda: "reduced family does not determine")
    rec.case(determined >= count // 20, lambda: f"only {determined} inputs determined a partition")
    return [rec.done(), rec_det.done()]


def _unions_kept(F: TFamily, G: TFamily) -> bool:
    prefixes = {p[:-1] for p in all_paths(F.shape)}
    for prefix in prefixes:
        comp = G.space._all if not prefix else tilde(G, prefix).points
        orig = frozenset().union(*(S.points for p, S in F.sets.items()
                                   if p[:-1] == prefix and p[-1]))
        new = frozenset().union(*(S.points for p, S in G.sets.items()
                                  if p[:-1] == prefix and p[-1]))
        if new != orig & comp:
            return False
    return True


def _good_maps(max_points: int):
    posets = [P for n in range(1, max_points + 1) for P in enumerate_posets(n)]
    return [f for X in posets for Y in posets if len(Y.points) <= len(X.points)
            for f in good_maps(X, Y)]


def _maximal_points(X: FinitePoset, C: frozenset) -> frozenset:
    return frozenset(x for x in C if not any(y != x and y in C for y in X.up(x)))


def check_category(max_points: int = 4, time_limit: Optional[float] = 300.0) -> CheckResult:
    rec = _Recorder("category image: inside image, keeps opens, preimages reflect opens")
    for f in _good_maps(max_points):
        X, Y = f.domain, f.codomain
        for s in X.subsets():
            S = SetRep(X, s)
            img = category_image(f, S)
            oracle = frozenset(y for y in Y.points
                               if s & _maximal_points(X, f.fiber(y)))
            rec.case(img.points == oracle, lambda: f"f[{S}] differs from the oracle")
            rec.case(img <= f.image(S), lambda: f"f[{S}] not inside f({S})")
            if is_open(S):
                rec.case(is_open(img), lambda: f"f[{S}] not open")
        for a in Y.subsets():
            A = SetRep(Y, a)
            rec.case(is_open(f.preimage(A)) == is_open(A), lambda: f"preimage of {A}")
    return rec.done(time_limit)


def check_membership_preservation(max_points: int = 4, max_nodes: int = 3) -> CheckResult:
    rec = _Recorder("membership is preserved and reflected along open surjections")
    trees = enumerate_trees(2, 1, max_nodes)
    cache: dict = {}
    for f in _good_maps(max_points):
        Y = f.codomain
        for vals in itertools.product((0, 1), repeat=len(Y.points)):
            A = KPartition(Y, dict(zip(Y.points, vals)))
            for T in trees:
                r = check_preservation(f, A, T, cache=cache)
                rec.case(r.decided and r.holds,
                         lambda: f"{f.graph} {A.values} {T}: {r.codomain.status} "
                                 f"vs {r.domain.status}")
    return rec.done()


def check_hausdorff(count: int = 100, seed: int = 0) -> CheckResult:
    rec = _Recorder("extracted family determines the limit partition")
    rng = random.Random(seed)
    b, d = 2, 6
    tables = [(random_guess_table(rng, 3, b, d), 3) for _ in range(count)]
    tables += [(random_guess_table(rng, 2, b, d, 0.25), 2) for _ in range(count // 2)]
    tables += [(g, 2) for g in edge_case_tables(b, d)]
    for g, k in tables:
        m = from_guess_table(g, k, b, d)
        e = hausdorff_extract(m)
        leaves = ["".join(w) for w in itertools.product("01", repeat=d)]
        limit = {x: _iterate_to_limit(g, x) for x in leaves}
        agree = sum(e.partition(x) == limit[x] for x in leaves)
        rec.case(agree == len(leaves), lambda: f"limit-match {agree}/{len(leaves)}")
        if k == 2:
            rec.case(chain_rank(e.tree) == max_mind_changes(g, b, d),
                     lambda: f"chain rank {chain_rank(e.tree)} vs "
                             f"{max_mind_changes(g, b, d)} changes")
    return rec.done()


def _iterate_to_limit(g, x: str) -> int:
    value = g[""]
    for i in range(1, len(x) + 1):
        value = g[x[:i]]
    return value


def edge_case_tables(b: int = 2, d: int = 6) -> List[Dict[str, int]]:
    """Constant; one change on the 0-subtree; five changes on the all-zero branch;
    one change at full depth on a single branch."""
    strings = ["".join(w) for n in range(d + 1) for w in itertools.product("01"[:b], repeat=n)]
    const = {s: 1 for s in strings}
    one = {s: (0 if s.startswith("0") else 1) for s in strings}
    five = {s: _five_changes(s) for s in strings}
    deep = {s: (1 if s == "0" * d else 0) for s in strings}
    return [const, one, five, deep]


def _five_changes(s: str) -> int:
    # along 000000 the guesses read 0,1,0,1,0,1 after 0..5 symbols; elsewhere
    # the guess freezes at the value of the longest all-zero prefix
    z = len(s) - len(s.lstrip("0"))
    return min(z, 5) % 2


def check_noncollapse(max_n: int = 4) -> CheckResult:
    rec = _Recorder("alternating chains separate consecutive levels")
    for n in range(1, max_n + 1):
        for start in (0, 1):
            T, S = alternating_chain(n + 1, start), alternating_chain(n, start)
            nc = noncollapse_witness(T, S)
            rec.case(nc.separates, lambda: f"n={n}: {nc.upper.status}/{nc.lower.status}")
            X = nc.space
            brute = oracles.brute_member_level1(dict(nc.partition.values), X.open_sets(), S)
            rec.case(not brute, lambda: f"n={n}: brute force finds an S-witness")
    return rec.done()


def check_ordinals(max_coef: int = 3) -> CheckResult:
    rec = _Recorder("ordinal arithmetic agrees with explicit well-orders")
    rng = range(max_coef + 1)
    ords = [OMEGA * OMEGA * a + OMEGA * b + c for a in rng for b in rng for c in rng]

    def poly(a):
        return {int(e): c for e, c in a.terms}

    for a, b in itertools.product(ords, repeat=2):
        wa, wb = oracles.wo_from_poly(poly(a)), oracles.wo_from_poly(poly(b))
        rec.case(oracles.order_type(oracles.wo_sum(wa, wb)) == poly(a + b),
                 lambda: f"{a} + {b}")
        rec.case(oracles.order_type(oracles.wo_product(wa, wb)) == poly(a * b),
                 lambda: f"{a} * {b}")
        rec.case(oracles.poly_compare(oracles.order_type(wa), oracles.order_type(wb))
                 == ord_compare(a, b), lambda: f"compare {a}, {b}")
    return rec.done()


def run_all(full: bool = True, seed: int = 0) -> List[CheckResult]:
    if full:
        return [check_h_preorder(), check_linearization(), *check_reduction(500, seed),
                check_category(), check_membership_preservation(), check_hausdorff(100, seed),
                check_noncollapse(), check_ordinals()]
    return [check_h_preorder(((2, 3), (3, 2)), None), check_linearization(4),
            *check_reduction(60, seed), check_category(3, None),
            check_membership_preservation(3, 2), check_hausdorff(10, seed),
            check_noncollapse(2), check_ordinals(2)]
