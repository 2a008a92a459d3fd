"""Brute-force reference implementations used by the tests and ``selftest``.

Each oracle takes a different route from the production code: plain
enumeration of all maps, all plane trees, all candidate set assignments, or
explicit well-orders.  They are only meant for tiny inputs.
"""

from __future__ import annotations

import itertools
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .trees import BaseLabel, IterTree, Node

# -- h-preorder ---------------------------------------------------------------


def _flat(t: IterTree) -> List[Tuple[Tuple[int, ...], IterTree]]:
    """(address, label) pairs, recursively, without using the trees module helpers."""
    if isinstance(t, BaseLabel):
        return [((), t)]
    out = []

    def walk(n: Node, addr: Tuple[int, ...]) -> None:
        out.append((addr, n.label))
        for i, c in enumerate(n.children):
            walk(c, addr + (i,))

    walk(t, ())
    return out


def brute_h_leq(t: IterTree, s: IterTree) -> bool:
    """Search all maps from t's nodes to s's nodes, node by node in preorder,
    keeping each image below the parent's image."""
    if isinstance(t, BaseLabel) and isinstance(s, BaseLabel):
        return t.value == s.value
    tn, sn = _flat(t), _flat(s)
    parent = {a: i for i, (a, _) in enumerate(tn)}
    image: List[Tuple[int, ...]] = []

    def extend(i: int) -> bool:
        if i == len(tn):
            return True
        a, lab = tn[i]
        for b, slab in sn:
            if a:
                fp = image[parent[a[:-1]]]
                if b[:len(fp)] != fp:
                    continue
            if not brute_h_leq(lab, slab):
                continue
            image.append(b)
            if extend(i + 1):
                return True
            image.pop()
        return False

    return extend(0)


# -- tree enumeration -------------------------------------------------------

def _shape_key(t: IterTree):
    if isinstance(t, BaseLabel):
        return ("b", t.value)
    return ("n", _shape_key(t.label), tuple(sorted(_shape_key(c) for c in t.children)))


def _plane_shapes(n: int) -> List[tuple]:
    """All ordered trees with exactly n nodes, as nested tuples of children."""
    if n == 1:
        return [()]
    out = []
    for parts in _compositions(n - 1):
        for kids in itertools.product(*(_plane_shapes(p) for p in parts)):
            out.append(tuple(kids))
    return out


def _compositions(n: int) -> List[Tuple[int, ...]]:
    if n == 0:
        return [()]
    return [(first,) + rest for first in range(1, n + 1) for rest in _compositions(n - first)]


def _label(shape: tuple, labels: Iterable[IterTree]) -> Node:
    it = iter(labels)

    def build(sh: tuple) -> Node:
        lab = next(it)
        return Node(lab, tuple(build(c) for c in sh))

    return build(shape)


def brute_trees(k: int, level: int, max_nodes: int) -> List[IterTree]:
    """Every tree of the level up to child order, one per class, by labeling plane trees."""
    if level == 0:
        return [BaseLabel(i) for i in range(k)]
    labels = brute_trees(k, level - 1, max_nodes)
    seen: Dict[tuple, IterTree] = {}
    for n in range(1, max_nodes + 1):
        for shape in _plane_shapes(n):
            for labs in itertools.product(labels, repeat=n):
                t = _label(shape, labs)
                seen.setdefault(_shape_key(t), t)
    return list(seen.values())


def tree_key(t: IterTree):
    """Child-order independent key, for comparing enumerations."""
    return _shape_key(t)


# -- reducts ------------------------------------------------------------------

def brute_reduct(Cs: Sequence[FrozenSet], allowed: Sequence[FrozenSet]
                 ) -> Optional[Tuple[FrozenSet, ...]]:
    """Search every tuple of allowed sets for a reduct of ``Cs``."""
    union = frozenset().union(*Cs)
    choices = [[R for R in allowed if R <= C] for C in Cs]
    for Rs in itertools.product(*choices):
        if frozenset().union(*Rs) != union:
            continue
        if all(not (Rs[i] & Rs[j]) for i in range(len(Rs)) for j in range(i + 1, len(Rs))):
            return tuple(Rs)
    return None


def brute_up_sets(points: Sequence, leq) -> List[FrozenSet]:
    out = []
    for r in range(len(points) + 1):
        for c in itertools.combinations(points, r):
            S = frozenset(c)
            if all(y in S for x in S for y in points if leq(x, y)):
                out.append(S)
    return out


# -- membership for level-1 shapes -----------------------------------------

def brute_member_level1(values: Dict, opens: Sequence[FrozenSet], t: Node) -> bool:
    """Try every assignment of open sets (root = whole space) to the nodes of a
    level-1 tree, with no monotonicity assumption, and check determination."""
    nodes_ = _flat(t)
    whole = frozenset(values)
    others = [i for i, (a, _) in enumerate(nodes_) if a]
    for choice in itertools.product(opens, repeat=len(others)):
        U = {(): whole}
        for i, S in zip(others, choice):
            U[nodes_[i][0]] = S
        labels: Dict = {x: set() for x in whole}
        for a, lab in nodes_:
            comp = U[a] - frozenset().union(
                *(U[b] for b, _ in nodes_ if len(b) > len(a) and b[:len(a)] == a))
            for x in comp:
                labels[x].add(lab.value)
        if all(labels[x] == {values[x]} for x in whole):
            return True
    return False


# -- ordinals via explicit well-orders ---------------------------------------

ANY = None
Box = Tuple[Optional[int], ...]


def _pad(boxes: List[Box], width: int) -> List[Box]:
    return [b + (0,) * (width - len(b)) for b in boxes]


def wo_from_poly(poly: Dict[int, int]) -> List[Box]:
    """A subset of N^K in lex order with order type sum of w^e * c."""
    boxes = []
    for t, e in enumerate(sorted(poly, reverse=True)):
        for j in range(poly[e]):
            boxes.append((t, j) + (ANY,) * e)
    width = max((len(b) for b in boxes), default=0)
    return _pad(boxes, width)


def wo_sum(a: List[Box], b: List[Box]) -> List[Box]:
    width = 1 + max([len(x) for x in a + b] or [0])
    return _pad([(0,) + x for x in a] + [(1,) + x for x in b], width)


def wo_product(a: List[Box], b: List[Box]) -> List[Box]:
    """b copies of a: compare the b-coordinate first."""
    return [y + x for y in b for x in a]


def _p_add(x: Dict[int, int], y: Dict[int, int]) -> Dict[int, int]:
    if not y:
        return dict(x)
    top = max(y)
    out = {e: c for e, c in x.items() if e > top}
    for e, c in y.items():
        out[e] = out.get(e, 0) + c
    if top in x:
        out[top] = x[top] + y[top]
    return out


def order_type(boxes: List[Box]) -> Dict[int, int]:
    """Order type of a finite union of disjoint boxes, as {exponent: coefficient}."""
    if not boxes:
        return {}
    if len(boxes[0]) == 0:
        return {0: 1}
    consts = [b[0] for b in boxes if b[0] is not ANY]
    bound = max(consts) + 1 if consts else 0
    total: Dict[int, int] = {}
    for v in range(bound):
        total = _p_add(total, order_type([b[1:] for b in boxes if b[0] in (v, ANY)]))
    generic = order_type([b[1:] for b in boxes if b[0] is ANY])
    if generic:
        total = _p_add(total, {max(generic) + 1: 1})
    return total


def poly_compare(x: Dict[int, int], y: Dict[int, int]) -> int:
    for e in sorted(set(x) | set(y), reverse=True):
        if x.get(e, 0) != y.get(e, 0):
            return -1 if x.get(e, 0) < y.get(e, 0) else 1
    return 0
