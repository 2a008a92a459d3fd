"""Iterated labeled trees and the homomorphic (h-) preorder.

A tree of level 0 is a bare label ``BaseLabel(i)``.  A tree of level n+1 is a
``Node`` whose labels are trees of level <= n.  A single node labeled by a
base label is identified with that label, so ``Node(BaseLabel(i))`` and
``BaseLabel(i)`` are h-equivalent.

``T <=_h S`` holds when some map f from the nodes of T to the nodes of S is
monotone for the prefix order and satisfies ``label(x) <=_h label(f(x))``.
Base labels form an antichain.  f need not send the root to the root.

Text syntax: ``0``, ``1``, ... for base labels and ``node(<label>; <child>,
...)`` for nodes (``node(<label>)`` when there are no children).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

Address = Tuple[int, ...]


class TreeSyntaxError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


class LinearizationError(ValueError):
    """Raised when a fragment is not a chain of (at most) dual pairs."""

    def __init__(self, message: str, pair: Tuple["IterTree", "IterTree"]):
        super().__init__(message)
        self.pair = pair


@dataclass(frozen=True)
class BaseLabel:
    value: int

    def __post_init__(self) -> None:
        if not isinstance(self.value, int) or self.value < 0:
            raise ValueError(f"base label must be a non-negative integer, got {self.value!r}")

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Node:
    label: "IterTree"
    children: Tuple["Node", ...] = ()
    _key: str = field(default="", init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if isinstance(self.label, int):
            object.__setattr__(self, "label", BaseLabel(self.label))
        kids = []
        for c in self.children:
            if isinstance(c, int):
                c = BaseLabel(c)
            if isinstance(c, BaseLabel):
                c = Node(c)
            if not isinstance(c, Node):
                raise TypeError(f"child must be a tree, got {c!r}")
            kids.append(c)
        object.__setattr__(self, "children", tuple(kids))

    def __str__(self) -> str:
        return format_tree(self)


IterTree = Union[BaseLabel, Node]


@dataclass(frozen=True)
class HWitness:
    """A monotone map between node addresses certifying ``T <=_h S``."""

    mapping: Dict[Address, Address]

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.mapping.items())))


# -- construction helpers ---------------------------------------------------

def leaf(i: int) -> Node:
    return Node(BaseLabel(i))


def chain(labels: Sequence[Union[int, IterTree]]) -> Node:
    """Path tree: ``labels[0]`` at the root, each next label one step deeper."""
    if not labels:
        raise ValueError("a chain needs at least one label")
    node = None
    for lab in reversed(labels):
        node = Node(lab, (node,) if node is not None else ())
    return node


def alternating_chain(length: int, start: int = 0) -> Node:
    return chain([(start + j) % 2 for j in range(length)])


def s_embed(t: IterTree) -> Node:
    """The singleton tree labeled by ``t``."""
    return Node(t)


def nodes(t: IterTree) -> Iterator[Tuple[Address, Node]]:
    """Preorder traversal of a tree's nodes with their addresses."""
    if isinstance(t, BaseLabel):
        t = Node(t)
    stack: List[Tuple[Address, Node]] = [((), t)]
    while stack:
        addr, n = stack.pop()
        yield addr, n
        for i in reversed(range(len(n.children))):
            stack.append((addr + (i,), n.children[i]))


def subtree(t: IterTree, addr: Address) -> Node:
    if isinstance(t, BaseLabel):
        t = Node(t)
    for i in addr:
        t = t.children[i]
    return t


def size(t: IterTree) -> int:
    return 1 if isinstance(t, BaseLabel) else 1 + sum(size(c) for c in t.children)


def base_labels(t: IterTree) -> set:
    if isinstance(t, BaseLabel):
        return {t.value}
    out = set()
    for _, n in nodes(t):
        out |= base_labels(n.label)
    return out


def iter_level(t: IterTree) -> int:
    """Least n with ``t`` in T_k(n); a childless node over a level-0 label is level 0."""
    if isinstance(t, BaseLabel):
        return 0
    label_levels = [iter_level(n.label) for _, n in nodes(t)]
    top = max(label_levels)
    if not t.children and top == 0:
        return 0
    return top + 1


# -- canonical forms --------------------------------------------------------

@lru_cache(maxsize=None)
def canonical(t: IterTree) -> IterTree:
    """Representative with children (recursively) in a fixed syntactic order."""
    if isinstance(t, BaseLabel):
        return t
    kids = sorted((canonical(c) for c in t.children), key=format_tree)
    return Node(canonical(t.label), tuple(kids))


def canonical_key(t: IterTree) -> str:
    return format_tree(canonical(t))


# -- the h-preorder ---------------------------------------------------------

def _lift(t: IterTree) -> Node:
    return Node(t) if isinstance(t, BaseLabel) else t


@lru_cache(maxsize=None)
def _leq(t: IterTree, s: IterTree) -> bool:
    if isinstance(t, BaseLabel) and isinstance(s, BaseLabel):
        return t.value == s.value
    return _map_table(_lift(t), _lift(s))[0] is not None


def _map_table(t: Node, s: Node):
    """Dynamic program over (node of t, node of s).

    ``fits[x][z]``: subtree of t at x maps into s with x sent to z.
    ``below[x][z]``: subtree at x maps somewhere in the subtree of s at z.
    Returns ``(root_target, fits, below, t_nodes, s_nodes)`` where
    ``root_target`` is None when no map exists.
    """
    tn = list(nodes(t))
    sn = list(nodes(s))
    s_kids = [[j for j, (a, _) in enumerate(sn) if len(a) == len(sa) + 1 and a[:-1] == sa]
              for sa, _ in sn]
    t_kids = [[j for j, (a, _) in enumerate(tn) if len(a) == len(ta) + 1 and a[:-1] == ta]
              for ta, _ in tn]
    fits = [[False] * len(sn) for _ in tn]
    below = [[False] * len(sn) for _ in tn]
    # children come after parents in preorder: fill bottom-up in reverse
    for xi in reversed(range(len(tn))):
        xlab = tn[xi][1].label
        for zi in reversed(range(len(sn))):
            ok = _leq(canonical(xlab), canonical(sn[zi][1].label)) and all(
                below[c][zi] for c in t_kids[xi])
            fits[xi][zi] = ok
            below[xi][zi] = ok or any(below[xi][c] for c in s_kids[zi])
    root = next((zi for zi in range(len(sn)) if fits[0][zi]), None)
    return root, fits, below, tn, sn, t_kids, s_kids


def h_leq(t: IterTree, s: IterTree) -> Tuple[bool, Optional[HWitness]]:
    """Decide ``t <=_h s``; on success also return a witnessing map."""
    if isinstance(t, BaseLabel) and isinstance(s, BaseLabel):
        return (True, HWitness({(): ()})) if t.value == s.value else (False, None)
    root, fits, below, tn, sn, t_kids, s_kids = _map_table(_lift(t), _lift(s))
    if root is None:
        return False, None
    mapping: Dict[Address, Address] = {}

    def place(xi: int, zi: int) -> None:
        mapping[tn[xi][0]] = sn[zi][0]
        for c in t_kids[xi]:
            place(c, _descend(c, zi))

    def _descend(xi: int, zi: int) -> int:
        # find z' extending z with fits[xi][z']; below[xi][zi] guarantees one
        stack = [zi]
        while stack:
            z = stack.pop()
            if fits[xi][z]:
                return z
            stack.extend(c for c in s_kids[z] if below[xi][c])
        raise AssertionError("inconsistent h-table")

    place(0, root)
    return True, HWitness(mapping)


def h_le(t: IterTree, s: IterTree) -> bool:
    return _leq(canonical(t), canonical(s))


def h_equiv(t: IterTree, s: IterTree) -> bool:
    return h_le(t, s) and h_le(s, t)


def check_witness(t: IterTree, s: IterTree, w: HWitness) -> bool:
    """Independent validation of a witness: totality, monotonicity, labels."""
    tl, sl = _lift(t), _lift(s)
    tnodes = dict(nodes(tl))
    snodes = dict(nodes(sl))
    if set(w.mapping) != set(tnodes) or not set(w.mapping.values()) <= set(snodes):
        return False
    for a in tnodes:
        for b in tnodes:
            if b[:len(a)] == a:
                fa, fb = w.mapping[a], w.mapping[b]
                if fb[:len(fa)] != fa:
                    return False
    if isinstance(t, BaseLabel) and isinstance(s, BaseLabel):
        return t == s
    return all(h_le(tnodes[a].label, snodes[w.mapping[a]].label) for a in tnodes)


# -- duality ----------------------------------------------------------------

def dual(t: IterTree, k: int = 2) -> IterTree:
    """Swap the base labels 0 and 1 throughout (k = 2 only)."""
    if k != 2:
        raise ValueError(f"dual is defined for k = 2 only, got k = {k}")
    if isinstance(t, BaseLabel):
        if t.value > 1:
            raise ValueError(f"label {t.value} out of range for k = 2")
        return BaseLabel(1 - t.value)
    return Node(dual(t.label), tuple(dual(c) for c in t.children))


# -- enumeration ------------------------------------------------------------

MAX_ENUM_LEVEL = 2
MAX_ENUM_NODES = 6
MAX_ENUM_COUNT = 200_000


def enumerate_trees(k: int, level: int, max_nodes: int,
                    cap: int = MAX_ENUM_COUNT) -> List[IterTree]:
    """All trees of T_k(level) with at most ``max_nodes`` nodes per layer,
    one representative per child-permutation class.

    Level 1 includes the singleton trees ``node(i)``.
    """
    if level > MAX_ENUM_LEVEL or max_nodes > MAX_ENUM_NODES:
        raise BudgetExceeded(f"enumeration limited to level <= {MAX_ENUM_LEVEL} "
                             f"and max_nodes <= {MAX_ENUM_NODES}")
    if level == 0:
        return [BaseLabel(i) for i in range(k)]
    labels = enumerate_trees(k, level - 1, max_nodes, cap)
    return _unordered_trees(labels, max_nodes, cap)


def _unordered_trees(labels: Sequence[IterTree], max_nodes: int, cap: int) -> List[Node]:
    by_size: Dict[int, List[Node]] = {}
    ordered: List[Node] = []        # all trees so far, sorted by (size, key)
    total = 0
    for n in range(1, max_nodes + 1):
        found = []
        for forest in _forests(ordered, n - 1, 0):
            for lab in labels:
                found.append(Node(lab, forest))
                total += 1
                if total > cap:
                    raise BudgetExceeded(f"more than {cap} trees")
        found = sorted({canonical(t) for t in found}, key=format_tree)
        by_size[n] = found
        ordered.extend(found)
    return ordered


def _forests(pool: List[Node], total: int, start: int) -> Iterator[Tuple[Node, ...]]:
    """Multisets of trees from ``pool[start:]`` with sizes summing to ``total``."""
    if total == 0:
        yield ()
        return
    for i in range(start, len(pool)):
        sz = size(pool[i])
        if sz > total:
            continue
        for rest in _forests(pool, total - sz, i):
            yield (pool[i],) + rest


# -- linearization ----------------------------------------------------------

@dataclass
class Rank:
    position: int
    classes: List[List[IterTree]]


def linearize(ts: Iterable[IterTree]) -> List[Rank]:
    """Sort a fragment into ranks of h-equivalence classes.

    Each rank holds one class or a pair of mutually dual, incomparable
    classes, and every class of a rank lies strictly below every class of
    the next.  Raises :class:`LinearizationError` naming an offending pair
    otherwise, which always happens for an antichain using a label above 1.
    """
    classes: List[List[IterTree]] = []
    for t in ts:
        for cls in classes:
            if h_equiv(cls[0], t):
                cls.append(t)
                break
        else:
            classes.append([t])
    remaining = list(range(len(classes)))
    ranks: List[Rank] = []
    while remaining:
        layer = [i for i in remaining
                 if not any(j != i and h_le(classes[j][0], classes[i][0]) for j in remaining)]
        if not layer:
            raise AssertionError("h-preorder quotient must be acyclic")
        layer.sort(key=lambda i: canonical_key(classes[i][0]))
        reps = [classes[i][0] for i in layer]
        if len(layer) > 2:
            raise LinearizationError("more than two incomparable classes at one rank",
                                     (reps[0], reps[1]))
        if len(layer) == 2 and not _are_dual(reps[0], reps[1]):
            raise LinearizationError("incomparable classes are not dual", (reps[0], reps[1]))
        ranks.append(Rank(len(ranks), [classes[i] for i in layer]))
        remaining = [i for i in remaining if i not in layer]
    for lower, upper in zip(ranks, ranks[1:]):
        for a in lower.classes:
            for b in upper.classes:
                if not h_le(a[0], b[0]) or h_le(b[0], a[0]):
                    raise LinearizationError("consecutive ranks are not strictly ordered",
                                             (a[0], b[0]))
    return ranks


def _are_dual(a: IterTree, b: IterTree) -> bool:
    if not base_labels(a) | base_labels(b) <= {0, 1}:
        return False
    return h_equiv(dual(a), b)


def chain_rank(t: IterTree) -> int:
    """For k = 2 trees of level <= 1: length minus one of the h-equivalent
    alternating chain, i.e. the number of label alternations along the worst
    branch."""
    if iter_level(t) > 1 or not base_labels(t) <= {0, 1}:
        raise ValueError("chain_rank expects a k = 2 tree of level <= 1")
    n = 1
    while True:
        for start in (0, 1):
            c = alternating_chain(n, start)
            if h_equiv(c, t):
                return n - 1
        if n > size(t):
            raise AssertionError("no equivalent alternating chain")
        n += 1


# -- text syntax ------------------------------------------------------------

def format_tree(t: IterTree) -> str:
    if isinstance(t, BaseLabel):
        return str(t.value)
    if t._key:
        return t._key
    lab = format_tree(t.label)
    text = f"node({lab})" if not t.children else \
        f"node({lab}; " + ", ".join(format_tree(c) for c in t.children) + ")"
    object.__setattr__(t, "_key", text)
    return text


_TREE_TOKEN = re.compile(r"\s*(?:(\d+)|(node)|([();,]))")


def parse_tree(text: str) -> IterTree:
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TREE_TOKEN.match(text, pos)
        if not m:
            raise TreeSyntaxError(f"unexpected input at {pos}: {text[pos:pos + 20]!r}")
        pos = m.end()
        toks.append(m.group(1) or m.group(2) or m.group(3))
    i = 0

    def take(expected=None):
        nonlocal i
        if i >= len(toks):
            raise TreeSyntaxError("unexpected end of tree")
        tok = toks[i]
        if expected is not None and tok != expected:
            raise TreeSyntaxError(f"expected {expected!r}, got {tok!r}")
        i += 1
        return tok

    def tree() -> IterTree:
        tok = take()
        if tok.isdigit():
            return BaseLabel(int(tok))
        if tok != "node":
            raise TreeSyntaxError(f"expected a tree, got {tok!r}")
        take("(")
        lab = tree()
        kids: List[IterTree] = []
        if toks[i:i + 1] == [";"]:
            take(";")
            if toks[i:i + 1] != [")"]:
                kids.append(tree())
                while toks[i:i + 1] == [","]:
                    take(",")
                    kids.append(tree())
        take(")")
        return Node(lab, tuple(kids))

    if not toks:
        raise TreeSyntaxError("empty tree")
    result = tree()
    if i != len(toks):
        raise TreeSyntaxError(f"trailing input: {toks[i]!r}")
    return result
