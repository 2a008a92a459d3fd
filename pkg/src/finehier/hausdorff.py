"""From a mind-change machine to a labeled tree and a cylinder family.

A machine answers ``oracle(sigma, i, s)``: the value of the i-th guess
computed from the prefix ``sigma`` when it halts within ``s`` steps, else
None.  The guess-table adapter lets guess i read the first i symbols, so
``M^sigma(i)`` halts within ``s`` steps iff ``i <= min(|sigma|, s)``, with
value ``g(sigma[:i])``.

The extraction builds R_0, R_1, ...: R_0 holds the prefix-minimal strings on
which guess 0 is available, and R_{n+1} the prefix-minimal proper
extensions tau of some sigma in R_n that expose a guess i > i_sigma,
``i <= |tau|``, different from sigma's committed value.  The prefix closure
of their union, labeled by the deepest commitment above each node, indexes
the family of cylinders ``[tau]``.

Guess-table file::

    k=3 b=2 d=2
    - 0
    0 1
    ...
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Tuple

from .families import KPartition, TFamily, determine
from .spaces import Base, Cylinder, SpaceFormatError
from .trees import BaseLabel, IterTree, Node

Oracle = Callable[[str, int, int], Optional[int]]


class NonStabilizing(ValueError):
    pass


class DepthOverflow(ValueError):
    pass


@dataclass(frozen=True)
class MindChangeMachine:
    k: int
    b: int
    d: int
    oracle: Oracle = field(compare=False)

    def strings(self, max_len: Optional[int] = None) -> Iterator[str]:
        """All strings of length <= max_len (default d), shortest first."""
        top = self.d if max_len is None else max_len
        for n in range(top + 1):
            for w in itertools.product("0123456789"[:self.b], repeat=n):
                yield "".join(w)

    def leaves(self) -> Iterator[str]:
        for w in itertools.product("0123456789"[:self.b], repeat=self.d):
            yield "".join(w)


def from_guess_table(g: Mapping[str, int], k: int, b: int, d: int) -> MindChangeMachine:
    table = dict(g)
    alphabet = "0123456789"[:b]
    for n in range(d + 1):
        for w in itertools.product(alphabet, repeat=n):
            s = "".join(w)
            if s not in table:
                raise ValueError(f"guess table has no value at {s or '-'}")
            if not 0 <= table[s] < k:
                raise ValueError(f"guess {table[s]} at {s or '-'} is outside 0..{k - 1}")

    def oracle(sigma: str, i: int, s: int) -> Optional[int]:
        return table[sigma[:i]] if i <= min(len(sigma), s) else None

    return MindChangeMachine(k, b, d, oracle)


# -- R-sequence ---------------------------------------------------------------

@dataclass
class RSequence:
    levels: List[List[str]]
    index: Dict[str, int]
    value: Dict[str, int]


def _guess(m: MindChangeMachine, sigma: str, i: int) -> Optional[int]:
    return m.oracle(sigma, i, len(sigma))


def check_consistency(m: MindChangeMachine) -> None:
    """Guesses persist under one-symbol extensions and one more step."""
    for sigma in m.strings(m.d - 1):
        for i in range(len(sigma) + 1):
            v = _guess(m, sigma, i)
            if v is None:
                continue
            for c in "0123456789"[:m.b]:
                w = m.oracle(sigma + c, i, len(sigma) + 1)
                if w != v:
                    raise NonStabilizing(f"guess {i} changes from {v} to {w} between "
                                         f"{sigma or '-'} and {sigma + c}")


def build_r_sequence(m: MindChangeMachine) -> RSequence:
    check_consistency(m)
    strings = list(m.strings())
    index: Dict[str, int] = {}
    value: Dict[str, int] = {}

    def minimal(cands: List[str]) -> List[str]:
        return [s for s in cands if not any(t != s and s.startswith(t) for t in cands)]

    r0 = minimal([s for s in strings if _guess(m, s, 0) is not None])
    for s in r0:
        index[s], value[s] = 0, _guess(m, s, 0)
    levels = [r0]
    while levels[-1]:
        nxt = []
        for sigma in levels[-1]:
            found = {}
            for tau in strings:
                if len(tau) <= len(sigma) or not tau.startswith(sigma):
                    continue
                for i in range(index[sigma] + 1, len(tau) + 1):
                    v = _guess(m, tau, i)
                    if v is not None and v != value[sigma]:
                        found[tau] = (i, v)
                        break
            for tau in minimal(list(found)):
                index[tau], value[tau] = found[tau]
                nxt.append(tau)
        if len(levels) > m.d + 1:
            raise AssertionError("R-sequence longer than the depth allows")
        levels.append(nxt)
    return RSequence(levels, index, value)


# -- tree and family --------------------------------------------------------

@dataclass
class LabeledTree:
    nodes: List[str]              # prefix closed, shortest first
    labels: Dict[str, int]

    def children(self, s: str) -> List[str]:
        return sorted(t for t in self.nodes if len(t) == len(s) + 1 and t.startswith(s))

    def to_iter_tree(self) -> Node:
        def build(s: str) -> Node:
            return Node(BaseLabel(self.labels[s]), tuple(build(c) for c in self.children(s)))
        return build("")

    def address(self, s: str) -> Tuple[int, ...]:
        addr = []
        for j in range(len(s)):
            addr.append(self.children(s[:j]).index(s[:j + 1]))
        return tuple(addr)


def build_labeled_tree(r: RSequence, m: Optional[MindChangeMachine] = None) -> LabeledTree:
    commits = [s for level in r.levels for s in level]
    tree = {""}
    for s in commits:
        tree |= {s[:j] for j in range(len(s) + 1)}
    depth = {s: n for n, level in enumerate(r.levels) for s in level}
    labels = {}
    for tau in tree:
        above = [s for s in commits if tau.startswith(s)]
        labels[tau] = r.value[max(above, key=lambda s: depth[s])] if above else 0
    return LabeledTree(sorted(tree, key=lambda s: (len(s), s)), labels)


def build_family(lt: LabeledTree, model: Cylinder, k: int = 0) -> TFamily:
    """The family of cylinders ``[tau]`` indexed by the labeled tree."""
    if any(len(s) > model.d for s in lt.nodes):
        raise DepthOverflow(f"tree is deeper than the model depth {model.d}")
    shape = lt.to_iter_tree()
    sets = {(lt.address(s),): model.cylinder(s) for s in lt.nodes}
    return TFamily(shape, Base(model), sets, k)


# -- end to end ---------------------------------------------------------------

@dataclass
class Extraction:
    rsequence: RSequence
    labeled: LabeledTree
    tree: IterTree
    family: TFamily
    partition: KPartition


def limit_partition(m: MindChangeMachine) -> KPartition:
    """Value of the last guess available on each full-length string."""
    X = Cylinder(m.b, m.d)
    vals = {}
    for x in m.leaves():
        defined = [(i, v) for i in range(m.d + 1)
                   if (v := _guess(m, x, i)) is not None]
        if not defined:
            raise NonStabilizing(f"no guess is available on {x}")
        vals[x] = defined[-1][1]
    return KPartition(X, vals, m.k)


def hausdorff_extract(m: MindChangeMachine) -> Extraction:
    X = Cylinder(m.b, m.d)
    for x in m.leaves():
        if _guess(m, x, 0) is None:
            raise NonStabilizing(f"guess 0 is not available on {x} within depth {m.d}")
    r = build_r_sequence(m)
    lt = build_labeled_tree(r, m)
    F = build_family(lt, X, m.k)
    det = determine(F)
    if not det.ok:
        raise AssertionError(f"extracted family does not determine a partition at {det.point}")
    return Extraction(r, lt, F.shape, F, det.partition)


def max_mind_changes(g: Mapping[str, int], b: int, d: int) -> int:
    """Largest number of guess changes along a full-length string."""
    best = 0
    for w in itertools.product("0123456789"[:b], repeat=d):
        x = "".join(w)
        best = max(best, sum(g[x[:i]] != g[x[:i - 1]] for i in range(1, d + 1)))
    return best


def random_guess_table(rng: random.Random, k: int, b: int, d: int,
                       p_change: float = 0.3) -> Dict[str, int]:
    g = {"": rng.randrange(k)}
    for n in range(1, d + 1):
        for w in itertools.product("0123456789"[:b], repeat=n):
            s = "".join(w)
            parent = g[s[:-1]]
            g[s] = rng.choice([v for v in range(k) if v != parent]) \
                if rng.random() < p_change else parent
    return g


# -- text format ------------------------------------------------------------

def parse_guess_table(text: str) -> MindChangeMachine:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise SpaceFormatError("empty guess table")
    try:
        header = dict(kv.split("=", 1) for kv in lines[0].split())
        k, b, d = int(header["k"]), int(header["b"]), int(header["d"])
    except (KeyError, ValueError) as e:
        raise SpaceFormatError(f"bad header {lines[0]!r}; expected 'k= b= d='") from e
    table = {}
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2 or not parts[1].isdigit():
            raise SpaceFormatError(f"bad guess line {ln!r}")
        key = "" if parts[0] == "-" else parts[0]
        if any(c not in "0123456789"[:b] for c in key) or len(key) > d:
            raise SpaceFormatError(f"bad string {parts[0]!r}")
        table[key] = int(parts[1])
    try:
        return from_guess_table(table, k, b, d)
    except ValueError as e:
        raise SpaceFormatError(str(e)) from e


def format_guess_table(g: Mapping[str, int], k: int, b: int, d: int) -> str:
    lines = [f"k={k} b={b} d={d}"]
    for n in range(d + 1):
        for w in itertools.product("0123456789"[:b], repeat=n):
            s = "".join(w)
            lines.append(f"{s or '-'} {g[s]}")
    return "\n".join(lines) + "\n"
