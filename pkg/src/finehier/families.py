"""T-families over a base, their components, reducts and the partitions they determine.

A family is stored flat: one set per *path* ``(a0, a1, ..., aj)`` where
``a0`` is a node address in the shape tree, ``a1`` a node address in the
label tree of ``a0``, and so on.  Layer j (paths of length j+1) holds sets of
level j of the base.  The root of each layer equals the component of the
parent path (the whole space for layer 0), and the sets of a layer stay
inside it.

File format: the shape in tree syntax, then ``path => set`` lines.  A path
is ``/``-separated node addresses written ``r``, ``r.0``, ``r.0.1``; a set
is in the spaces syntax, e.g. ``r/r.1 => {a, b}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple, Union

from .spaces import (Base, Point, SetRep, SpaceFormatError, SpaceMap, SpaceModel,
                     format_set, is_continuous, parse_set)
from .trees import (Address, BaseLabel, IterTree, Node, base_labels, format_tree, nodes,
                    parse_tree)

Path = Tuple[Address, ...]


class FamilyError(ValueError):
    pass


class NotContinuous(ValueError):
    pass


# -- partitions -------------------------------------------------------------

@dataclass(frozen=True)
class KPartition:
    space: SpaceModel
    values: Mapping[Point, int]
    k: int = field(default=2, compare=False)

    def __post_init__(self) -> None:
        vals = dict(self.values)
        missing = [x for x in self.space.points if x not in vals]
        if missing:
            raise ValueError(f"partition is not total: no value at {missing[0]!r}")
        extra = [x for x in vals if x not in self.space._index]
        if extra:
            raise ValueError(f"point {extra[0]!r} not in space")
        bad = [v for v in vals.values() if not isinstance(v, int) or not 0 <= v < self.k]
        if bad:
            raise ValueError(f"value {bad[0]!r} outside 0..{self.k - 1}")
        object.__setattr__(self, "values", vals)

    def __hash__(self) -> int:
        return hash((self.space, tuple(self.values[x] for x in self.space.points)))

    def __call__(self, x: Point) -> int:
        return self.values[x]

    def part(self, i: int) -> SetRep:
        return SetRep(self.space, frozenset(x for x, v in self.values.items() if v == i))

    def compose(self, f: SpaceMap) -> "KPartition":
        """``A o f`` as a partition of ``f``'s domain."""
        return KPartition(f.domain, {x: self.values[f(x)] for x in f.domain.points}, self.k)

    @classmethod
    def constant(cls, space: SpaceModel, i: int, k: int = 2) -> "KPartition":
        return cls(space, {x: i for x in space.points}, max(k, i + 1))


def parse_partition(text: str, space: SpaceModel, k: Optional[int] = None) -> KPartition:
    from .spaces import _lines, _point
    vals = {}
    for line in _lines(text):
        parts = line.split()
        if len(parts) != 2 or not parts[1].isdigit():
            raise SpaceFormatError(f"bad partition line {line!r}")
        vals[_point(space, parts[0])] = int(parts[1])
    if k is None:
        k = max(2, max(vals.values(), default=0) + 1)
    try:
        return KPartition(space, vals, k)
    except ValueError as e:
        raise SpaceFormatError(str(e)) from e


def format_partition(A: KPartition) -> str:
    return "".join(f"{x} {A(x)}\n" for x in A.space.points)


# -- shape navigation -------------------------------------------------------

def layer_tree(shape: IterTree, prefix: Path) -> Optional[Node]:
    """Tree indexing the layer below ``prefix``; None when ``prefix`` terminates."""
    t: IterTree = shape
    for addr in prefix:
        if isinstance(t, BaseLabel):
            raise FamilyError(f"path {format_path(prefix)} runs past a base label")
        t = _node_at(t, addr).label
    return None if isinstance(t, BaseLabel) else t


def _node_at(t: Node, addr: Address) -> Node:
    try:
        for i in addr:
            t = t.children[i]
    except IndexError:
        raise FamilyError(f"no node at address {format_address(addr)}") from None
    return t


def label_at(shape: IterTree, path: Path) -> IterTree:
    lt = layer_tree(shape, path[:-1])
    if lt is None:
        raise FamilyError(f"invalid path {format_path(path)}")
    return _node_at(lt, path[-1]).label


def all_paths(shape: IterTree) -> List[Path]:
    """Every path, layer by layer, each layer in preorder."""
    out: List[Path] = []

    def walk(prefix: Path, t: Optional[Node]) -> None:
        if t is None:
            return
        for addr, n in nodes(t):
            out.append(prefix + (addr,))
        for addr, n in nodes(t):
            if isinstance(n.label, Node):
                walk(prefix + (addr,), n.label)

    walk((), shape if isinstance(shape, Node) else None)
    return sorted(out, key=len)


def terminating_paths(shape: IterTree) -> List[Path]:
    return [p for p in all_paths(shape) if isinstance(label_at(shape, p), BaseLabel)]


def _strict_ext(a: Address, b: Address) -> bool:
    return len(b) > len(a) and b[:len(a)] == a


# -- the family -------------------------------------------------------------

@dataclass(frozen=True)
class TFamily:
    shape: IterTree
    base: Base
    sets: Mapping[Path, SetRep]
    k: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "sets", dict(self.sets))
        if not self.k:
            object.__setattr__(self, "k", max(2, max(base_labels(self.shape)) + 1))
        object.__setattr__(self, "_tilde", {})

    @property
    def space(self) -> SpaceModel:
        return self.base.space

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TFamily):
            return NotImplemented
        return (self.shape == other.shape and self.base == other.base
                and self.sets == other.sets)

    def __hash__(self) -> int:
        return hash((self.shape, self.base, tuple(sorted(
            (p, s.points) for p, s in self.sets.items()))))

    def layer(self, prefix: Path) -> Dict[Address, SetRep]:
        """The nested family below ``prefix``, keyed by node address."""
        return {p[-1]: s for p, s in self.sets.items()
                if len(p) == len(prefix) + 1 and p[:-1] == prefix}

    @classmethod
    def build(cls, shape: IterTree, base: Union[Base, SpaceModel],
              sets: Mapping[Path, Union[SetRep, Iterable[Point]]], k: int = 0) -> "TFamily":
        """Family with every layer root filled in (whole space, resp. the
        parent component); all other paths must be given."""
        if isinstance(base, SpaceModel):
            base = Base(base)
        X = base.space
        given = {p: s if isinstance(s, SetRep) else X.set(s) for p, s in sets.items()}
        unknown = set(given) - set(all_paths(shape))
        if unknown:
            raise FamilyError(f"path {format_path(sorted(unknown)[0])} not in shape")
        full: Dict[Path, SetRep] = {}
        for p in all_paths(shape):
            if p[-1] == ():
                prefix = p[:-1]
                full[p] = SetRep(X, base.carrier) if not prefix else \
                    _tilde_from(full, prefix)
            elif p in given:
                full[p] = given[p]
            else:
                raise FamilyError(f"missing set for path {format_path(p)}")
        return cls(shape, base, full, k)


def _tilde_from(sets: Mapping[Path, SetRep], path: Path) -> SetRep:
    prefix, addr = path[:-1], path[-1]
    out = sets[path]
    for p, s in sets.items():
        if len(p) == len(path) and p[:-1] == prefix and _strict_ext(addr, p[-1]):
            out = out - s
    return out


def trivial_family(label: IterTree, base: Union[Base, SpaceModel], k: int = 0) -> TFamily:
    """The family of a base label or (nested) singleton tree: only layer roots."""
    if isinstance(base, SpaceModel):
        base = Base(base)
    if isinstance(label, BaseLabel):
        return TFamily(label, base, {}, k)
    return TFamily.build(label, base, {}, k)


def tilde(F: TFamily, path: Path) -> SetRep:
    """Component: U_path minus every strictly deeper set of the same layer."""
    if path not in F.sets:
        raise FamilyError(f"invalid path {format_path(path)}")
    cache = F._tilde
    if path not in cache:
        cache[path] = _tilde_from(F.sets, path)
    return cache[path]


# -- validation -------------------------------------------------------------

def problems(F: TFamily) -> List[str]:
    """Reasons F is not a T-family in its base; empty when valid."""
    out: List[str] = []
    expected = all_paths(F.shape)
    if set(F.sets) != set(expected):
        miss = sorted(set(expected) - set(F.sets))
        extra = sorted(set(F.sets) - set(expected))
        if miss:
            out.append(f"missing path {format_path(miss[0])}")
        if extra:
            out.append(f"unexpected path {format_path(extra[0])}")
        return out
    X = F.space
    for p in expected:
        if F.sets[p].space != X:
            out.append(f"set at {format_path(p)} lives in another space")
            return out
    for p in expected:
        prefix, addr = p[:-1], p[-1]
        layer_base = F.base if not prefix else F.base.shifted(len(prefix))
        parent = SetRep(X, F.base.carrier) if not prefix else tilde(F, prefix)
        S = F.sets[p]
        if addr == () and S != parent:
            out.append(f"root set at {format_path(p)} is not "
                       + ("the whole space" if not prefix else "the parent component"))
        if not S <= parent:
            out.append(f"set at {format_path(p)} leaves its parent component")
            continue
        if prefix:
            layer_base = layer_base.restrict(parent)
        if not layer_base.level_member(S, 0):
            out.append(f"set at {format_path(p)} is not in level {len(prefix)}")
    return out


def is_valid(F: TFamily) -> bool:
    return not problems(F)


def is_monotone(F: TFamily) -> bool:
    for p, S in F.sets.items():
        for q, R in F.sets.items():
            if len(q) == len(p) and q[:-1] == p[:-1] and _strict_ext(p[-1], q[-1]) \
                    and not R <= S:
                return False
    return True


def is_reduced(F: TFamily) -> bool:
    if not is_monotone(F):
        return False
    for p in F.sets:
        for q in F.sets:
            if p < q and len(p) == len(q) and p[:-1] == q[:-1]:
                a, b = p[-1], q[-1]
                if a and b and len(a) == len(b) and a[:-1] == b[:-1] \
                        and F.sets[p].points & F.sets[q].points:
                    return False
    return True


# -- monotonization and reduction -------------------------------------------

def monotonize(F: TFamily) -> TFamily:
    """Replace each set by the union of the sets at or below it in its layer."""
    new = {}
    for p, S in F.sets.items():
        out = S
        for q, R in F.sets.items():
            if len(q) == len(p) and q[:-1] == p[:-1] and _strict_ext(p[-1], q[-1]):
                out = out | R
        new[p] = out
    return TFamily(F.shape, F.base, new, F.k)


def reduce_family(F: TFamily) -> TFamily:
    """Reduct of F: top-down reduction of sibling sets, layer by layer.

    Each layer is monotonized and clipped to the (already reduced) parent
    component; then, walking down, the children of every node are replaced
    by a reduct inside their parent and all deeper sets are cut to the
    reduced child.  Raises :class:`~finehier.spaces.NoReduction` when a
    level of the base cannot be reduced.
    """
    if isinstance(F.shape, BaseLabel):
        return F
    X = F.space
    out: Dict[Path, SetRep] = {}

    def reduce_layer(prefix: Path, tree: Node, root: SetRep, base: Base) -> None:
        addrs = [a for a, _ in nodes(tree)]
        work = {}
        for a in addrs:
            S = F.sets[prefix + (a,)]
            for b in addrs:
                if _strict_ext(a, b):
                    S = S | F.sets[prefix + (b,)]
            work[a] = S & root
        V: Dict[Address, SetRep] = {(): root}
        for a, n in nodes(tree):
            kids = [a + (i,) for i in range(len(n.children))]
            if not kids:
                continue
            Rs = base.reduce_sequence([work[c] & V[a] for c in kids], 0)
            for c, R in zip(kids, Rs):
                V[c] = R
        for a in addrs:
            out[prefix + (a,)] = V[a]
        for a, n in nodes(tree):
            if isinstance(n.label, Node):
                comp = V[a]
                for b in addrs:
                    if _strict_ext(a, b):
                        comp = comp - V[b]
                reduce_layer(prefix + (a,), n.label, comp,
                             F.base.shifted(len(prefix) + 1).restrict(comp))

    reduce_layer((), F.shape, SetRep(X, F.base.carrier), F.base)
    return TFamily(F.shape, F.base, out, F.k)


# -- determination and evaluation -------------------------------------------

@dataclass
class Determination:
    partition: Optional[KPartition]
    point: Optional[Point] = None
    reason: str = ""
    labels: FrozenSet[int] = frozenset()

    @property
    def ok(self) -> bool:
        return self.partition is not None


def determine(F: TFamily) -> Determination:
    """The partition F determines, or a diagnostic point where it fails."""
    X = F.space
    carrier = sorted(F.base.carrier, key=X.sort_key)
    if isinstance(F.shape, BaseLabel):
        return Determination(KPartition(X, {x: F.shape.value for x in X.points}, F.k))
    found: Dict[Point, set] = {x: set() for x in carrier}
    for p in terminating_paths(F.shape):
        lab = label_at(F.shape, p).value
        for x in tilde(F, p).points:
            if x in found:
                found[x].add(lab)
    for x in carrier:
        if not found[x]:
            return Determination(None, x, "no terminating component contains the point")
        if len(found[x]) > 1:
            return Determination(None, x, "terminating components disagree",
                                 frozenset(found[x]))
    if set(carrier) != set(X.points):
        raise FamilyError("cannot determine a partition of a restricted base")
    return Determination(KPartition(X, {x: next(iter(found[x])) for x in carrier}, F.k))


@dataclass
class Evaluation:
    point: Point
    runs: List[Tuple[Path, int]]
    stalled: List[Path]

    @property
    def labels(self) -> FrozenSet[int]:
        return frozenset(lab for _, lab in self.runs)

    @property
    def value(self) -> Optional[int]:
        return next(iter(self.labels)) if len(self.labels) == 1 else None

    @property
    def conflict(self) -> bool:
        return len(self.labels) > 1


def evaluate(F: TFamily, x: Point) -> Evaluation:
    """Run the layered mind-change search for ``x`` along every admissible branch.

    At each layer the search looks for components containing ``x``; a
    component with a base label ends the run with that label, otherwise the
    search descends into the nested family below it.
    """
    if isinstance(F.shape, BaseLabel):
        return Evaluation(x, [((), F.shape.value)], [])
    runs: List[Tuple[Path, int]] = []
    stalled: List[Path] = []

    def search(prefix: Path, tree: Node) -> bool:
        hit = False
        for a, n in nodes(tree):
            p = prefix + (a,)
            if x not in tilde(F, p).points:
                continue
            hit = True
            if isinstance(n.label, BaseLabel):
                runs.append((p, n.label.value))
            elif not search(p, n.label):
                stalled.append(p)
        return hit

    search((), F.shape)
    return Evaluation(x, runs, stalled)


# -- change of space --------------------------------------------------------

def pullback(f: SpaceMap, F: TFamily) -> TFamily:
    """Layer-wise preimage of a family over ``f``'s codomain."""
    if F.space != f.codomain:
        raise FamilyError("family does not live on the map's codomain")
    if not is_continuous(f):
        raise NotContinuous("pullback needs a continuous map")
    restriction = None
    if F.base.restriction is not None:
        restriction = f.preimage(SetRep(f.codomain, F.base.restriction)).points
    base = Base(f.domain, F.base.shift, restriction)
    return TFamily(F.shape, base, {p: f.preimage(S) for p, S in F.sets.items()}, F.k)


# -- text format ------------------------------------------------------------

def format_address(a: Address) -> str:
    return ".".join(["r"] + [str(i) for i in a])


def format_path(p: Path) -> str:
    return "/".join(format_address(a) for a in p)


def parse_path(text: str) -> Path:
    out = []
    for part in text.strip().split("/"):
        bits = part.strip().split(".")
        if bits[0] != "r" or not all(b.isdigit() for b in bits[1:]):
            raise SpaceFormatError(f"bad path component {part!r}")
        out.append(tuple(int(b) for b in bits[1:]))
    return tuple(out)


def format_family(F: TFamily) -> str:
    lines = [format_tree(F.shape)]
    for p in all_paths(F.shape):
        lines.append(f"{format_path(p)} => {format_set(F.sets[p])}")
    return "\n".join(lines) + "\n"


def parse_family(text: str, space: Union[SpaceModel, Base]) -> TFamily:
    base = space if isinstance(space, Base) else Base(space)
    tree_lines, set_lines = [], []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        (set_lines if "=>" in line else tree_lines).append(line)
    if not tree_lines:
        raise SpaceFormatError("family file has no shape tree")
    shape = parse_tree(" ".join(tree_lines))
    sets = {}
    for line in set_lines:
        lhs, rhs = line.split("=>", 1)
        sets[parse_path(lhs)] = parse_set(rhs, base.space)
    try:
        return TFamily.build(shape, base, sets)
    except FamilyError as e:
        raise SpaceFormatError(str(e)) from e
