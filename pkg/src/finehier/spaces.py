"""Finite space models where every topological question is decidable.

Two backends:

* :class:`FinitePoset` -- an Alexandrov space; open sets are the up-sets.
* :class:`Cylinder` -- the strings of length ``d`` over ``b`` symbols with the
  cylinder topology truncated at depth ``d``.  At that depth every cylinder of
  a full-length string is a singleton, so the space is discrete.

Levels of the base follow the Borel pattern: level 0 is the open sets and
every higher level contains all subsets (a finite T0 space has every set a
difference of opens, hence in level 1).

File formats (line based, ``#`` comments)::

    elements: a b c            cylinder: b=2 d=3
    order: a<b b<c

Maps are ``a->x`` lines.  Cylinder sets are one generator string per line,
``-`` standing for the empty string.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import (Dict, FrozenSet, Hashable, Iterable, Iterator, List, Mapping,
                    Optional, Sequence, Tuple, Union)

Point = Hashable

MAX_CYLINDER_POINTS = 4096


class SpaceFormatError(ValueError):
    pass


class NoReduction(Exception):
    """The level lacks the reduction property for the given sets."""

    def __init__(self, message: str, point: Point, component: FrozenSet = frozenset()):
        super().__init__(f"{message} (witness point {point!r})")
        self.point = point
        self.component = component


class NotOpen(ValueError):
    pass


# -- models -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SpaceModel:
    points: Tuple[Point, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(self.points)})
        object.__setattr__(self, "_all", frozenset(self.points))

    @property
    def whole(self) -> "SetRep":
        return SetRep(self, self._all)

    @property
    def empty(self) -> "SetRep":
        return SetRep(self, frozenset())

    def set(self, points: Iterable[Point]) -> "SetRep":
        pts = frozenset(points)
        if not pts <= self._all:
            raise ValueError(f"points not in space: {sorted(map(str, pts - self._all))}")
        return SetRep(self, pts)

    def up(self, x: Point) -> FrozenSet:
        raise NotImplementedError

    def down(self, x: Point) -> FrozenSet:
        raise NotImplementedError

    def leq(self, x: Point, y: Point) -> bool:
        return y in self.up(x)

    def upclosure(self, pts: Iterable[Point]) -> FrozenSet:
        out = set()
        for x in pts:
            out |= self.up(x)
        return frozenset(out)

    def downclosure(self, pts: Iterable[Point]) -> FrozenSet:
        out = set()
        for x in pts:
            out |= self.down(x)
        return frozenset(out)

    def is_open_points(self, pts: FrozenSet) -> bool:
        return all(self.up(x) <= pts for x in pts)

    def open_sets(self) -> List[FrozenSet]:
        """Every open set, in canonical order (size, then sorted points)."""
        raise NotImplementedError

    def subsets(self, within: Optional[FrozenSet] = None) -> List[FrozenSet]:
        base = sorted(self._all if within is None else within, key=self.sort_key)
        out = [frozenset(c) for r in range(len(base) + 1) for c in itertools.combinations(base, r)]
        return out

    def sort_key(self, x: Point):
        return self._index[x]


@dataclass(frozen=True, eq=False)
class FinitePoset(SpaceModel):
    order: FrozenSet[Tuple[Point, Point]] = frozenset()

    def __post_init__(self) -> None:
        super().__post_init__()
        pts = self.points
        if len(set(pts)) != len(pts):
            raise ValueError("duplicate elements")
        rel = set(self.order) | {(x, x) for x in pts}
        for a, b in rel:
            if a not in self._index or b not in self._index:
                raise ValueError(f"order mentions unknown element in {a}<{b}")
        # reflexive-transitive closure
        changed = True
        while changed:
            changed = False
            for (a, b), (c, d) in itertools.product(list(rel), repeat=2):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
        for a, b in rel:
            if a != b and (b, a) in rel:
                raise ValueError(f"order is not antisymmetric: {a} and {b}")
        object.__setattr__(self, "order", frozenset(rel))
        ups = {x: frozenset(b for a, b in rel if a == x) for x in pts}
        downs = {x: frozenset(a for a, b in rel if b == x) for x in pts}
        object.__setattr__(self, "_up", ups)
        object.__setattr__(self, "_down", downs)
        object.__setattr__(self, "_opens", None)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, FinitePoset):
            return NotImplemented
        return set(self.points) == set(other.points) and self.order == other.order

    def __hash__(self) -> int:
        return hash((frozenset(self.points), self.order))

    def __repr__(self) -> str:
        return f"FinitePoset({list(self.points)!r}, covers={self.covers()!r})"

    def up(self, x: Point) -> FrozenSet:
        return self._up[x]

    def down(self, x: Point) -> FrozenSet:
        return self._down[x]

    def covers(self) -> List[Tuple[Point, Point]]:
        out = []
        for a, b in sorted(self.order, key=lambda p: (self._index[p[0]], self._index[p[1]])):
            if a == b:
                continue
            if not any(c not in (a, b) and (a, c) in self.order and (c, b) in self.order
                       for c in self.points):
                out.append((a, b))
        return out

    def open_sets(self) -> List[FrozenSet]:
        if self._opens is None:
            opens = [s for s in self.subsets() if self.is_open_points(s)]
            object.__setattr__(self, "_opens", opens)
        return self._opens

    def components(self, pts: FrozenSet) -> List[FrozenSet]:
        """Connected components of ``pts`` under comparability."""
        left = set(pts)
        out = []
        while left:
            seed = min(left, key=self.sort_key)
            comp = {seed}
            frontier = [seed]
            while frontier:
                x = frontier.pop()
                for y in (self.up(x) | self.down(x)) & left:
                    if y not in comp:
                        comp.add(y)
                        frontier.append(y)
            left -= comp
            out.append(frozenset(comp))
        return out


@dataclass(frozen=True, eq=False)
class Cylinder(SpaceModel):
    b: int = 2
    d: int = 1

    def __init__(self, b: int, d: int) -> None:
        if b < 2 or b > 10:
            raise ValueError("alphabet size must be between 2 and 10")
        if d < 1:
            raise ValueError("depth must be at least 1")
        if b ** d > MAX_CYLINDER_POINTS:
            raise ValueError(f"b**d exceeds the point budget {MAX_CYLINDER_POINTS}")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)
        pts = tuple("".join(w) for w in itertools.product("0123456789"[:b], repeat=d))
        object.__setattr__(self, "points", pts)
        self.__post_init__()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Cylinder):
            return NotImplemented
        return (self.b, self.d) == (other.b, other.d)

    def __hash__(self) -> int:
        return hash(("cylinder", self.b, self.d))

    def __repr__(self) -> str:
        return f"Cylinder(b={self.b}, d={self.d})"

    def up(self, x: Point) -> FrozenSet:
        return frozenset((x,))

    def down(self, x: Point) -> FrozenSet:
        return frozenset((x,))

    def components(self, pts: FrozenSet) -> List[FrozenSet]:
        return [frozenset((x,)) for x in sorted(pts, key=self.sort_key)]

    def open_sets(self) -> List[FrozenSet]:
        return self.subsets()

    def cylinder(self, prefix: str) -> "SetRep":
        if len(prefix) > self.d or any(c not in "0123456789"[:self.b] for c in prefix):
            raise ValueError(f"bad cylinder prefix {prefix!r}")
        return SetRep(self, frozenset(p for p in self.points if p.startswith(prefix)))

    def from_generators(self, gens: Iterable[str]) -> "SetRep":
        out = self.empty
        for g in gens:
            out = out | self.cylinder(g)
        return out

    def generators(self, pts: FrozenSet) -> List[str]:
        """Prefix-minimal normal form: maximal cylinders inside the set."""
        gens = []

        def walk(prefix: str) -> None:
            cyl = {p for p in self.points if p.startswith(prefix)}
            if cyl <= pts:
                if cyl:
                    gens.append(prefix)
                return
            if not cyl & pts:
                return
            for c in "0123456789"[:self.b]:
                walk(prefix + c)

        walk("")
        return gens


# -- sets -------------------------------------------------------------------

@dataclass(frozen=True)
class SetRep:
    space: SpaceModel
    points: FrozenSet

    def _check(self, other: "SetRep") -> None:
        if other.space is not self.space and other.space != self.space:
            raise ValueError("sets live in different spaces")

    def __or__(self, other: "SetRep") -> "SetRep":
        self._check(other)
        return SetRep(self.space, self.points | other.points)

    def __and__(self, other: "SetRep") -> "SetRep":
        self._check(other)
        return SetRep(self.space, self.points & other.points)

    def __sub__(self, other: "SetRep") -> "SetRep":
        self._check(other)
        return SetRep(self.space, self.points - other.points)

    def __le__(self, other: "SetRep") -> bool:
        self._check(other)
        return self.points <= other.points

    def __contains__(self, x: Point) -> bool:
        return x in self.points

    def __iter__(self):
        return iter(sorted(self.points, key=self.space.sort_key))

    def __len__(self) -> int:
        return len(self.points)

    def __bool__(self) -> bool:
        return bool(self.points)

    @property
    def generators(self) -> List[str]:
        if not isinstance(self.space, Cylinder):
            raise TypeError("generators exist for cylinder sets only")
        return self.space.generators(self.points)

    def __str__(self) -> str:
        return format_set(self)


def interior(S: SetRep) -> SetRep:
    X = S.space
    return SetRep(X, frozenset(x for x in S.points if X.up(x) <= S.points))


def closure(S: SetRep) -> SetRep:
    return SetRep(S.space, S.space.downclosure(S.points))


def is_open(S: SetRep) -> bool:
    return S.space.is_open_points(S.points)


def level_member(S: SetRep, n: int) -> bool:
    """Membership of S in level n of the Borel base of its space."""
    if n < 0:
        raise ValueError("levels start at 0")
    return True if n >= 1 else is_open(S)


def level_sets(X: SpaceModel, n: int, within: Optional[FrozenSet] = None) -> List[FrozenSet]:
    """Every set of level n contained in ``within``, in canonical order."""
    if n >= 1:
        return X.subsets(within)
    opens = X.open_sets()
    return opens if within is None else [s for s in opens if s <= within]


# -- reduction --------------------------------------------------------------

def reduce_sequence(Cs: Sequence[SetRep], n: int) -> List[SetRep]:
    """Pairwise disjoint R_i inside C_i of level n with the same union.

    Above level 0 every set is available and points go to the first C_i
    containing them.  At level 0 each R_i must stay open, so a whole
    comparability component of the union is assigned to the first C_i that
    contains it; when no single C_i does, :class:`NoReduction` is raised.
    """
    if not Cs:
        return []
    X = Cs[0].space
    for C in Cs:
        C._check(Cs[0])
        if not level_member(C, n):
            raise NotOpen(f"set {format_set(C)} is not in level {n}")
    union = frozenset().union(*(C.points for C in Cs))
    assigned: List[set] = [set() for _ in Cs]
    blocks = X.components(union) if n == 0 else [frozenset((x,)) for x in union]
    for block in blocks:
        for i, C in enumerate(Cs):
            if block <= C.points:
                assigned[i] |= block
                break
        else:
            shared = sorted((x for x in block if sum(x in C.points for C in Cs) > 1),
                            key=X.sort_key)
            raise NoReduction(f"no level-{n} reduct: a connected open piece is split "
                              "between the given sets", shared[0], block)
    return [SetRep(X, frozenset(a)) for a in assigned]


def reduce_pair(C0: SetRep, C1: SetRep, n: int) -> Tuple[SetRep, SetRep]:
    R0, R1 = reduce_sequence([C0, C1], n)
    return R0, R1


# -- bases: shifts and restrictions -----------------------------------------

@dataclass(frozen=True)
class Base:
    """Handle for the base of a space, possibly shifted and/or restricted.

    ``level_member(S, n)`` of the m-shift asks level n+m of the space; the
    U-restriction holds the traces ``U & S`` of level-n sets.
    """

    space: SpaceModel
    shift: int = 0
    restriction: Optional[FrozenSet] = None

    @property
    def carrier(self) -> FrozenSet:
        return self.space._all if self.restriction is None else self.restriction

    def shifted(self, m: int) -> "Base":
        return Base(self.space, self.shift + m, self.restriction)

    def restrict(self, U: SetRep) -> "Base":
        if not self.level_member(U, 0):
            raise NotOpen(f"restriction set {format_set(U)} is not in level 0 of the base")
        return Base(self.space, self.shift, U.points)

    def level_member(self, S: SetRep, n: int) -> bool:
        m = n + self.shift
        if not S.points <= self.carrier:
            return False
        if m >= 1:
            return True
        # S is a trace U & S' of an open S' iff the up-closure of S traces back to S
        return self.space.upclosure(S.points) & self.carrier == S.points

    def level_sets(self, n: int, within: Optional[FrozenSet] = None) -> List[FrozenSet]:
        inside = self.carrier if within is None else within & self.carrier
        return level_sets(self.space, n + self.shift, inside) if n + self.shift == 0 \
            else self.space.subsets(inside)

    def reduce_sequence(self, Cs: Sequence[SetRep], n: int) -> List[SetRep]:
        for C in Cs:
            if not self.level_member(C, n):
                raise NotOpen(f"set {format_set(C)} is not in level {n} of the base")
        return reduce_sequence(Cs, min(1, n + self.shift))


def shift_base(X: Union[SpaceModel, Base], m: int) -> Base:
    base = X if isinstance(X, Base) else Base(X)
    return base.shifted(m)


def restrict_base(X: Union[SpaceModel, Base], U: SetRep) -> Base:
    base = X if isinstance(X, Base) else Base(X)
    return base.restrict(U)


# -- maps -------------------------------------------------------------------

@dataclass(frozen=True)
class SpaceMap:
    domain: SpaceModel
    codomain: SpaceModel
    graph: Mapping[Point, Point]

    def __post_init__(self) -> None:
        g = dict(self.graph)
        missing = [x for x in self.domain.points if x not in g]
        if missing:
            raise ValueError(f"map is not total: no value at {missing[0]!r}")
        bad = [y for y in g.values() if y not in self.codomain._index]
        if bad:
            raise ValueError(f"map value {bad[0]!r} not in codomain")
        object.__setattr__(self, "graph", g)

    def __hash__(self) -> int:
        return hash((self.domain, self.codomain, tuple(sorted(self.graph.items(), key=str))))

    def __call__(self, x: Point) -> Point:
        return self.graph[x]

    def image(self, S: SetRep) -> SetRep:
        return SetRep(self.codomain, frozenset(self.graph[x] for x in S.points))

    def preimage(self, A: SetRep) -> SetRep:
        return SetRep(self.domain, frozenset(x for x in self.domain.points
                                             if self.graph[x] in A.points))

    def fiber(self, y: Point) -> FrozenSet:
        return frozenset(x for x in self.domain.points if self.graph[x] == y)


def is_continuous(f: SpaceMap) -> bool:
    X, Y = f.domain, f.codomain
    ok = all(X.is_open_points(f.preimage(SetRep(Y, Y.up(y))).points) for y in Y.points)
    if ok and isinstance(X, Cylinder) and isinstance(Y, Cylinder):
        ok = _is_prefix_induced(f)
    return ok


def _is_prefix_induced(f: SpaceMap) -> bool:
    # output prefix of length j may depend only on the input prefix of length j
    for j in range(f.domain.d + 1):
        seen: Dict[str, str] = {}
        for x in f.domain.points:
            out = f(x)[:j]
            if seen.setdefault(x[:j], out) != out:
                return False
    return f.domain.d == f.codomain.d


def is_open_map(f: SpaceMap) -> bool:
    X, Y = f.domain, f.codomain
    return all(Y.is_open_points(f.image(SetRep(X, X.up(x))).points) for x in X.points)


def is_surjection(f: SpaceMap) -> bool:
    return set(f.graph.values()) == set(f.codomain.points)


def identity_map(X: SpaceModel) -> SpaceMap:
    return SpaceMap(X, X, {x: x for x in X.points})


# -- enumeration of small posets --------------------------------------------

def enumerate_posets(n: int) -> List[FinitePoset]:
    """All partial orders on ``n`` points up to isomorphism (points 0..n-1)."""
    pts = list(range(n))
    pairs = [(a, b) for a in pts for b in pts if a < b or a > b]
    seen = set()
    out = []
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        rel = {p for p, bit in zip(pairs, bits) if bit}
        if any((b, a) in rel for a, b in rel):
            continue
        if any((a, d) not in rel for (a, b) in rel for (c, d) in rel if b == c and a != d):
            continue
        canon = min(tuple(sorted((perm[a], perm[b]) for a, b in rel))
                    for perm in itertools.permutations(pts))
        if canon in seen:
            continue
        seen.add(canon)
        out.append(FinitePoset(tuple(pts), frozenset(canon)))
    return out


def all_maps(X: SpaceModel, Y: SpaceModel) -> Iterator[SpaceMap]:
    for values in itertools.product(Y.points, repeat=len(X.points)):
        yield SpaceMap(X, Y, dict(zip(X.points, values)))


def sierpinski() -> FinitePoset:
    return FinitePoset(("bot", "top"), frozenset({("bot", "top")}))


def prefix_poset(addresses: Iterable[str]) -> FinitePoset:
    """Strings ordered by the prefix relation; opens are sets closed under extension."""
    pts = tuple(addresses)
    rel = {(a, b) for a in pts for b in pts if b.startswith(a)}
    return FinitePoset(pts, frozenset(rel))


# -- text formats -----------------------------------------------------------

def _lines(text: str) -> Iterator[str]:
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line


def parse_space(text: str) -> SpaceModel:
    elements = None
    order = []
    for line in _lines(text):
        key, _, rest = line.partition(":")
        key = key.strip()
        if key == "cylinder":
            params = dict(kv.split("=", 1) for kv in rest.split())
            try:
                return Cylinder(int(params["b"]), int(params["d"]))
            except (KeyError, ValueError) as e:
                raise SpaceFormatError(f"bad cylinder line {line!r}: {e}") from e
        elif key == "elements":
            elements = rest.split()
        elif key == "order":
            for rel in rest.split():
                if "<" not in rel:
                    raise SpaceFormatError(f"bad order relation {rel!r}")
                chain_ = rel.split("<")
                order.extend(zip(chain_, chain_[1:]))
        else:
            raise SpaceFormatError(f"unrecognized line {line!r}")
    if elements is None:
        raise SpaceFormatError("missing 'elements:' line")
    try:
        return FinitePoset(tuple(elements), frozenset(order))
    except ValueError as e:
        raise SpaceFormatError(str(e)) from e


def format_space(X: SpaceModel) -> str:
    if isinstance(X, Cylinder):
        return f"cylinder: b={X.b} d={X.d}\n"
    covers = " ".join(f"{a}<{b}" for a, b in X.covers())
    return f"elements: {' '.join(map(str, X.points))}\norder: {covers}\n"


def parse_map(text: str, X: SpaceModel, Y: SpaceModel) -> SpaceMap:
    graph = {}
    for line in _lines(text):
        if "->" not in line:
            raise SpaceFormatError(f"bad map line {line!r}")
        a, b = (s.strip() for s in line.split("->", 1))
        graph[_point(X, a)] = _point(Y, b)
    try:
        return SpaceMap(X, Y, graph)
    except ValueError as e:
        raise SpaceFormatError(str(e)) from e


def format_map(f: SpaceMap) -> str:
    return "".join(f"{x}->{f(x)}\n" for x in f.domain.points)


def _point(X: SpaceModel, token: str) -> Point:
    if token in X._index:
        return token
    if token.isdigit() and int(token) in X._index:
        return int(token)
    raise SpaceFormatError(f"unknown point {token!r}")


def parse_set(text: str, X: SpaceModel) -> SetRep:
    """``{a, b}`` (or bare whitespace-separated items); items are points of a
    poset or generator strings of a cylinder (``-`` = empty string)."""
    body = text.strip()
    if body.startswith("{"):
        if not body.endswith("}"):
            raise SpaceFormatError(f"unbalanced braces in {text!r}")
        body = body[1:-1]
    items = [s for s in body.replace(",", " ").split() if s]
    if isinstance(X, Cylinder):
        gens = ["" if s == "-" else s for s in items]
        try:
            return X.from_generators(gens)
        except ValueError as e:
            raise SpaceFormatError(str(e)) from e
    return SetRep(X, frozenset(_point(X, s) for s in items))


def format_set(S: SetRep) -> str:
    if isinstance(S.space, Cylinder):
        items = [g or "-" for g in S.generators]
    else:
        items = [str(x) for x in S]
    return "{" + ", ".join(items) + "}"


def parse_cylinder_set(text: str, X: Cylinder) -> SetRep:
    return parse_set(" ".join(_lines(text)), X)


def format_cylinder_set(S: SetRep) -> str:
    return "".join((g or "-") + "\n" for g in S.generators)
