"""Finite groupoids, functors between them, and chosen finite limits.

Composition is written in classical order: ``G.comp(g, f)`` is ``g∘f`` and
applies ``f`` first.  Ids are arbitrary hashables; groupoids built here by
limits use literal pairs, so reindexing is only pseudo-functorial and every
comparison between two constructions goes through a :class:`CanonIso`.
"""

from __future__ import annotations

import os
from collections import OrderedDict
from collections.abc import Callable, Hashable, Iterable, Mapping
from dataclasses import dataclass

from .errors import (
    BaseMismatch,
    CapExceeded,
    CompositionError,
    FunctorError,
    MalformedInput,
    NotAPullback,
    NotCommuting,
)

Obj = Hashable
Arr = Hashable

DEFAULT_CAP = 64
SMALL_BUDGET = 4096  # derived groupoids up to this many arrows get content keys
CACHE_SIZE = 256  # entries kept by each construction cache


class LruDict(OrderedDict):
    """A dict that forgets its least recently used entries beyond ``maxsize``.

    Construction caches hold derived groupoids with their memo tables, so
    an unbounded cache grows with every corpus item ever seen.
    """

    def __init__(self, maxsize: int = CACHE_SIZE):
        super().__init__()
        self.maxsize = maxsize

    def get(self, key, default=None):
        if key in self:
            self.move_to_end(key)
            return self[key]
        return default

    def __setitem__(self, key, value):
        super().__setitem__(key, value)
        self.move_to_end(key)
        while len(self) > self.maxsize:
            self.popitem(last=False)


def enumeration_cap() -> int:
    """Largest corner (in arrows) a brute-force enumeration will accept."""
    raw = os.environ.get("AWFS_FORGE_CAP")
    return int(raw) if raw else DEFAULT_CAP


def check_cap(*groupoids: "FinGroupoid", cap: int | None = None) -> None:
    cap = enumeration_cap() if cap is None else cap
    for g in groupoids:
        if len(g.arrows) > cap:
            raise CapExceeded(f"{g.name or 'groupoid'} has {len(g.arrows)} arrows > cap {cap}")


class FinGroupoid:
    """A finite groupoid.

    Input groupoids are *eager*: ``ends`` maps every arrow to its
    ``(src, tgt)`` pair and ``compose``/``inverse`` are tables or callables.
    Groupoids built by limits and cocylinders are *derived*: they answer
    incidence questions pointwise and only enumerate themselves when asked
    for ``objects`` or ``arrows``.  Derived groupoids compare by their
    construction key, eager ones by content.
    """

    def __init__(
        self,
        objects: Iterable[Obj],
        ends: Mapping[Arr, tuple[Obj, Obj]],
        identity: Mapping[Obj, Arr],
        compose: Mapping[tuple[Arr, Arr], Arr] | Callable[[Arr, Arr], Arr],
        inverse: Mapping[Arr, Arr] | Callable[[Arr], Arr],
        name: str | None = None,
    ):
        self.lazy = False
        self._objects = tuple(objects)
        self._ends = dict(ends)
        self._arrows = tuple(self._ends)
        self._identity = dict(identity)
        self._compose = compose
        self._inverse = inverse
        self.name = name
        self._out: dict[Obj, list[Arr]] | None = None
        self._hom: dict[tuple[Obj, Obj], list[Arr]] | None = None
        self._key = None
        self._hash = None

    @classmethod
    def derived(
        cls,
        key: tuple,
        *,
        objects_of: Callable[[], Iterable[Obj]],
        is_object: Callable[[Obj], bool],
        ends_of: Callable[[Arr], tuple[Obj, Obj] | None],
        out_of: Callable[[Obj], list[Arr]],
        ident: Callable[[Obj], Arr],
        compose: Callable[[Arr, Arr], Arr],
        inverse: Callable[[Arr], Arr],
        name: str | None = None,
    ) -> "FinGroupoid":
        G = cls.__new__(cls)
        G.lazy = True
        G.name = name
        G._key = key
        G._hash = None
        G._objects = None
        G._arrows = None
        G._objects_of = objects_of
        G._is_object = is_object
        G._ends_of = ends_of
        G._out_of = out_of
        G._ident_of = ident
        G._compose = compose
        G._inverse = inverse
        G._ends = {}
        G._out = {}
        G._hom = None
        G._comp_memo = {}
        G._inv_memo = {}
        return G

    # -- enumeration ---------------------------------------------------
    @property
    def objects(self) -> tuple:
        if self._objects is None:
            self._objects = tuple(self._objects_of())
        return self._objects

    @property
    def arrows(self) -> tuple:
        if self._arrows is None:
            self._arrows = tuple(a for x in self.objects for a in self.out(x))
        return self._arrows

    @property
    def materialized(self) -> bool:
        return not self.lazy or self._arrows is not None

    def small(self, budget: int = SMALL_BUDGET) -> bool:
        """Whether the groupoid has at most ``budget`` arrows.

        Derived groupoids are enumerated until the budget runs out; a
        groupoid that fits is left materialized.
        """
        if not self.lazy or self._arrows is not None:
            return len(self.arrows) <= budget
        verdict = self.__dict__.get("_small_verdict")
        if verdict is not None:
            return verdict
        count = 0
        for x in self.objects:
            count += len(self.out(x))
            if count > budget:
                self.__dict__["_small_verdict"] = False
                return False
        self.arrows
        self.__dict__["_small_verdict"] = True
        return True

    # -- incidence -----------------------------------------------------
    def src(self, a: Arr) -> Obj:
        return self.ends(a)[0]

    def tgt(self, a: Arr) -> Obj:
        return self.ends(a)[1]

    def ends(self, a: Arr) -> tuple[Obj, Obj]:
        e = self._ends.get(a)
        if e is None:
            if self.lazy:
                e = self._probe(a)
            if e is None:
                raise KeyError(a)
        return e

    def _probe(self, a):
        try:
            e = self._ends_of(a)
        except (KeyError, TypeError, ValueError, IndexError, CompositionError):
            e = None
        if e is not None:
            self._ends[a] = e
        return e

    def has_object(self, x: Obj) -> bool:
        if not self.lazy:
            return x in self._objset
        try:
            return bool(self._is_object(x))
        except (KeyError, TypeError, ValueError, IndexError):
            return False

    def has_arrow(self, a: Arr) -> bool:
        if a in self._ends:
            return True
        return self.lazy and self._probe(a) is not None

    @property
    def _objset(self) -> frozenset:
        s = self.__dict__.get("_objset_cache")
        if s is None:
            s = frozenset(self.objects)
            self.__dict__["_objset_cache"] = s
        return s

    def _index(self) -> None:
        out: dict[Obj, list[Arr]] = {x: [] for x in self.objects}
        for a, (s, _) in self._ends.items():
            out.setdefault(s, []).append(a)
        self._out = out

    def out(self, x: Obj) -> list[Arr]:
        if self.lazy:
            hit = self._out.get(x)
            if hit is None:
                hit = list(self._out_of(x))
                self._out[x] = hit
            return hit
        if self._out is None:
            self._index()
        return self._out.get(x, [])

    def hom(self, x: Obj, y: Obj) -> list[Arr]:
        return [a for a in self.out(x) if self.tgt(a) == y]

    # -- structure -----------------------------------------------------
    def ident(self, x: Obj) -> Arr:
        if self.lazy:
            return self._ident_of(x)
        return self._identity[x]

    def is_identity(self, a: Arr) -> bool:
        s, t = self.ends(a)
        return s == t and self.ident(s) == a

    def inv(self, a: Arr) -> Arr:
        if self.lazy:
            hit = self._inv_memo.get(a)
            if hit is None:
                hit = self._inv_memo[a] = self._inverse(a)
            return hit
        if callable(self._inverse):
            return self._inverse(a)
        return self._inverse[a]

    def comp(self, g: Arr, f: Arr) -> Arr:
        """``g∘f``; raises :class:`CompositionError` unless tgt f = src g."""
        if self.lazy:
            key = (g, f)
            hit = self._comp_memo.get(key)
            if hit is not None:
                return hit
        try:
            ok = self.ends(f)[1] == self.ends(g)[0]
        except KeyError:
            raise CompositionError(f"cannot compose {g!r} after {f!r}: unknown arrow") from None
        if not ok:
            raise CompositionError(f"cannot compose {g!r} after {f!r}")
        if callable(self._compose):
            gf = self._compose(g, f)
            if self.lazy:
                self._comp_memo[key] = gf
            return gf
        try:
            return self._compose[(g, f)]
        except KeyError:
            raise MalformedInput(f"composite of {g!r} after {f!r} is not tabulated") from None

    def chain(self, *arrows: Arr) -> Arr:
        """Compose right to left: ``chain(h, g, f) = h∘g∘f``."""
        acc = arrows[-1]
        for a in reversed(arrows[:-1]):
            acc = self.comp(a, acc)
        return acc

    # -- identity of groupoids ------------------------------------------
    @property
    def key(self):
        if self._key is None:
            self._key = (
                frozenset(self._objects),
                frozenset(self._ends.items()),
                frozenset(self._identity.items()),
            )
        return self._key

    def signature(self):
        """Content of the groupoid (enumerates derived groupoids)."""
        return (
            frozenset(self.objects),
            frozenset((a, self.ends(a)) for a in self.arrows),
            frozenset((x, self.ident(x)) for x in self.objects),
        )

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FinGroupoid):
            return NotImplemented
        if self.lazy != other.lazy:
            return False
        return hash(self) == hash(other) and self.key == other.key

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key)
        return self._hash

    def __repr__(self):
        label = self.name or "FinGroupoid"
        if not self.materialized:
            return f"<{label}: derived>"
        return f"<{label}: {len(self.objects)} objects, {len(self.arrows)} arrows>"


@dataclass(frozen=True)
class Violation:
    law: str
    witness: tuple


def validate_groupoid(G: FinGroupoid) -> list[Violation]:
    """Every violated groupoid law, or ``[]``.

    Dangling ids raise :class:`MalformedInput` instead of being reported,
    because no law can be stated about them.
    """
    objs = set(G.objects)
    if G.lazy:
        return _law_report(G)
    for a, (s, t) in G._ends.items():
        if s not in objs or t not in objs:
            raise MalformedInput(f"arrow {a!r} has undeclared endpoint")
    for x in objs:
        if x not in G._identity:
            raise MalformedInput(f"object {x!r} has no identity")
    for x, a in G._identity.items():
        if x not in objs or a not in G._ends:
            raise MalformedInput(f"identity entry {x!r}: {a!r} is dangling")
    if not callable(G._inverse):
        for a in G.arrows:
            if a not in G._inverse:
                raise MalformedInput(f"arrow {a!r} has no inverse entry")
        for a, b in G._inverse.items():
            if a not in G._ends or b not in G._ends:
                raise MalformedInput(f"inverse entry {a!r}: {b!r} is dangling")
    if not callable(G._compose):
        for (g, f), gf in G._compose.items():
            if g not in G._ends or f not in G._ends or gf not in G._ends:
                raise MalformedInput(f"compose entry ({g!r}, {f!r}) -> {gf!r} is dangling")
    return _law_report(G)


def _law_report(G: FinGroupoid) -> list[Violation]:
    report: list[Violation] = []

    def comp(g, f):
        try:
            return G.comp(g, f)
        except (MalformedInput, CompositionError, KeyError):
            return None

    for x in G.objects:
        i = G.ident(x)
        if G.ends(i) != (x, x):
            report.append(Violation("identity-ends", (x, i)))
    for f in G.arrows:
        s, t = G.ends(f)
        if comp(f, G.ident(s)) != f or comp(G.ident(t), f) != f:
            report.append(Violation("unit", (f,)))
        fi = G.inv(f)
        if not G.has_arrow(fi) or comp(fi, f) != G.ident(s) or comp(f, fi) != G.ident(t):
            report.append(Violation("inverse", (f,)))
        for g in G.out(t):
            gf = comp(g, f)
            if gf is None:
                report.append(Violation("compose-total", (g, f)))
                continue
            if G.ends(gf) != (s, G.tgt(g)):
                report.append(Violation("compose-ends", (g, f)))
                continue
            for h in G.out(G.tgt(g)):
                lhs = comp(h, gf)
                hg = comp(h, g)
                rhs = comp(hg, f) if hg is not None else None
                if lhs is None or lhs != rhs:
                    report.append(Violation("associativity", (h, g, f)))
    return report


def groupoid_from_tables(objects, arrows, compose, identity, inverse, name=None) -> FinGroupoid:
    """Build from plain tables; ``arrows`` is ``{id: (src, tgt)}``."""
    return FinGroupoid(objects, arrows, identity, dict(compose), dict(inverse), name=name)


def discrete(objects: Iterable[Obj], name: str | None = None) -> FinGroupoid:
    objs = list(objects)
    ends = {("id", x): (x, x) for x in objs}
    return FinGroupoid(
        objs,
        ends,
        {x: ("id", x) for x in objs},
        lambda g, f: f,
        lambda a: a,
        name=name,
    )


def action_groupoid(order: int, points: int, shifts: Iterable[int] | None = None, name=None) -> FinGroupoid:
    """Action groupoid of Z/order acting on ``points`` points.

    Point ``i`` is moved by generator ``1`` to ``shifts`` applied cyclically;
    by default the group acts by rotation when ``points == order`` and
    trivially otherwise.
    """
    if shifts is None:
        if points == order:
            perm = [(i + 1) % points for i in range(points)]
        else:
            perm = list(range(points))
    else:
        perm = list(shifts)

    def act(k, i):
        for _ in range(k % order):
            i = perm[i]
        return i

    for i in range(points):
        if act(order, i) != i:
            raise MalformedInput("shift permutation order does not divide group order")
    objs = list(range(points))
    ends = {(k, i): (i, act(k, i)) for i in objs for k in range(order)}
    return FinGroupoid(
        objs,
        ends,
        {i: (0, i) for i in objs},
        lambda g, f: ((g[0] + f[0]) % order, f[1]),
        lambda a: ((-a[0]) % order, act(a[0], a[1])),
        name=name,
    )


def disjoint_union(parts: list[FinGroupoid], name=None) -> FinGroupoid:
    objs = [(i, x) for i, p in enumerate(parts) for x in p.objects]
    ends = {(i, a): ((i, p.src(a)), (i, p.tgt(a))) for i, p in enumerate(parts) for a in p.arrows}
    ident = {(i, x): (i, p.ident(x)) for i, p in enumerate(parts) for x in p.objects}
    return FinGroupoid(
        objs,
        ends,
        ident,
        lambda g, f: (g[0], parts[g[0]].comp(g[1], f[1])),
        lambda a: (a[0], parts[a[0]].inv(a[1])),
        name=name,
    )


# ---------------------------------------------------------------------------
# Named fixtures
# ---------------------------------------------------------------------------

ONE = FinGroupoid([0], {0: (0, 0)}, {0: 0}, {(0, 0): 0}, {0: 0}, name="ONE")

IVL = groupoid_from_tables(
    [0, 1],
    {0: (0, 0), 1: (1, 1), 2: (0, 1), 3: (1, 0)},
    {
        (0, 0): 0, (1, 1): 1, (2, 0): 2, (1, 2): 2, (3, 1): 3, (0, 3): 3,
        (3, 2): 0, (2, 3): 1,
    },
    {0: 0, 1: 1},
    {0: 0, 1: 1, 2: 3, 3: 2},
    name="IVL",
)
IVL_U = 2  # the arrow u: 0 -> 1

BZ2 = groupoid_from_tables(
    [0],
    {0: (0, 0), 1: (0, 0)},
    {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 0},
    {0: 0},
    {0: 0, 1: 1},
    name="BZ2",
)
BZ2_E, BZ2_T = 0, 1

D2 = groupoid_from_tables(
    [0, 1],
    {0: (0, 0), 1: (1, 1)},
    {(0, 0): 0, (1, 1): 1},
    {0: 0, 1: 1},
    {0: 0, 1: 1},
    name="D2",
)


# ---------------------------------------------------------------------------
# Functors
# ---------------------------------------------------------------------------


class _Table:
    """Memoized pointwise table of a derived functor; iterates its domain on demand."""

    __slots__ = ("fn", "memo", "dom", "kind")

    def __init__(self, fn, dom, kind):
        self.fn = fn
        self.memo = {}
        self.dom = dom
        self.kind = kind

    def __getitem__(self, k):
        try:
            return self.memo[k]
        except KeyError:
            v = self.memo[k] = self.fn(k)
            return v

    def _keys(self):
        return self.dom.objects if self.kind == "obj" else self.dom.arrows

    def __iter__(self):
        return iter(self._keys())

    def __len__(self):
        return len(self._keys())

    def keys(self):
        return self._keys()

    def items(self):
        for k in self._keys():
            yield k, self[k]

    def values(self):
        for k in self._keys():
            yield self[k]


class GroupoidMap:
    """A functor ``dom -> cod``.

    Maps out of eager groupoids are stored as object and arrow tables.
    Maps out of derived groupoids are evaluated pointwise (memoized) and
    carry a construction ``key``; equality falls back to comparing values
    over the whole domain when keys differ.
    """

    __slots__ = ("dom", "cod", "obj", "arr", "key", "_hash", "_skey")

    def __init__(self, dom: FinGroupoid, cod: FinGroupoid, obj: Mapping, arr: Mapping):
        self.dom = dom
        self.cod = cod
        self.obj = dict(obj)
        self.arr = dict(arr)
        self.key = None
        self._hash = None
        self._skey = None

    @classmethod
    def lazy(cls, dom, cod, obj_fn, arr_fn, key) -> "GroupoidMap":
        """Pointwise map; tabulated at once when ``dom`` is eager."""
        if not dom.lazy:
            return cls(dom, cod, {x: obj_fn(x) for x in dom.objects}, {a: arr_fn(a) for a in dom.arrows})
        F = cls.__new__(cls)
        F.dom, F.cod = dom, cod
        F.obj = _Table(obj_fn, dom, "obj")
        F.arr = _Table(arr_fn, dom, "arr")
        F.key = key
        F._hash = None
        F._skey = key
        return F

    @property
    def tabulated(self) -> bool:
        return isinstance(self.obj, dict)

    @property
    def skey(self):
        """Structural identity: the construction key, or the tables themselves.

        Used for caching and for identifying derived groupoids; it never
        evaluates a derived map.
        """
        if self._skey is None or (self._skey is self.key and self.dom.small()):
            self._skey = (
                "tab",
                self.dom,
                self.cod,
                frozenset(self.obj.items()),
                frozenset(self.arr.items()),
            )
        return self._skey

    @classmethod
    def build(cls, dom, cod, obj_fn, arr_fn) -> "GroupoidMap":
        """Tabulate ``obj_fn``/``arr_fn`` over ``dom`` and check incidence.

        Over a derived ``dom`` the map stays pointwise and incidence is
        checked for each element as it is first evaluated.
        """
        if not dom.lazy:
            obj = {x: obj_fn(x) for x in dom.objects}
            arr = {a: arr_fn(a) for a in dom.arrows}
            F = cls(dom, cod, obj, arr)
            F.check_incidence()
            return F
        holder: list = []

        def on_obj(x):
            y = obj_fn(x)
            if not cod.has_object(y):
                raise FunctorError(f"object {x!r} sent to {y!r}, not in codomain")
            return y

        def on_arr(a):
            b = arr_fn(a)
            if not cod.has_arrow(b):
                raise FunctorError(f"arrow {a!r} sent to {b!r}, not in codomain")
            s, t = dom.ends(a)
            F = holder[0]
            if cod.ends(b) != (F.obj[s], F.obj[t]):
                raise FunctorError(f"arrow {a!r} sent to {b!r} with wrong endpoints")
            return b

        F = cls.lazy(dom, cod, on_obj, on_arr, ("build", dom, cod, object()))
        holder.append(F)
        return F

    def check_incidence(self) -> None:
        cod = self.cod
        for x, y in self.obj.items():
            if not cod.has_object(y):
                raise FunctorError(f"object {x!r} sent to {y!r}, not in codomain")
        for a, b in self.arr.items():
            if not cod.has_arrow(b):
                raise FunctorError(f"arrow {a!r} sent to {b!r}, not in codomain")
            s, t = self.dom.ends(a)
            if cod.ends(b) != (self.obj[s], self.obj[t]):
                raise FunctorError(f"arrow {a!r} sent to {b!r} with wrong endpoints")

    def ob(self, x):
        return self.obj[x]

    def ar(self, a):
        return self.arr[a]

    def tabulate(self) -> "GroupoidMap":
        """The same functor with explicit tables (enumerates the domain)."""
        if self.tabulated:
            return self
        return GroupoidMap(self.dom, self.cod, dict(self.obj.items()), dict(self.arr.items()))

    def __matmul__(self, other: "GroupoidMap") -> "GroupoidMap":
        """``self @ other`` is ``self∘other``."""
        if other.cod is not self.dom and other.cod != self.dom:
            raise BaseMismatch(f"cannot compose {self!r} after {other!r}")
        o, a = self.obj, self.arr
        if other.tabulated:
            return GroupoidMap(
                other.dom,
                self.cod,
                {x: o[y] for x, y in other.obj.items()},
                {f: a[g] for f, g in other.arr.items()},
            )
        oo, oa = other.obj, other.arr
        return GroupoidMap.lazy(
            other.dom, self.cod, lambda x: o[oo[x]], lambda f: a[oa[f]], ("comp", self.skey, other.skey)
        )

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, GroupoidMap):
            return NotImplemented
        if self.dom != other.dom or self.cod != other.cod:
            return False
        if self.cod == ONE:
            return True
        if self.tabulated and other.tabulated:
            return self.obj == other.obj and self.arr == other.arr
        if self.skey == other.skey:
            return True
        return _agree(self, other) is None

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dom, self.cod))
        return self._hash

    def __repr__(self):
        return f"<GroupoidMap {self.dom!r} -> {self.cod!r}>"

    def is_bijective(self) -> bool:
        objs = list(self.obj.values())
        arrs = list(self.arr.values())
        return (
            len(set(objs)) == len(objs) == len(self.cod.objects)
            and len(set(arrs)) == len(arrs) == len(self.cod.arrows)
        )


def _agree(F: GroupoidMap, G: GroupoidMap):
    for x, y in F.obj.items():
        if G.obj[x] != y:
            return ("object", x, y, G.obj[x])
    for a, b in F.arr.items():
        if G.arr[a] != b:
            return ("arrow", a, b, G.arr[a])
    return None


def identity(G: FinGroupoid) -> GroupoidMap:
    return GroupoidMap.lazy(G, G, lambda x: x, lambda a: a, ("id", G))


def bang(G: FinGroupoid) -> GroupoidMap:
    """The unique map ``G -> ONE``."""
    return GroupoidMap.lazy(G, ONE, lambda x: 0, lambda a: 0, ("bang", G))


def point(G: FinGroupoid, x: Obj) -> GroupoidMap:
    """The map ``ONE -> G`` picking ``x``."""
    return GroupoidMap(ONE, G, {0: x}, {0: G.ident(x)})


def check_functor(F: GroupoidMap) -> list[Violation]:
    """Identity and composition violations of ``F`` (incidence assumed)."""
    report = []
    D, C = F.dom, F.cod
    for x in D.objects:
        if F.arr[D.ident(x)] != C.ident(F.obj[x]):
            report.append(Violation("functor-identity", (x,)))
    for f in D.arrows:
        for g in D.out(D.tgt(f)):
            if F.arr[D.comp(g, f)] != C.comp(F.arr[g], F.arr[f]):
                report.append(Violation("functor-composition", (g, f)))
    return report


def first_difference(F: GroupoidMap, G: GroupoidMap):
    """``None`` when ``F == G``; otherwise a small witness of disagreement."""
    if F.dom != G.dom or F.cod != G.cod:
        return ("type", repr(F), repr(G))
    if F is G or F.skey == G.skey:
        return None
    return _agree(F, G)


def invert(F: GroupoidMap) -> GroupoidMap:
    """Inverse of a bijective functor."""
    if not F.is_bijective():
        raise FunctorError(f"{F!r} is not bijective")
    return GroupoidMap(
        F.cod, F.dom, {y: x for x, y in F.obj.items()}, {b: a for a, b in F.arr.items()}
    )


@dataclass(frozen=True)
class CanonIso:
    """An explicit iso between two constructions of the same object."""

    fwd: GroupoidMap
    bwd: GroupoidMap

    def check(self) -> None:
        from .errors import LawViolation

        w = first_difference(self.bwd @ self.fwd, identity(self.fwd.dom))
        if w is None:
            w = first_difference(self.fwd @ self.bwd, identity(self.fwd.cod))
        if w is not None:
            raise LawViolation("canon-iso-inverse", w)

    @classmethod
    def of(cls, fwd: GroupoidMap) -> "CanonIso":
        iso = cls(fwd, invert(fwd))
        return iso

    def inverse(self) -> "CanonIso":
        return CanonIso(self.bwd, self.fwd)


# ---------------------------------------------------------------------------
# Squares and pullbacks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Square:
    """A square ``right∘top = bottom∘left``::

        A --top--> B
        |          |
       left      right
        v          v
        C -bottom> D
    """

    top: GroupoidMap
    left: GroupoidMap
    right: GroupoidMap
    bottom: GroupoidMap

    def commutes(self) -> bool:
        try:
            return self.right @ self.top == self.bottom @ self.left
        except BaseMismatch:
            return False

    def check(self) -> "Square":
        if not self.commutes():
            raise NotCommuting(f"square does not commute: {self!r}")
        return self


class Pullback:
    """The chosen pullback of ``f: A -> C`` and ``g: B -> C``.

    Objects and arrows are the literal matching pairs ``(a, b)``.  The apex
    is a derived groupoid, so nested pullbacks cost nothing until queried.
    """

    def __init__(self, f: GroupoidMap, g: GroupoidMap):
        if f.cod != g.cod:
            raise BaseMismatch("pullback legs have different codomains")
        A, B = f.dom, g.dom
        fo, fa, go, ga = f.obj, f.arr, g.obj, g.arr

        def objects_of():
            by_obj: dict = {}
            for b in B.objects:
                by_obj.setdefault(go[b], []).append(b)
            return [(a, b) for a in A.objects for b in by_obj.get(fo[a], ())]

        def is_object(p):
            a, b = p
            return A.has_object(a) and B.has_object(b) and fo[a] == go[b]

        def ends_of(e):
            alpha, beta = e
            if not (A.has_arrow(alpha) and B.has_arrow(beta)) or fa[alpha] != ga[beta]:
                return None
            s, t = A.ends(alpha)
            bs, bt = B.ends(beta)
            return ((s, bs), (t, bt))

        def out_of(p):
            a, b = p
            by_image: dict = {}
            for beta in B.out(b):
                by_image.setdefault(ga[beta], []).append(beta)
            return [(alpha, beta) for alpha in A.out(a) for beta in by_image.get(fa[alpha], ())]

        self.f, self.g = f, g
        self.P = FinGroupoid.derived(
            ("pb", f.skey, g.skey),
            objects_of=objects_of,
            is_object=is_object,
            ends_of=ends_of,
            out_of=out_of,
            ident=lambda p: (A.ident(p[0]), B.ident(p[1])),
            compose=lambda q, p: (A.comp(q[0], p[0]), B.comp(q[1], p[1])),
            inverse=lambda p: (A.inv(p[0]), B.inv(p[1])),
            name=f"({A.name or 'A'} x {B.name or 'B'})",
        )
        P = self.P
        self.pi1 = GroupoidMap.lazy(P, A, _fst, _fst, ("pi1", P))
        self.pi2 = GroupoidMap.lazy(P, B, _snd, _snd, ("pi2", P))

    @property
    def square(self) -> Square:
        return Square(top=self.pi2, left=self.pi1, right=self.g, bottom=self.f)

    def mediate(self, u: GroupoidMap, v: GroupoidMap) -> GroupoidMap:
        """The unique map ``Q -> P`` with ``pi1∘m = u`` and ``pi2∘m = v``.

        For an eager ``Q`` the cone is checked up front; for a derived one
        each pair is checked as it is produced.
        """
        if u.dom != v.dom or u.cod != self.f.dom or v.cod != self.g.dom:
            raise BaseMismatch("cone legs do not match the pullback")
        fo, fa, go, ga = self.f.obj, self.f.arr, self.g.obj, self.g.arr
        uo, ua, vo, va = u.obj, u.arr, v.obj, v.arr
        if not u.dom.lazy:
            if self.f @ u != self.g @ v:
                raise NotCommuting("cone does not commute over the pullback")
            return GroupoidMap(
                u.dom,
                self.P,
                {x: (uo[x], vo[x]) for x in u.dom.objects},
                {a: (ua[a], va[a]) for a in u.dom.arrows},
            )

        def on_obj(x):
            p = (uo[x], vo[x])
            if fo[p[0]] != go[p[1]]:
                raise NotCommuting(f"cone does not commute at object {x!r}")
            return p

        def on_arr(a):
            p = (ua[a], va[a])
            if fa[p[0]] != ga[p[1]]:
                raise NotCommuting(f"cone does not commute at arrow {a!r}")
            return p

        return GroupoidMap.lazy(u.dom, self.P, on_obj, on_arr, ("med", self.P, u.skey, v.skey))

    def __iter__(self):
        yield self.P
        yield self.pi1
        yield self.pi2
        yield self.mediate


def _fst(p):
    return p[0]


def _snd(p):
    return p[1]


_PULLBACKS = LruDict()


def pullback(f: GroupoidMap, g: GroupoidMap) -> Pullback:
    """Chosen pullback; memoized so repeated constructions share one object."""
    key = (f.skey, g.skey)
    hit = _PULLBACKS.get(key)
    if hit is None:
        hit = _PULLBACKS[key] = Pullback(f, g)
    return hit


def product(A: FinGroupoid, B: FinGroupoid) -> Pullback:
    return pullback(bang(A), bang(B))


def pair_map(pb: Pullback, u: GroupoidMap, v: GroupoidMap) -> GroupoidMap:
    return pb.mediate(u, v)


def pullback_comparison(sq: Square) -> GroupoidMap:
    """Canonical map from the apex of ``sq`` into the chosen pullback."""
    sq.check()
    return pullback(sq.right, sq.bottom).mediate(sq.top, sq.left)


def is_pullback_square(sq: Square) -> bool:
    """True iff the comparison into the chosen pullback is an isomorphism."""
    return pullback_comparison(sq).is_bijective()


def square_mediate(sq: Square, u: GroupoidMap, v: GroupoidMap) -> GroupoidMap:
    """Mediate a cone ``(u into B, v into C)`` into the apex of a cartesian ``sq``."""
    c = pullback_comparison(sq)
    if not c.is_bijective():
        raise NotAPullback("square is not cartesian")
    return invert(c) @ pullback(sq.right, sq.bottom).mediate(u, v)


# ---------------------------------------------------------------------------
# Slices
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SliceObject:
    total: FinGroupoid
    anchor: GroupoidMap

    def __post_init__(self):
        if self.anchor.dom != self.total:
            raise BaseMismatch("anchor does not start at the total groupoid")

    @property
    def base(self) -> FinGroupoid:
        return self.anchor.cod

    def __eq__(self, other):
        return isinstance(other, SliceObject) and self.anchor == other.anchor

    def __hash__(self):
        return hash(self.anchor)


@dataclass(frozen=True, eq=False)
class SliceMap:
    """A map ``src -> dst`` of objects over a common base."""

    src: SliceObject
    dst: SliceObject
    map: GroupoidMap

    def __post_init__(self):
        if self.src.base != self.dst.base:
            raise BaseMismatch("slice map endpoints lie over different bases")
        if self.map.dom != self.src.total or self.map.cod != self.dst.total:
            raise BaseMismatch("slice map has the wrong domain or codomain")
        if self.map.tabulated:
            self.verify()

    def verify(self) -> "SliceMap":
        """Check ``dst.anchor∘map = src.anchor``; derived maps defer this."""
        w = first_difference(self.dst.anchor @ self.map, self.src.anchor)
        if w is not None:
            raise NotCommuting(f"map does not lie over the base: {w!r}")
        return self

    @property
    def base(self) -> FinGroupoid:
        return self.src.base

    def __matmul__(self, other: "SliceMap") -> "SliceMap":
        return SliceMap(other.src, self.dst, self.map @ other.map)

    def __eq__(self, other):
        return (
            isinstance(other, SliceMap)
            and self.src == other.src
            and self.dst == other.dst
            and self.map == other.map
        )

    def __hash__(self):
        return hash((self.src, self.dst, self.map))


def slice_key(f: SliceMap):
    """Structural cache key of a slice map."""
    return (f.src.anchor.skey, f.dst.anchor.skey, f.map.skey)


def slice_identity(A: SliceObject) -> SliceMap:
    return SliceMap(A, A, identity(A.total))


def terminal_slice(base: FinGroupoid) -> SliceObject:
    return SliceObject(base, identity(base))


def as_terminal_map(A: SliceObject) -> SliceMap:
    """``A``'s anchor viewed as the map ``(A, a) -> (Γ, id)``."""
    return SliceMap(A, terminal_slice(A.base), A.anchor)


def global_object(X: FinGroupoid) -> SliceObject:
    return SliceObject(X, bang(X))


def global_map(f: GroupoidMap) -> SliceMap:
    return SliceMap(global_object(f.dom), global_object(f.cod), f)


def forget(f: SliceMap) -> SliceMap:
    """The underlying map of ``f``, regarded over ``ONE``."""
    return global_map(f.map)


@dataclass(frozen=True, eq=False)
class SliceSquare:
    """A morphism ``left -> right`` in the arrow category of a slice."""

    top: SliceMap
    left: SliceMap
    right: SliceMap
    bottom: SliceMap

    def __post_init__(self):
        if self.left.src != self.top.src or self.top.dst != self.right.src:
            raise BaseMismatch("square edges do not meet at the top")
        if self.left.dst != self.bottom.src or self.bottom.dst != self.right.dst:
            raise BaseMismatch("square edges do not meet at the bottom")

    @property
    def base(self) -> FinGroupoid:
        return self.top.base

    @property
    def square(self) -> Square:
        return Square(self.top.map, self.left.map, self.right.map, self.bottom.map)

    def check(self) -> "SliceSquare":
        self.square.check()
        return self


def slice_fiber_product(A: SliceObject, B: SliceObject) -> Pullback:
    """``A ×_Γ B`` as the chosen pullback of the two anchors."""
    if A.base != B.base:
        raise BaseMismatch("fiber product of objects over different bases")
    return pullback(A.anchor, B.anchor)


def fiber_product_slice(A: SliceObject, B: SliceObject) -> tuple[SliceObject, Pullback]:
    pb = slice_fiber_product(A, B)
    return SliceObject(pb.P, A.anchor @ pb.pi1), pb


def reindex_slice(sigma: GroupoidMap, A: SliceObject) -> tuple[SliceObject, Square]:
    """Pull ``A`` back along ``σ: Δ -> Γ``; the result is anchored by ``pi1``."""
    if sigma.cod != A.base:
        raise BaseMismatch("reindexing map does not land in the base of the slice")
    pb = pullback(sigma, A.anchor)
    return SliceObject(pb.P, pb.pi1), Square(top=pb.pi2, left=pb.pi1, right=A.anchor, bottom=sigma)


def reindex_map(sigma: GroupoidMap, f: SliceMap) -> SliceMap:
    """``σ*f`` between the chosen reindexings of source and target."""
    src, _ = reindex_slice(sigma, f.src)
    dst, _ = reindex_slice(sigma, f.dst)
    pb_src = pullback(sigma, f.src.anchor)
    pb_dst = pullback(sigma, f.dst.anchor)
    m = pb_dst.mediate(pb_src.pi1, f.map @ pb_src.pi2)
    return SliceMap(src, dst, m)


def reindex_projection(sigma: GroupoidMap, A: SliceObject) -> GroupoidMap:
    """The cartesian projection ``σ*A -> A``."""
    return pullback(sigma, A.anchor).pi2


def reindex_comparison(sigma: GroupoidMap, tau: GroupoidMap, A: SliceObject) -> CanonIso:
    """``τ*(σ*A) ≅ (σ∘τ)*A``, both legs produced by ``mediate``."""
    once, _ = reindex_slice(sigma @ tau, A)
    first, _ = reindex_slice(sigma, A)
    twice, _ = reindex_slice(tau, first)
    pb_once = pullback(sigma @ tau, A.anchor)
    pb_first = pullback(sigma, A.anchor)
    pb_twice = pullback(tau, first.anchor)
    fwd = pb_once.mediate(pb_twice.pi1, pb_first.pi2 @ pb_twice.pi2)
    inner = pb_first.mediate(tau @ pb_once.pi1, pb_once.pi2)
    bwd = pb_twice.mediate(pb_once.pi1, inner)
    iso = CanonIso(fwd, bwd)
    iso.check()
    return iso
