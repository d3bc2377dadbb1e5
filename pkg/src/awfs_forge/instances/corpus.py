"""Seeded random corpora of small groupoids, maps, slices and squares.

Groupoids are disjoint unions of action groupoids of Z/1, Z/2, Z/3 on at
most four points.  Functors are sampled constructively (root images, tree
arrows, a vertex-group homomorphism), so no enumeration cap applies.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import permutations

from ..awfs import FibredAwfs, RMapStruct, free_rmap, rmap_pullback
from ..errors import CapExceeded
from ..gpd import (
    BZ2,
    D2,
    IVL,
    ONE,
    FinGroupoid,
    GroupoidMap,
    SliceMap,
    SliceObject,
    SliceSquare,
    Square,
    action_groupoid,
    as_terminal_map,
    disjoint_union,
    global_map,
    identity,
    product,
    pullback,
)
from .oracle import _generating_set, _homomorphisms, _spanning_forest, enumerate_functors

FIXTURES = {"ONE": ONE, "IVL": IVL, "BZ2": BZ2, "D2": D2}


@dataclass(frozen=True)
class CorpusSpec:
    seed: int = 42
    n_slices: int = 50
    max_objects: int = 6
    max_arrows: int = 24

    def rng(self, salt: str = "") -> random.Random:
        return random.Random(f"{self.seed}:{salt}")

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "n_slices": self.n_slices,
            "max_objects": self.max_objects,
            "max_arrows": self.max_arrows,
        }


def _perms_of_order_dividing(points: int, order: int) -> list[tuple]:
    out = []
    for p in permutations(range(points)):
        q = list(range(points))
        for _ in range(order):
            q = [p[i] for i in q]
        if q == list(range(points)):
            out.append(p)
    return out


def random_groupoid(rng: random.Random, max_objects: int = 6, max_arrows: int = 24) -> FinGroupoid:
    """A disjoint union of small action groupoids within the size caps."""
    parts: list[FinGroupoid] = []
    n_obj = n_arr = 0
    for _ in range(rng.randint(1, 3)):
        order = rng.choice((1, 2, 3))
        points = rng.randint(1, 4)
        if n_obj + points > max_objects or n_arr + order * points > max_arrows:
            continue
        shifts = rng.choice(_perms_of_order_dividing(points, order))
        parts.append(action_groupoid(order, points, shifts))
        n_obj += points
        n_arr += order * points
    if not parts:
        return ONE
    if len(parts) == 1:
        return _relabel(parts[0])
    return _relabel(disjoint_union(parts))


def _relabel(G: FinGroupoid) -> FinGroupoid:
    """Same groupoid with integer ids, so corpus items print compactly."""
    ob = {x: i for i, x in enumerate(G.objects)}
    ar = {a: i for i, a in enumerate(G.arrows)}
    return FinGroupoid(
        list(ob.values()),
        {ar[a]: (ob[G.src(a)], ob[G.tgt(a)]) for a in G.arrows},
        {ob[x]: ar[G.ident(x)] for x in G.objects},
        {(ar[g], ar[f]): ar[G.comp(g, f)] for f in G.arrows for g in G.out(G.tgt(f))},
        {ar[a]: ar[G.inv(a)] for a in G.arrows},
        name=G.name,
    )


def small_groupoid(rng: random.Random) -> FinGroupoid:
    """A fixture or a random groupoid with at most four arrows."""
    if rng.random() < 0.6:
        return FIXTURES[rng.choice(sorted(FIXTURES))]
    return random_groupoid(rng, max_objects=3, max_arrows=4)


def random_functor(rng: random.Random, D: FinGroupoid, C: FinGroupoid) -> GroupoidMap:
    """A functor chosen by sampling root images, tree arrows and a homomorphism."""
    roots, tree = _spanning_forest(D)
    F0: dict = {}
    F1: dict = {}
    for r in roots:
        members = [x for x in D.objects if tree[x][0] == r]
        c = rng.choice(C.objects)
        h = rng.choice(_homomorphisms(D, C, r, c, _generating_set(D, r)))
        t_img = {x: (C.ident(c) if x == r else rng.choice(C.out(c))) for x in members}
        for x in members:
            F0[x] = C.tgt(t_img[x])
            for a in D.out(x):
                y = D.tgt(a)
                g = D.chain(D.inv(tree[y][1]), a, tree[x][1])
                F1[a] = C.chain(t_img[y], h[g], C.inv(t_img[x]))
    return GroupoidMap(D, C, F0, F1)


def random_slice(rng: random.Random, G: FinGroupoid) -> SliceObject:
    X = small_groupoid(rng)
    return SliceObject(X, random_functor(rng, X, G))


def random_slice_map(rng: random.Random, Y: SliceObject) -> SliceMap:
    """A map into ``Y`` from a freshly sampled object over the same base."""
    X = small_groupoid(rng)
    f = random_functor(rng, X, Y.total)
    return SliceMap(SliceObject(X, Y.anchor @ f), Y, f)


def random_isofibration(rng: random.Random, I: FibredAwfs, G: FinGroupoid) -> RMapStruct:
    """A global R-map into ``G`` with a chosen structure.

    Either a product projection ``G × F -> G`` with a found structure, or the
    free R-structure on ``R(f)`` for a random global ``f`` into ``G``.  The
    second kind has a larger domain, so it is drawn only over tiny ``G``.
    """
    if rng.random() < 0.5 or len(G.arrows) > 2:
        pb = product(G, small_groupoid(rng))
        rs = I.find_rstructure(global_map(pb.pi1))
        if rs is not None:
            return rs
    X = small_groupoid(rng)
    return free_rmap(I, global_map(random_functor(rng, X, G)))


def fibrant_slice(rng: random.Random, I: FibredAwfs, G: FinGroupoid) -> tuple[SliceObject, RMapStruct]:
    """An object over ``G`` whose anchor carries a global R-structure."""
    rs = random_isofibration(rng, I, G)
    return SliceObject(rs.f.src.total, rs.f.map), rs


def random_base_change(rng: random.Random, G: FinGroupoid) -> GroupoidMap:
    """A map ``Δ -> G`` to reindex along."""
    D = small_groupoid(rng)
    return random_functor(rng, D, G)


def pullback_square(f: GroupoidMap, k: GroupoidMap) -> Square:
    """The chosen pullback of ``f`` along ``k`` as a square ``(h, k): f' -> f``."""
    pb = pullback(k, f)
    return Square(top=pb.pi2, left=pb.pi1, right=f, bottom=k)


def random_pullback_square(rng: random.Random, I: FibredAwfs, G: FinGroupoid | None = None):
    """``(square, rf, rf')`` for a random global R-map and base change."""
    G = G if G is not None else small_groupoid(rng)
    rf = random_isofibration(rng, I, G)
    k = random_base_change(rng, G)
    sq = pullback_square(rf.f.map, k)
    ssq = SliceSquare(
        top=global_map(sq.top), left=global_map(sq.left), right=rf.f, bottom=global_map(sq.bottom)
    )
    return sq, rf, rmap_pullback(rf, ssq)


@dataclass(frozen=True, eq=False)
class FibrantMap:
    """A map ``f: (X,x) -> (Y,y)`` over ``Γ`` with R_1-structures on ``x`` and ``y``."""

    f: SliceMap
    rx: RMapStruct
    ry: RMapStruct


def maps_over(X: SliceObject, Y: SliceObject) -> list[GroupoidMap]:
    """All functors ``X -> Y`` commuting with the anchors."""
    xo, xa, yo, ya = X.anchor.obj, X.anchor.arr, Y.anchor.obj, Y.anchor.arr
    return enumerate_functors(
        X.total,
        Y.total,
        lambda x: [y for y in Y.total.objects if yo[y] == xo[x]],
        lambda a: [b for b in Y.total.arrows if ya[b] == xa[a]],
    )


def random_fibrant_map(rng: random.Random, I: FibredAwfs, G: FinGroupoid | None = None) -> FibrantMap:
    """A random map between fibrant objects over a small base.

    When no map over ``Γ`` exists between the sampled objects, the source
    anchor itself (a map to ``(Γ, id)``) is used instead.
    """
    G = G if G is not None else small_groupoid(rng)
    X, rx = fibrant_slice(rng, I, G)
    Y, ry = fibrant_slice(rng, I, G)
    try:
        maps = maps_over(X, Y)
    except CapExceeded:
        maps = []
    if maps:
        return FibrantMap(SliceMap(X, Y, rng.choice(maps)), rx, ry)
    r_id = I.find_rstructure(global_map(identity(G)))
    return FibrantMap(as_terminal_map(X), rx, r_id)
