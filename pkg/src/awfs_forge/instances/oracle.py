"""Brute-force oracles: enumerate functors between small groupoids.

Two unrelated enumeration strategies are provided so that they can check
each other:

* ``"backtrack"`` picks objects, then arrows one at a time, rejecting a
  partial assignment as soon as a composite of assigned arrows disagrees.
* ``"generators"`` fixes a spanning forest of the domain and a generating
  set of each root's vertex group; a functor is a choice of root image,
  tree-arrow images and a homomorphism of vertex groups.

Everything here refuses to run on groupoids with more arrows than the
enumeration cap.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable
from itertools import product as cartesian

from ..awfs import FibredAwfs, LMapStruct
from ..gpd import (
    BZ2,
    IVL,
    ONE,
    FinGroupoid,
    GroupoidMap,
    SliceMap,
    Square,
    check_cap,
)

ObjCands = Callable[[object], Iterable] | None
ArrCands = Callable[[object], Iterable] | None

STRATEGIES = ("backtrack", "generators")


def enumerate_functors(
    D: FinGroupoid,
    C: FinGroupoid,
    obj_cands: ObjCands = None,
    arr_cands: ArrCands = None,
    strategy: str = "backtrack",
    cap: int | None = None,
) -> list[GroupoidMap]:
    """All functors ``D -> C`` whose values lie in the given candidate sets."""
    check_cap(D, C, cap=cap)
    if strategy == "backtrack":
        found = _backtrack(D, C, obj_cands, arr_cands)
    elif strategy == "generators":
        found = _generators(D, C, obj_cands, arr_cands)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return [GroupoidMap(D, C, o, a) for o, a in found]


def _allowed(cands, key, default):
    if cands is None:
        return default
    got = cands(key)
    return default if got is None else set(got)


# -- strategy 1 --------------------------------------------------------------


def _backtrack(D, C, obj_cands, arr_cands):
    objs = list(D.objects)
    arrs = list(D.arrows)
    obj_choices = [[y for y in C.objects if y in _allowed(obj_cands, x, set(C.objects))] for x in objs]
    results = []
    for pick in cartesian(*obj_choices):
        F0 = dict(zip(objs, pick))
        allowed_arr = {a: _allowed(arr_cands, a, None) for a in arrs}
        _extend_arrows(D, C, F0, arrs, {}, 0, allowed_arr, results)
    return results


def _extend_arrows(D, C, F0, arrs, F1, i, allowed, results):
    if i == len(arrs):
        results.append((dict(F0), dict(F1)))
        return
    a = arrs[i]
    s, t = D.ends(a)
    options = C.hom(F0[s], F0[t])
    if allowed[a] is not None:
        options = [b for b in options if b in allowed[a]]
    if D.is_identity(a):
        options = [b for b in options if b == C.ident(F0[s])]
    for b in options:
        F1[a] = b
        if _consistent(D, C, F1, a):
            _extend_arrows(D, C, F0, arrs, F1, i + 1, allowed, results)
        del F1[a]


def _consistent(D, C, F1, a):
    """Every composite with ``a`` as a factor or as the result is respected."""
    s, t = D.ends(a)
    Fa = F1[a]
    for g in D.out(t):
        if g in F1:
            ga = D.comp(g, a)
            if ga in F1 and F1[ga] != C.comp(F1[g], Fa):
                return False
    for x in D.out(s):
        f = D.inv(x)
        if f in F1:
            af = D.comp(a, f)
            if af in F1 and F1[af] != C.comp(Fa, F1[f]):
                return False
        if x in F1:
            g = D.comp(a, D.inv(x))
            if g in F1 and Fa != C.comp(F1[g], F1[x]):
                return False
    return True


# -- strategy 2 --------------------------------------------------------------


def _spanning_forest(D):
    """Roots and, for every object, an arrow from its root."""
    tree: dict = {}
    roots = []
    for x in D.objects:
        if x in tree:
            continue
        roots.append(x)
        tree[x] = (x, D.ident(x))
        frontier = [x]
        while frontier:
            y = frontier.pop()
            for a in D.out(y):
                z = D.tgt(a)
                if z not in tree:
                    tree[z] = (x, D.comp(a, tree[y][1]))
                    frontier.append(z)
    return roots, tree


def _generating_set(D, r):
    group = D.hom(r, r)
    gens: list = []
    span = {D.ident(r)}
    for g in group:
        if g not in span:
            gens.append(g)
            span = _closure(D, span | {g})
    return gens


def _closure(D, elems):
    elems = set(elems)
    while True:
        new = {D.comp(a, b) for a in elems for b in elems} - elems
        if not new:
            return elems
        elems |= new


def _homomorphisms(D, C, r, c, gens):
    """All homomorphisms ``Aut(r) -> Aut(c)`` as dicts."""
    targets = C.hom(c, c)
    out = []
    for images in cartesian(targets, repeat=len(gens)):
        h = {D.ident(r): C.ident(c)}
        for g, im in zip(gens, images):
            h[g] = im
        ok = True
        changed = True
        while ok and changed:
            changed = False
            for x in list(h):
                for y in list(h):
                    xy = D.comp(x, y)
                    v = C.comp(h[x], h[y])
                    if xy in h:
                        if h[xy] != v:
                            ok = False
                            break
                    else:
                        h[xy] = v
                        changed = True
                if not ok:
                    break
        if ok:
            out.append(h)
    return out


def _generators(D, C, obj_cands, arr_cands):
    roots, tree = _spanning_forest(D)
    per_root = []
    for r in roots:
        members = [x for x in D.objects if tree[x][0] == r]
        gens = _generating_set(D, r)
        options = []
        for c in C.objects:
            for h in _homomorphisms(D, C, r, c, gens):
                tails = [x for x in members if x != r]
                choices = [C.out(c) for _ in tails]
                for pick in cartesian(*choices):
                    t_img = {r: C.ident(c)}
                    t_img.update(zip(tails, pick))
                    F0 = {x: C.tgt(t_img[x]) for x in members}
                    F1 = {}
                    for x in members:
                        for a in D.out(x):
                            y = D.tgt(a)
                            g = D.chain(D.inv(tree[y][1]), a, tree[x][1])
                            F1[a] = C.chain(t_img[y], h[g], C.inv(t_img[x]))
                    options.append((F0, F1))
        per_root.append(options)
    results = []
    for combo in cartesian(*per_root):
        F0, F1 = {}, {}
        for o, a in combo:
            F0.update(o)
            F1.update(a)
        if obj_cands is not None and any(
            (c := obj_cands(x)) is not None and F0[x] not in set(c) for x in D.objects
        ):
            continue
        if arr_cands is not None and any(
            (c := arr_cands(a)) is not None and F1[a] not in set(c) for a in D.arrows
        ):
            continue
        results.append((F0, F1))
    return results


# -- oracles built on enumeration --------------------------------------------


def brute_force_lifts(
    m: SliceMap,
    f: SliceMap,
    top: SliceMap,
    bottom: SliceMap,
    strategy: str = "backtrack",
    cap: int | None = None,
) -> list[GroupoidMap]:
    """Every diagonal ``j`` with ``j∘m = top`` and ``f∘j = bottom``."""
    A, B, X = m.src.total, m.dst.total, f.src.total
    fo, fa = f.map.obj, f.map.arr
    forced_obj = _forced(A.objects, m.map.obj, top.map.obj)
    forced_arr = _forced(A.arrows, m.map.arr, top.map.arr)

    def obj_cands(b):
        want = bottom.map.obj[b]
        return [x for x in forced_obj.get(b, X.objects) if fo[x] == want]

    def arr_cands(beta):
        want = bottom.map.arr[beta]
        return [x for x in forced_arr.get(beta, X.arrows) if fa[x] == want]

    return enumerate_functors(B, X, obj_cands, arr_cands, strategy=strategy, cap=cap)


PROBES = (ONE, IVL, BZ2)


def _forced(keys, along, values) -> dict:
    """Values pinned at ``along(k)`` by ``values(k)``; clashes pin nothing."""
    out: dict = {}
    for k in keys:
        out.setdefault(along[k], set()).add(values[k])
    return {b: (list(v) if len(v) == 1 else []) for b, v in out.items()}


def is_pullback_by_probes(sq: Square, probes=PROBES, cap: int | None = None) -> bool:
    """Universal property tested by counting cones from probe groupoids.

    For each probe ``T`` the functors ``T -> apex`` must correspond
    bijectively, via ``(top∘-, left∘-)``, to commuting pairs of functors into
    the two legs.  ``ONE`` and ``IVL`` probe objects and arrows, which
    already characterizes pullbacks of groupoids; ``BZ2`` is extra.
    """
    if not sq.commutes():
        return False
    P = sq.top.dom
    B, Cc = sq.top.cod, sq.left.cod
    for T in probes:
        into_P = enumerate_functors(T, P, cap=cap)
        images = {(_freeze(sq.top @ u), _freeze(sq.left @ u)) for u in into_P}
        if len(images) != len(into_P):
            return False
        into_B = enumerate_functors(T, B, cap=cap)
        into_C = enumerate_functors(T, Cc, cap=cap)
        cones = {
            (_freeze(u), _freeze(v))
            for u in into_B
            for v in into_C
            if sq.right @ u == sq.bottom @ v
        }
        if cones != images:
            return False
    return True


def _freeze(F: GroupoidMap):
    return (frozenset(F.obj.items()), frozenset(F.arr.items()))


def search_lstructure(I: FibredAwfs, m: SliceMap, cap: int | None = None) -> LMapStruct | None:
    """An L-structure on ``m`` found by enumerating sections of ``R(m)``."""
    fa = I.factor(m)
    K = fa.K.total
    B = m.dst.total
    Lo, La = fa.L.map.obj, fa.L.map.arr
    Ro, Ra = fa.R.map.obj, fa.R.map.arr
    by_obj: dict = {}
    for k in K.objects:
        by_obj.setdefault(Ro[k], []).append(k)
    by_arr: dict = {}
    for e in K.arrows:
        by_arr.setdefault(Ra[e], []).append(e)
    forced_obj = _forced(m.src.total.objects, m.map.obj, Lo)
    forced_arr = _forced(m.src.total.arrows, m.map.arr, La)

    def obj_cands(b):
        return [k for k in forced_obj.get(b, by_obj.get(b, [])) if Ro[k] == b]

    def arr_cands(beta):
        return [e for e in forced_arr.get(beta, by_arr.get(beta, [])) if Ra[e] == beta]

    for s in enumerate_functors(B, K, obj_cands, arr_cands, cap=cap):
        try:
            return LMapStruct(I, m, s)
        except Exception:  # noqa: BLE001 - a candidate failing the laws is skipped
            continue
    return None
