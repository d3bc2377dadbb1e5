"""Injective-on-objects maps against surjective equivalences, on finite groupoids.

``f: X -> Y`` factors through ``K(f)``, whose objects are the tagged
objects ``(0, x)`` of ``X`` and ``(1, y)`` of ``Y`` and whose arrows
``κ -> κ'`` are the arrows ``R κ -> R κ'`` of ``Y``.  ``L`` is the inclusion
of ``X`` (injective on objects), ``R`` is fully faithful and surjective on
objects.  Over a base ``Γ`` the same recipe is used, anchored through ``Y``.

This awfs preserves pullbacks on its right factor, so it is strongly
fibred.  Its R-maps are the maps that are surjective on objects and fully
faithful, and the L-structure on an injective-on-objects map is unique.
"""

from __future__ import annotations

from collections.abc import Callable

from ..awfs import Factorization, FibredAwfs, RMapStruct
from ..cocyl import ARROW, lface0
from ..errors import FunctorError
from ..gpd import (
    LruDict,
    CanonIso,
    FinGroupoid,
    GroupoidMap,
    SliceMap,
    SliceObject,
    SliceSquare,
    pullback,
    reindex_map,
    slice_key,
)

SX, SY = 0, 1  # tags of the two summands of K(f)


def _k_groupoid(f: SliceMap) -> FinGroupoid:
    X, Y = f.src.total, f.dst.total
    fo = f.map.obj

    def R(k):
        tag, v = k
        return fo[v] if tag == SX else v

    def objects_of():
        return [(SX, x) for x in X.objects] + [(SY, y) for y in Y.objects]

    def is_object(k):
        try:
            tag, v = k
        except (TypeError, ValueError):
            return False
        return (tag == SX and X.has_object(v)) or (tag == SY and Y.has_object(v))

    fibre: dict = {}

    def over(y):
        if not fibre:
            for x in X.objects:
                fibre.setdefault(fo[x], []).append((SX, x))
        return fibre.get(y, []) + [(SY, y)]

    def ends_of(e):
        s, t, beta = e
        if not (is_object(s) and is_object(t) and Y.has_arrow(beta)):
            return None
        if Y.ends(beta) != (R(s), R(t)):
            return None
        return (s, t)

    def out_of(s):
        return [(s, t, beta) for beta in Y.out(R(s)) for t in over(Y.tgt(beta))]

    return FinGroupoid.derived(
        ("cofib-K", f.map.skey),
        objects_of=objects_of,
        is_object=is_object,
        ends_of=ends_of,
        out_of=out_of,
        ident=lambda k: (k, k, Y.ident(R(k))),
        compose=lambda g, h: (h[0], g[1], Y.comp(g[2], h[2])),
        inverse=lambda e: (e[1], e[0], Y.inv(e[2])),
        name=f"K({X.name or 'X'} -> {Y.name or 'Y'})",
    )


def _r_of(f: SliceMap):
    fo = f.map.obj
    return lambda k: fo[k[1]] if k[0] == SX else k[1]


class CofibrationAwfs(FibredAwfs):
    """The (injective on objects, surjective equivalence) awfs on every slice."""

    name = "cofibration"
    cocyl = ARROW

    def __init__(self):
        super().__init__()
        self._iso_cache = LruDict()

    def _factor(self, f: SliceMap) -> Factorization:
        K = _k_groupoid(f)
        X, Y = f.src.total, f.dst.total
        fa = f.map.arr
        R = _r_of(f)
        yo, ya = f.dst.anchor.obj, f.dst.anchor.arr
        anchor = GroupoidMap.lazy(
            K, f.base, lambda k: yo[R(k)], lambda e: ya[e[2]], ("cofib-anchor", K, f.dst.anchor.skey)
        )
        Kobj = SliceObject(K, anchor)
        L = GroupoidMap.lazy(
            X,
            K,
            lambda x: (SX, x),
            lambda a: ((SX, X.src(a)), (SX, X.tgt(a)), fa[a]),
            ("cofib-L", K),
        )
        Rm = GroupoidMap.lazy(K, Y, R, lambda e: e[2], ("cofib-R", K))
        return Factorization(f=f, L=SliceMap(f.src, Kobj, L), K=Kobj, R=SliceMap(Kobj, f.dst, Rm))

    def _k_square(self, sq: SliceSquare, Fp: Factorization, F: Factorization) -> GroupoidMap:
        ho, ko, ka = sq.top.map.obj, sq.bottom.map.obj, sq.bottom.map.arr

        def on_obj(k):
            tag, v = k
            return (SX, ho[v]) if tag == SX else (SY, ko[v])

        return GroupoidMap.lazy(
            Fp.K.total,
            F.K.total,
            on_obj,
            lambda e: (on_obj(e[0]), on_obj(e[1]), ka[e[2]]),
            ("cofib-Ksq", Fp.K.total, F.K.total, sq.top.map.skey, sq.bottom.map.skey),
        )

    def comult(self, f: SliceMap) -> GroupoidMap:
        fa = self.factor(f)
        KL = self.factor(fa.L).K.total

        def on_obj(k):
            return (SX, k[1]) if k[0] == SX else (SY, k)

        return GroupoidMap.lazy(
            fa.K.total, KL, on_obj, lambda e: (on_obj(e[0]), on_obj(e[1]), e), ("cofib-sigma", KL)
        )

    def mult(self, f: SliceMap) -> GroupoidMap:
        fa = self.factor(f)
        KR = self.factor(fa.R).K.total

        def on_obj(k):
            return k[1] if k[0] == SX else (SY, k[1])

        return GroupoidMap.lazy(
            KR, fa.K.total, on_obj, lambda e: (on_obj(e[0]), on_obj(e[1]), e[2]), ("cofib-pi", KR)
        )

    def reindex_iso(self, sigma: GroupoidMap, f: SliceMap) -> CanonIso:
        key = (sigma.skey, slice_key(f))
        hit = self._iso_cache.get(key)
        if hit is not None:
            return hit
        Kd = self.K(reindex_map(sigma, f)).total
        target = pullback(sigma, self.K(f).anchor).P

        def on_obj(k):
            tag, (d, v) = k
            return (d, (tag, v))

        def on_arr(e):
            s, t, (dd, beta) = e
            (_, (_, vs)), (_, (_, vt)) = s, t
            return (dd, ((s[0], vs), (t[0], vt), beta))

        fwd = GroupoidMap.lazy(Kd, target, on_obj, on_arr, ("cofib-iso", Kd, target))
        iso = CanonIso.of(fwd)
        self._iso_cache[key] = iso
        return iso

    def find_rstructure(self, f: SliceMap) -> RMapStruct | None:
        X = f.src.total
        fo = f.map.obj
        section: dict = {}
        for x in X.objects:
            section.setdefault(fo[x], x)
        if any(y not in section for y in f.dst.total.objects):
            return None
        try:
            return ff_structure(self, f, lambda y: section[y])
        except FunctorError:
            return None


def ff_structure(
    I: CofibrationAwfs, g: SliceMap, section: Callable[[object], object], verify: bool = True
) -> RMapStruct:
    """R-structure on a fully faithful ``g`` from a choice of preimages of objects.

    Arrows are lifted as the unique preimage in the matching hom-set; a
    missing or repeated preimage raises ``FunctorError``.
    """
    A = g.src.total
    ga = g.map.arr
    fa = I.factor(g)

    def p_obj(k):
        return k[1] if k[0] == SX else section(k[1])

    memo: dict = {}

    def p_arr(e):
        hit = memo.get(e)
        if hit is None:
            s, t, beta = e
            a, a2 = p_obj(s), p_obj(t)
            found = [xi for xi in A.hom(a, a2) if ga[xi] == beta]
            if len(found) != 1:
                raise FunctorError(f"{len(found)} preimages of {beta!r} between {a!r} and {a2!r}")
            hit = memo[e] = found[0]
        return hit

    p = GroupoidMap.lazy(fa.K.total, A, p_obj, p_arr, ("ff", fa.K.total, object()))
    return RMapStruct(I, g, p, verify)


def lface_structure(S: CofibrationAwfs, rf: RMapStruct, verify: bool = True) -> RMapStruct:
    """Surjective-equivalence structure on ``lface0_Γ(f)`` over ``Γ`` for an isofibration ``f``.

    ``rf`` is a structure of the path-object awfs.  A codomain object is a
    relative path ``(γ, β)`` downstairs with a start point ``x`` upstairs;
    its chosen preimage is ``(γ, α)`` with ``α`` the cleavage lift of ``β``
    at ``x``.
    """
    from .groupoid import lift_from_rstruct

    lift = lift_from_rstruct(rf)

    def section(c):
        (gamma, beta), x = c
        return (gamma, lift(x, beta))

    lf = lface0(S.cocyl, rf.f)
    return ff_structure(S, lf.map, section, verify)
