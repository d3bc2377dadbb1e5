"""Mapping-path-object awfs on finite groupoids.

Over a base ``Γ`` a map ``f: (X,x) -> (Y,y)`` factors through
``K_Γ(f) = X ×_Y Cocyl_Γ(Y)``, whose objects are ``(x0, (γ, β))`` with
``β: f x0 -> y1`` a path lying over the identity of ``γ``.  ``L`` inserts the
constant path, ``R`` takes the endpoint, ``Σ`` inserts a reflexivity path
and ``Π`` composes paths.  R-structures are normal cleavages of vertical
arrows, which is how the structure functors for Leibniz maps are built.
"""

from __future__ import annotations

from collections.abc import Callable

from ..awfs import Factorization, FibredAwfs, RMapStruct
from ..cocyl import ARROW, lbdy, lface0, rel_cocyl, rel_cocyl_map
from ..errors import FibrednessViolation, FunctorError
from ..gpd import (
    LruDict,
    CanonIso,
    GroupoidMap,
    SliceMap,
    SliceObject,
    SliceSquare,
    forget,
    identity,
    pullback,
    reindex_map,
    slice_key,
)

Lift = Callable[[object, object], object]


class GroupoidAwfs(FibredAwfs):
    """``mutate`` plants deliberate bugs for the mutation tests."""

    name = "groupoid"
    cocyl = ARROW

    def __init__(self, mutate: str | None = None):
        super().__init__()
        self.mutate = mutate
        self._iso_cache = LruDict()

    def _factor(self, f: SliceMap) -> Factorization:
        rY = rel_cocyl(ARROW, f.dst)
        pb = pullback(f.map, rY.face0)
        R = rY.face1 @ pb.pi2
        K = SliceObject(pb.P, f.dst.anchor @ R)
        L = pb.mediate(identity(f.src.total), rY.degen @ f.map)
        return Factorization(f=f, L=SliceMap(f.src, K, L), K=K, R=SliceMap(K, f.dst, R), pb=pb)

    def _k_square(self, sq: SliceSquare, Fp: Factorization, F: Factorization) -> GroupoidMap:
        ck = rel_cocyl_map(ARROW, sq.bottom).map
        return F.pb.mediate(sq.top.map @ Fp.pb.pi1, ck @ Fp.pb.pi2)

    def comult(self, f: SliceMap) -> GroupoidMap:
        fa = self.factor(f)
        X, Y, G = f.src.total, f.dst.total, f.base
        Kf = fa.K.total
        KL = self.factor(fa.L).K.total
        Lmap = fa.L.map

        def refl(k):
            x0, (gamma, beta) = k
            y0 = f.map.obj[x0]
            return (X.ident(x0), (G.ident(gamma), (Y.ident(y0), Y.ident(y0), beta)))

        def on_obj(k):
            x0, (gamma, _) = k
            return (x0, (gamma, refl(k)))

        def on_arr(psi):
            xi, (g, _) = psi
            return (xi, (g, (refl(Kf.src(psi)), Lmap.arr[xi], psi)))

        return GroupoidMap.build(Kf, KL, on_obj, on_arr)

    def mult(self, f: SliceMap) -> GroupoidMap:
        fa = self.factor(f)
        Y = f.dst.total
        KR = self.factor(fa.R).K.total
        Kf = fa.K.total
        reverse = self.mutate == "reverse_pi"

        def join(second, first):
            return Y.comp(first, second) if reverse else Y.comp(second, first)

        def on_obj(k):
            (x0, (gamma, beta)), (_, beta2) = k
            return (x0, (gamma, join(beta2, beta)))

        def on_arr(a):
            (xi, (g, (beta, p, _))), (_, (beta2, _, r)) = a
            return (xi, (g, (join(beta2, beta), p, r)))

        return GroupoidMap.build(KR, Kf, on_obj, on_arr)

    def reindex_iso(self, sigma: GroupoidMap, f: SliceMap) -> CanonIso:
        key = (sigma.skey, slice_key(f))
        hit = self._iso_cache.get(key)
        if hit is not None:
            return hit
        sf = reindex_map(sigma, f)
        Fd, F = self.factor(sf), self.factor(f)
        rD, rG = rel_cocyl(ARROW, sf.dst), rel_cocyl(ARROW, f.dst)
        proj_X = pullback(sigma, f.src.anchor).pi2
        proj_Y = pullback(sigma, f.dst.anchor).pi2
        paths = rG.pb.mediate(sigma @ rD.pb.pi1, ARROW.act_map(proj_Y) @ rD.pb.pi2)
        to_K = F.pb.mediate(proj_X @ Fd.pb.pi1, paths @ Fd.pb.pi2)
        fwd = pullback(sigma, F.K.anchor).mediate(Fd.K.anchor, to_K)
        try:
            iso = CanonIso.of(fwd)
        except FunctorError as exc:
            raise FibrednessViolation("fibred-iso-bijective", repr(fwd)) from exc
        self._iso_cache[key] = iso
        return iso

    def axiom_lface(self, rf: RMapStruct, verify: bool = True) -> RMapStruct:
        f = rf.f
        lf = lface0(ARROW, f)
        X, Y = f.src.total, f.dst.total
        vertical = lift_from_rstruct(rf)

        def lift(a, bhat):
            _gamma, alpha = a
            (g, (c, p, q)), xi = bhat
            c_new = Y.chain(q, c, Y.inv(p))
            x_new = X.tgt(xi)
            alpha_new = vertical(x_new, c_new)
            zeta = X.chain(alpha_new, xi, X.inv(alpha))
            return (g, (alpha, xi, zeta))

        return rstruct_from_lifts(self, forget(lf.map), lift, verify)

    def axiom_lbdy(self, rf: RMapStruct, verify: bool = True) -> RMapStruct:
        lb = lbdy(ARROW, rf.f)

        def lift(a, bhat):
            _gamma, alpha = a
            (g, _), (xi0, xi1) = bhat
            return (g, (alpha, xi0, xi1))

        return rstruct_from_lifts(self, lb.map, lift, verify)


    def find_rstructure(self, f: SliceMap) -> RMapStruct | None:
        return search_cleavage(self, f)


def groupoid_instance(mutate: str | None = None) -> GroupoidAwfs:
    return GroupoidAwfs(mutate=mutate)


# ---------------------------------------------------------------------------
# cleavages
# ---------------------------------------------------------------------------


def rstruct_from_lifts(I: GroupoidAwfs, g: SliceMap, lift: Lift, verify: bool = True) -> RMapStruct:
    """R-structure on ``g`` from a choice of lifts of vertical arrows.

    ``lift(a, b)`` must return an arrow out of ``a`` mapped by ``g`` to
    ``b``; identities are sent to identities regardless, which makes the
    resulting cleavage normal.
    """
    A, B = g.src.total, g.dst.total
    fa = I.factor(g)
    Kg = fa.K.total
    memo: dict = {}

    def ell(a, bhat):
        key = (a, bhat)
        hit = memo.get(key)
        if hit is None:
            hit = A.ident(a) if B.is_identity(bhat) else lift(a, bhat)
            memo[key] = hit
        return hit

    def on_obj(k):
        a, (_, bhat) = k
        return A.tgt(ell(a, bhat))

    def on_arr(e):
        xi, (_, (bhat, P, Q)) = e
        a, a2 = A.ends(xi)
        bhat2 = B.chain(Q, bhat, B.inv(P))
        return A.chain(ell(a2, bhat2), xi, A.inv(ell(a, bhat)))

    p = GroupoidMap.build(Kg, A, on_obj, on_arr)
    return RMapStruct(I, g, p, verify)


def lift_from_rstruct(rs: RMapStruct) -> Lift:
    """The cleavage encoded by an R-structure: ``(a, b) -> p(id_a, b)``."""
    g = rs.f
    A, B, G = g.src.total, g.dst.total, g.base

    def lift(a, bhat):
        b = g.map.obj[a]
        gamma = g.dst.anchor.obj[b]
        return rs.p.arr[(A.ident(a), (G.ident(gamma), (B.ident(b), B.ident(b), bhat)))]

    return lift


def search_cleavage(I: GroupoidAwfs, g: SliceMap) -> RMapStruct | None:
    """Normal cleavage of vertical arrows found by search, if ``g`` admits one."""
    A, B = g.src.total, g.dst.total
    anchor = g.dst.anchor
    G = g.base
    table: dict = {}
    for a in A.objects:
        b = g.map.obj[a]
        by_image: dict = {}
        for xi in A.out(a):
            by_image.setdefault(g.map.arr[xi], xi)
        for bhat in B.out(b):
            if not G.is_identity(anchor.arr[bhat]):
                continue
            if bhat not in by_image:
                return None
            table[(a, bhat)] = by_image[bhat]
    return rstruct_from_lifts(I, g, lambda a, bhat: table[(a, bhat)])
