"""Fibred algebraic weak factorization systems on slices of finite groupoids.

An instance supplies, for every base ``Γ``, a functorial factorization of maps
over ``Γ`` with comultiplication ``Σ`` and multiplication ``Π``, comparison
isos for reindexing, a cocylinder, and the two structure functors demanded of
Leibniz maps.  Everything else here is generic: L/R structures, the lifting
formula ``j = p∘K(h,k)∘s``, and closure of R-maps under composition and
pullback.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

from .cocyl import Cocylinder
from .errors import BaseMismatch, InstanceViolation, LawViolation, NotAPullback
from .gpd import (
    LruDict,
    CanonIso,
    FinGroupoid,
    GroupoidMap,
    SliceMap,
    SliceObject,
    SliceSquare,
    first_difference,
    identity,
    is_pullback_square,
    pullback,
    reindex_map,
    slice_identity,
    slice_key,
    square_mediate,
)


@dataclass(frozen=True, eq=False)
class Factorization:
    """``f = R∘L`` through ``K``; both halves are maps over the same base."""

    f: SliceMap
    L: SliceMap
    K: SliceObject
    R: SliceMap
    pb: object = None  # instance-private: how K was built


class FibredAwfs(ABC):
    """A family of awfs's on every slice, stable under reindexing."""

    name: str = "abstract"
    cocyl: Cocylinder

    def __init__(self):
        self._factor_cache = LruDict()

    # -- supplied by instances ------------------------------------------
    @abstractmethod
    def _factor(self, f: SliceMap) -> Factorization: ...

    @abstractmethod
    def _k_square(self, sq: SliceSquare, Kp: Factorization, K: Factorization) -> GroupoidMap: ...

    @abstractmethod
    def comult(self, f: SliceMap) -> GroupoidMap:
        """``Σ_f : K(f) -> K(L f)``."""

    @abstractmethod
    def mult(self, f: SliceMap) -> GroupoidMap:
        """``Π_f : K(R f) -> K(f)``."""

    @abstractmethod
    def reindex_iso(self, sigma: GroupoidMap, f: SliceMap) -> CanonIso:
        """``K_Δ(σ*f) ≅ σ*(K_Γ f)``; ``fwd`` starts at ``K_Δ(σ*f)``."""

    def axiom_lface(self, rf: "RMapStruct", verify: bool = True) -> "RMapStruct":
        """R_1-structure on ``lface0_Γ(f)`` for an R_Γ-map ``f``.

        With ``verify=False`` the structure is checked pointwise as it is
        used instead of over the whole of ``K``.
        """
        from .errors import AxiomUnavailable

        raise AxiomUnavailable(f"{self.name} has no lface structure")

    def axiom_lbdy(self, rf: "RMapStruct", verify: bool = True) -> "RMapStruct":
        """R_Γ-structure on ``lbdy_Γ(f)`` for an R_Γ-map ``f``."""
        from .errors import AxiomUnavailable

        raise AxiomUnavailable(f"{self.name} has no lbdy structure")

    def find_rstructure(self, f: SliceMap) -> "RMapStruct | None":
        """Some R-structure on ``f`` when the instance knows how to find one."""
        return None

    # -- generic surface -------------------------------------------------
    def factor(self, f: SliceMap) -> Factorization:
        key = slice_key(f)
        hit = self._factor_cache.get(key)
        if hit is None:
            hit = self._factor(f)
            if hit.L.map.tabulated:
                w = first_difference(hit.R.map @ hit.L.map, f.map)
                if w is not None:
                    raise InstanceViolation("factorization", w)
            self._factor_cache[key] = hit
        return hit

    def L(self, f: SliceMap) -> SliceMap:
        return self.factor(f).L

    def R(self, f: SliceMap) -> SliceMap:
        return self.factor(f).R

    def K(self, f: SliceMap) -> SliceObject:
        return self.factor(f).K

    def k_square(self, sq: SliceSquare) -> SliceMap:
        """``K(h,k) : K(f') -> K(f)`` for a square ``(h,k): f' -> f``."""
        sq.check()
        Fp, F = self.factor(sq.left), self.factor(sq.right)
        return SliceMap(Fp.K, F.K, self._k_square(sq, Fp, F))


def factor(I: FibredAwfs, f: SliceMap) -> tuple[SliceMap, SliceObject, SliceMap]:
    fa = I.factor(f)
    return fa.L, fa.K, fa.R


def k_square(I: FibredAwfs, sq: SliceSquare) -> GroupoidMap:
    return I.k_square(sq).map


def unit_square(I: FibredAwfs, f: SliceMap) -> SliceSquare:
    """``(L(f), id) : f -> R(f)``."""
    fa = I.factor(f)
    return SliceSquare(top=fa.L, left=f, right=fa.R, bottom=slice_identity(f.dst))


def counit_square(I: FibredAwfs, f: SliceMap) -> SliceSquare:
    """``(id, R(f)) : L(f) -> f``."""
    fa = I.factor(f)
    return SliceSquare(top=slice_identity(f.src), left=fa.L, right=f, bottom=fa.R)


# ---------------------------------------------------------------------------
# L- and R-structures
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LMapStruct:
    """``(m, s)`` with ``s∘m = L(m)`` and ``R(m)∘s = id``; checked on creation."""

    awfs: FibredAwfs
    m: SliceMap
    s: GroupoidMap

    def __post_init__(self):
        fa = self.awfs.factor(self.m)
        w = first_difference(self.s @ self.m.map, fa.L.map)
        if w is not None:
            raise LawViolation("lmap-s-after-m", w)
        w = first_difference(fa.R.map @ self.s, identity(self.m.dst.total))
        if w is not None:
            raise LawViolation("lmap-R-after-s", w)

    @property
    def base(self) -> FinGroupoid:
        return self.m.base

    @property
    def s_slice(self) -> SliceMap:
        return SliceMap(self.m.dst, self.awfs.K(self.m), self.s)


@dataclass(frozen=True, eq=False)
class RMapStruct:
    """``(f, p)`` with ``p∘L(f) = id`` and ``f∘p = R(f)``.

    The laws are checked on creation over all of ``K(f)``.  With
    ``verify=False`` (used for the axiom structures, whose ``K`` is far too
    large to enumerate) ``p`` is instead wrapped so that ``f∘p = R(f)`` is
    checked at every element it is evaluated on, and ``p∘L(f) = id`` at
    every element of the source of ``f`` that is looked up.
    """

    awfs: FibredAwfs
    f: SliceMap
    p: GroupoidMap
    verify: bool = True

    def __post_init__(self):
        if self.verify:
            self.check()
        else:
            object.__setattr__(self, "p", _guarded(self.awfs, self.f, self.p))

    def check(self) -> None:
        fa = self.awfs.factor(self.f)
        w = first_difference(self.p @ fa.L.map, identity(self.f.src.total))
        if w is not None:
            raise LawViolation("rmap-p-after-L", w)
        w = first_difference(self.f.map @ self.p, fa.R.map)
        if w is not None:
            raise LawViolation("rmap-f-after-p", w)

    @property
    def base(self) -> FinGroupoid:
        return self.f.base

    @property
    def p_slice(self) -> SliceMap:
        return SliceMap(self.awfs.K(self.f), self.f.src, self.p)


def _guarded(I: FibredAwfs, f: SliceMap, p: GroupoidMap) -> GroupoidMap:
    fa = I.factor(f)
    fo, fr = f.map.obj, f.map.arr
    Ro, Ra = fa.R.map.obj, fa.R.map.arr
    po, pa = p.obj, p.arr

    def on_obj(k):
        x = po[k]
        if fo[x] != Ro[k]:
            raise LawViolation("rmap-f-after-p", ("object", k, fo[x], Ro[k]))
        return x

    def on_arr(e):
        x = pa[e]
        if fr[x] != Ra[e]:
            raise LawViolation("rmap-f-after-p", ("arrow", e, fr[x], Ra[e]))
        return x

    return GroupoidMap.lazy(p.dom, p.cod, on_obj, on_arr, ("guarded", p.skey))


def free_structures(I: FibredAwfs, f: SliceMap) -> tuple[LMapStruct, RMapStruct]:
    """``(L(f), Σ_f)`` and ``(R(f), Π_f)``."""
    return free_lmap(I, f), free_rmap(I, f)


def free_lmap(I: FibredAwfs, f: SliceMap) -> LMapStruct:
    try:
        return LMapStruct(I, I.L(f), I.comult(f))
    except LawViolation as exc:
        raise InstanceViolation(f"free-structure:{exc.law}", exc.witness) from exc


def free_rmap(I: FibredAwfs, f: SliceMap) -> RMapStruct:
    try:
        return RMapStruct(I, I.R(f), I.mult(f))
    except LawViolation as exc:
        raise InstanceViolation(f"free-structure:{exc.law}", exc.witness) from exc


def solve_lift(lm: LMapStruct, rm: RMapStruct, top: SliceMap, bottom: SliceMap) -> SliceMap:
    """The canonical filler ``p∘K(top,bottom)∘s`` of a square ``m -> f``."""
    if lm.awfs is not rm.awfs:
        raise BaseMismatch("structures come from different awfs instances")
    if lm.base != rm.base:
        raise BaseMismatch("lifting problem mixes bases")
    sq = SliceSquare(top=top, left=lm.m, right=rm.f, bottom=bottom).check()
    kk = lm.awfs.k_square(sq)
    j = rm.p @ kk.map @ lm.s
    w = first_difference(j @ lm.m.map, top.map)
    if w is None:
        w = first_difference(rm.f.map @ j, bottom.map)
    if w is not None:
        raise LawViolation("lift-triangles", w)
    return SliceMap(lm.m.dst, rm.f.src, j)


def rmap_compose(pf: RMapStruct, pg: RMapStruct) -> RMapStruct:
    """R-structure on ``g∘f`` by two successive canonical lifts."""
    I = pf.awfs
    f, g = pf.f, pg.f
    if f.dst != g.src:
        raise BaseMismatch("maps are not composable")
    gf = g @ f
    fa = I.factor(gf)
    Lgf = free_lmap(I, gf)
    d = solve_lift(Lgf, pg, top=f, bottom=fa.R)
    e = solve_lift(Lgf, pf, top=slice_identity(f.src), bottom=d)
    return RMapStruct(I, gf, e.map)


def rmap_pullback(pf: RMapStruct, sq: SliceSquare) -> RMapStruct:
    """Transfer along a cartesian square ``(h,k): f' -> f``."""
    I = pf.awfs
    if sq.right != pf.f:
        raise BaseMismatch("square does not end at the structured map")
    if not is_pullback_square(sq.square):
        raise NotAPullback("rmap_pullback needs a cartesian square")
    fp = sq.left
    fa = I.factor(fp)
    kk = I.k_square(sq)
    p_new = square_mediate(sq.square, pf.p @ kk.map, fa.R.map)
    return RMapStruct(I, fp, p_new)


def reindex_structure(I: FibredAwfs, sigma: GroupoidMap, x: LMapStruct | RMapStruct):
    """Move an L- or R-structure along ``σ: Δ -> Γ`` through the fibredness iso."""
    if isinstance(x, RMapStruct):
        f = x.f
        iso = I.reindex_iso(sigma, f)
        sp = reindex_map(sigma, x.p_slice)
        return RMapStruct(I, reindex_map(sigma, f), sp.map @ iso.fwd)
    m = x.m
    iso = I.reindex_iso(sigma, m)
    ss = reindex_map(sigma, x.s_slice)
    return LMapStruct(I, reindex_map(sigma, m), iso.bwd @ ss.map)


reindex_structures = reindex_structure


def check_fibred_iso(I: FibredAwfs, sigma: GroupoidMap, f: SliceMap) -> CanonIso:
    """The reindexing iso is inverse and commutes with ``L`` and ``R``."""
    from .errors import FibrednessViolation

    iso = I.reindex_iso(sigma, f)
    try:
        iso.check()
    except LawViolation as exc:
        raise FibrednessViolation("fibred-iso-inverse", exc.witness) from exc
    fa = I.factor(f)
    sfa = I.factor(reindex_map(sigma, f))
    sL = reindex_map(sigma, fa.L)
    sR = reindex_map(sigma, fa.R)
    w = first_difference(iso.fwd @ sfa.L.map, sL.map)
    if w is not None:
        raise FibrednessViolation("fibred-iso-L", w)
    w = first_difference(sR.map @ iso.fwd, sfa.R.map)
    if w is not None:
        raise FibrednessViolation("fibred-iso-R", w)
    return iso


def check_fibred_k_square(I: FibredAwfs, sigma: GroupoidMap, sq: SliceSquare) -> None:
    """``iso_f ∘ K_Δ(σ*sq) = σ*(K_Γ sq) ∘ iso_f'``."""
    from .errors import FibrednessViolation

    iso_p = I.reindex_iso(sigma, sq.left)
    iso = I.reindex_iso(sigma, sq.right)
    rsq = SliceSquare(
        top=reindex_map(sigma, sq.top),
        left=reindex_map(sigma, sq.left),
        right=reindex_map(sigma, sq.right),
        bottom=reindex_map(sigma, sq.bottom),
    )
    lhs = iso.fwd @ I.k_square(rsq).map
    rhs = reindex_map(sigma, I.k_square(sq)).map @ iso_p.fwd
    w = first_difference(lhs, rhs)
    if w is not None:
        raise FibrednessViolation("fibred-iso-K", w)


def base_change_k(I: FibredAwfs, k: GroupoidMap, fp: SliceMap, f: SliceMap, h_cmp: SliceMap, k_cmp: SliceMap) -> GroupoidMap:
    """``K_{Γ'}(f') -> K_Γ(f)`` across a base change ``k: Γ' -> Γ``.

    ``h_cmp: f'.src -> k*(f.src)`` and ``k_cmp: f'.dst -> k*(f.dst)`` are the
    comparison maps over ``Γ'``; the result is ``pi2∘iso∘K_{Γ'}(h_cmp, k_cmp)``.
    """
    kf = reindex_map(k, f)
    sq = SliceSquare(top=h_cmp, left=fp, right=kf, bottom=k_cmp)
    kk = I.k_square(sq)
    iso = I.reindex_iso(k, f)
    proj = pullback(k, I.K(f).anchor).pi2
    return proj @ iso.fwd @ kk.map
