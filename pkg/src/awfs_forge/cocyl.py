"""Functorial cocylinders, their relative versions over a base, and Leibniz maps."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from functools import lru_cache

from .errors import LawViolation
from .gpd import (
    CACHE_SIZE,
    LruDict,
    FinGroupoid,
    GroupoidMap,
    Pullback,
    SliceMap,
    SliceObject,
    first_difference,
    identity,
    pullback,
    slice_fiber_product,
)


@dataclass(frozen=True, eq=False)
class Cocylinder:
    """A path-object functor with endpoint projections and constant paths."""

    name: str
    act_obj: Callable[[FinGroupoid], FinGroupoid]
    act_map: Callable[[GroupoidMap], GroupoidMap]
    face0: Callable[[FinGroupoid], GroupoidMap]
    face1: Callable[[FinGroupoid], GroupoidMap]
    degen: Callable[[FinGroupoid], GroupoidMap]

    def face(self, i: int, X: FinGroupoid) -> GroupoidMap:
        return self.face0(X) if i == 0 else self.face1(X)

    def __call__(self, x):
        return cocyl_apply(self, x)


def cocyl_apply(C: Cocylinder, x: FinGroupoid | GroupoidMap):
    if isinstance(x, GroupoidMap):
        return C.act_map(x)
    return C.act_obj(x)


# -- the arrow groupoid ------------------------------------------------------


@lru_cache(maxsize=CACHE_SIZE)
def arrow_groupoid(X: FinGroupoid) -> FinGroupoid:
    """Objects are arrows of ``X``; ``(α, p, q): α -> q∘α∘p⁻¹``."""

    def ends_of(e):
        alpha, p, q = e
        s, t = X.ends(alpha)
        if X.src(p) != s or X.src(q) != t:
            return None
        return (alpha, X.chain(q, alpha, X.inv(p)))

    def out_of(alpha):
        s, t = X.ends(alpha)
        return [(alpha, p, q) for p in X.out(s) for q in X.out(t)]

    def compose(g, f):
        return (f[0], X.comp(g[1], f[1]), X.comp(g[2], f[2]))

    def inverse(a):
        alpha, p, q = a
        return (X.chain(q, alpha, X.inv(p)), X.inv(p), X.inv(q))

    return FinGroupoid.derived(
        ("cocyl", X),
        objects_of=lambda: X.arrows,
        is_object=X.has_arrow,
        ends_of=ends_of,
        out_of=out_of,
        ident=lambda alpha: (alpha, X.ident(X.src(alpha)), X.ident(X.tgt(alpha))),
        compose=compose,
        inverse=inverse,
        name=f"Cocyl({X.name or '-'})",
    )


_ARROW_MAPS = LruDict()


def _arrow_map(k: GroupoidMap) -> GroupoidMap:
    hit = _ARROW_MAPS.get(k.skey)
    if hit is None:
        hit = _ARROW_MAPS[k.skey] = _make_arrow_map(k)
    return hit


def _make_arrow_map(k: GroupoidMap) -> GroupoidMap:
    A, B = arrow_groupoid(k.dom), arrow_groupoid(k.cod)
    a = k.arr
    return GroupoidMap.lazy(
        A, B, lambda alpha: a[alpha], lambda e: (a[e[0]], a[e[1]], a[e[2]]), ("cocyl-map", k.skey)
    )


@lru_cache(maxsize=CACHE_SIZE)
def _arrow_face(i: int, X: FinGroupoid) -> GroupoidMap:
    A = arrow_groupoid(X)
    return GroupoidMap.lazy(
        A, X, lambda alpha: X.ends(alpha)[i], lambda e: e[1 + i], ("face", i, X)
    )


@lru_cache(maxsize=CACHE_SIZE)
def _arrow_degen(X: FinGroupoid) -> GroupoidMap:
    A = arrow_groupoid(X)
    return GroupoidMap.lazy(
        X, A, X.ident, lambda a: (X.ident(X.src(a)), a, a), ("degen", X)
    )


def arrow_cocylinder() -> Cocylinder:
    """Exponential by the walking isomorphism: paths are arrows."""
    return ARROW


ARROW = Cocylinder(
    name="arrow",
    act_obj=arrow_groupoid,
    act_map=_arrow_map,
    face0=lambda X: _arrow_face(0, X),
    face1=lambda X: _arrow_face(1, X),
    degen=_arrow_degen,
)

TRIVIAL = Cocylinder(
    name="identity",
    act_obj=lambda X: X,
    act_map=lambda k: k,
    face0=identity,
    face1=identity,
    degen=identity,
)


def check_cocylinder_laws(C: Cocylinder, X: FinGroupoid) -> None:
    """``face_i∘degen = id`` on ``X``."""
    for i in (0, 1):
        w = first_difference(C.face(i, X) @ C.degen(X), identity(X))
        if w is not None:
            raise LawViolation(f"cocyl-section-{i}", w)


def check_cocylinder_naturality(C: Cocylinder, k: GroupoidMap) -> None:
    w = first_difference(C.act_map(k) @ C.degen(k.dom), C.degen(k.cod) @ k)
    if w is not None:
        raise LawViolation("cocyl-degen-natural", w)
    for i in (0, 1):
        w = first_difference(C.face(i, k.cod) @ C.act_map(k), k @ C.face(i, k.dom))
        if w is not None:
            raise LawViolation(f"cocyl-face{i}-natural", w)


# -- homotopies --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Homotopy:
    """``psi: X -> Cocyl(Y)`` from ``f0`` to ``f1`` w.r.t. the given faces."""

    psi: GroupoidMap
    f0: GroupoidMap
    f1: GroupoidMap
    face0: GroupoidMap
    face1: GroupoidMap

    def __post_init__(self):
        for i, (face, f) in enumerate(((self.face0, self.f0), (self.face1, self.f1))):
            w = first_difference(face @ self.psi, f)
            if w is not None:
                raise LawViolation(f"homotopy-endpoint-{i}", w)


# -- relative cocylinder -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class RelCocyl:
    """``Cocyl_Γ(A)``: paths in ``A`` lying over constant paths of ``Γ``."""

    base: FinGroupoid
    input: SliceObject
    total: SliceObject
    pb: Pullback
    face0: GroupoidMap
    face1: GroupoidMap
    degen: GroupoidMap

    @property
    def proj_to_base(self) -> GroupoidMap:
        return self.pb.pi1

    @property
    def proj_to_cocyl(self) -> GroupoidMap:
        return self.pb.pi2

    def face(self, i: int) -> GroupoidMap:
        return self.face0 if i == 0 else self.face1

    def face_slice(self, i: int) -> SliceMap:
        return SliceMap(self.total, self.input, self.face(i))

    @property
    def degen_slice(self) -> SliceMap:
        return SliceMap(self.input, self.total, self.degen)


_REL_CACHE = LruDict()


def rel_cocyl(C: Cocylinder, A: SliceObject) -> RelCocyl:
    """Pull ``Cocyl(a)`` back along ``degen(Γ)``; faces and degeneracy follow."""
    key = (id(C), A.anchor.skey)
    hit = _REL_CACHE.get(key)
    if hit is not None:
        return hit
    base = A.base
    pb = pullback(C.degen(base), C.act_map(A.anchor))
    total = SliceObject(pb.P, pb.pi1)
    face0 = C.face0(A.total) @ pb.pi2
    face1 = C.face1(A.total) @ pb.pi2
    degen = pb.mediate(A.anchor, C.degen(A.total))
    rc = RelCocyl(base, A, total, pb, face0, face1, degen)
    if not A.total.lazy:
        check_rel_cocyl(rc)
    _REL_CACHE[key] = rc
    return rc


def check_rel_cocyl(rc: RelCocyl) -> None:
    """Faces and degeneracy lie over the base and are sections of each other."""
    rc.face_slice(0).verify()
    rc.face_slice(1).verify()
    rc.degen_slice.verify()
    for i in (0, 1):
        w = first_difference(rc.face(i) @ rc.degen, identity(rc.input.total))
        if w is not None:
            raise LawViolation(f"rel-cocyl-section-{i}", w)


def rel_cocyl_map(C: Cocylinder, k: SliceMap) -> SliceMap:
    """``Cocyl_Γ(k)`` for a map ``k`` over ``Γ``."""
    src, dst = rel_cocyl(C, k.src), rel_cocyl(C, k.dst)
    m = dst.pb.mediate(src.pb.pi1, C.act_map(k.map) @ src.pb.pi2)
    return SliceMap(src.total, dst.total, m)


def rel_boundary(C: Cocylinder, A: SliceObject) -> tuple[SliceMap, Pullback]:
    """``∂_Γ = ⟨face0, face1⟩ : Cocyl_Γ(A) -> A ×_Γ A``."""
    rc = rel_cocyl(C, A)
    pb = slice_fiber_product(A, A)
    AA = SliceObject(pb.P, A.anchor @ pb.pi1)
    return SliceMap(rc.total, AA, pb.mediate(rc.face0, rc.face1)), pb


# -- Leibniz maps ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Leibniz:
    """A Leibniz map together with the chosen pullback it lands in."""

    kind: str
    map: SliceMap
    pb: Pullback

    @property
    def codomain(self) -> SliceObject:
        return self.map.dst


def lface0(C: Cocylinder, f: SliceMap) -> Leibniz:
    """``Cocyl_Γ(X) -> Cocyl_Γ(Y) ×_Y X``; codomain objects are ``(path, x)``."""
    rX, rY = rel_cocyl(C, f.src), rel_cocyl(C, f.dst)
    pb = pullback(rY.face0, f.map)
    cod = SliceObject(pb.P, f.src.anchor @ pb.pi2)
    m = pb.mediate(rel_cocyl_map(C, f).map, rX.face0)
    return Leibniz("face0", SliceMap(rX.total, cod, m), pb)


def lbdy(C: Cocylinder, f: SliceMap) -> Leibniz:
    """``Cocyl_Γ(X) -> Cocyl_Γ(Y) ×_{Y×_ΓY} (X ×_Γ X)``; objects ``(path, (x0, x1))``."""
    rX = rel_cocyl(C, f.src)
    rY = rel_cocyl(C, f.dst)
    bdyY, pbY = rel_boundary(C, f.dst)
    bdyX, pbX = rel_boundary(C, f.src)
    ff = pbY.mediate(f.map @ pbX.pi1, f.map @ pbX.pi2)
    pb = pullback(bdyY.map, ff)
    cod = SliceObject(pb.P, rY.total.anchor @ pb.pi1)
    m = pb.mediate(rel_cocyl_map(C, f).map, bdyX.map)
    return Leibniz("bdy", SliceMap(rX.total, cod, m), pb)


def leibniz(C: Cocylinder, f: SliceMap, kind: str) -> Leibniz:
    if kind == "face0":
        return lface0(C, f)
    if kind == "bdy":
        return lbdy(C, f)
    raise ValueError(f"unknown Leibniz kind {kind!r}")
