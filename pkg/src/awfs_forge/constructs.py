"""Stable diagonal factorizations from a fibred awfs.

Each function below is one step of the construction, carried out literally
as a sequence of canonical lifts.  The returned structures are re-verified
on creation (see :class:`~awfs_forge.awfs.LMapStruct`), so a wrong step shows
up at the first lemma that uses it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .awfs import (
    FibredAwfs,
    base_change_k,
    LMapStruct,
    RMapStruct,
    free_lmap,
    free_structures,
    reindex_structure,
    rmap_compose,
    rmap_pullback,
    solve_lift,
)
from .cocyl import Homotopy, lbdy, lface0, rel_cocyl
from .errors import BaseMismatch, LawViolation, NotAPullback
from .gpd import (
    ONE,
    GroupoidMap,
    SliceMap,
    SliceObject,
    SliceSquare,
    Square,
    as_terminal_map,
    bang,
    first_difference,
    forget,
    global_map,
    global_object,
    identity,
    is_pullback_square,
    pullback,
    reindex_map,
    reindex_slice,
    slice_identity,
    terminal_slice,
)


@dataclass(frozen=True, eq=False)
class DefRetStruct:
    """``m`` with retraction ``g`` and homotopy ``psi: m∘g ~ id`` over the base."""

    m: SliceMap
    g: SliceMap
    psi: Homotopy

    def __post_init__(self):
        w = first_difference(self.g.map @ self.m.map, identity(self.m.src.total))
        if w is not None:
            raise LawViolation("defret-retraction", w)
        if self.psi.psi.dom != self.m.dst.total:
            raise LawViolation("defret-homotopy-domain", repr(self.psi.psi.dom))


@dataclass(frozen=True, eq=False)
class DiagFact:
    """A factorization ``X --r--> P --p--> X ×_Γ X`` of the diagonal of ``f``."""

    f: RMapStruct
    P: SliceObject
    diagonal: SliceMap
    r: LMapStruct
    p: RMapStruct

    def __post_init__(self):
        w = first_difference(self.p.f.map @ self.r.m.map, self.diagonal.map)
        if w is not None:
            raise LawViolation("diag-p-after-r", w)


def left_to_deformation(I: FibredAwfs, m: LMapStruct, rA: RMapStruct, rB: RMapStruct) -> DefRetStruct:
    """Deformation retract structure on an L_Γ-map between fibrant objects.

    ``rA`` and ``rB`` are R_Γ-structures on the anchors of ``m``'s source and
    target, viewed as maps to the terminal object ``(Γ, id)``.
    """
    C = I.cocyl
    A, B = m.m.src, m.m.dst
    if rA.f != as_terminal_map(A) or rB.f != as_terminal_map(B):
        raise BaseMismatch("fibrancy structures are not on the anchors of m")
    g = solve_lift(m, rA, top=slice_identity(A), bottom=as_terminal_map(B))

    lb = lbdy(C, as_terminal_map(B))
    r_lb = I.axiom_lbdy(rB, verify=False)
    rcB = rel_cocyl(C, B)
    rcG = rel_cocyl(C, terminal_slice(B.base))
    top = rcB.degen_slice @ m.m
    pbBB = pullback(B.anchor, B.anchor)
    ends = pbBB.mediate(m.m.map @ g.map, identity(B.total))
    bottom_map = lb.pb.mediate(rcG.degen @ B.anchor, ends)
    bottom = SliceMap(B, lb.codomain, bottom_map)
    psi = solve_lift(m, r_lb, top=top, bottom=bottom)
    h = Homotopy(psi.map, m.m.map @ g.map, identity(B.total), rcB.face0, rcB.face1)
    return DefRetStruct(m.m, g, h)


def restrict_right(I: FibredAwfs, f: SliceMap, r1: RMapStruct) -> RMapStruct:
    """An R_Γ-structure on ``f`` over ``Γ`` from an R_1-structure on its underlying map."""
    G = f.base
    if r1.f.map != f.map or r1.base != ONE:
        raise BaseMismatch("global structure is not on the underlying map of f")
    to_one = bang(G)
    r_G = reindex_structure(I, to_one, r1)  # on Γ×f
    GX, GY = r_G.f.src, r_G.f.dst
    pbX = pullback(to_one, bang(f.src.total))
    pbY = pullback(to_one, bang(f.dst.total))
    top = SliceMap(f.src, GX, pbX.mediate(f.src.anchor, identity(f.src.total)))
    bottom = SliceMap(f.dst, GY, pbY.mediate(f.dst.anchor, identity(f.dst.total)))
    sq = SliceSquare(top=top, left=f, right=r_G.f, bottom=bottom)
    return rmap_pullback(r_G, sq)


def globalize_left(I: FibredAwfs, lm: LMapStruct) -> LMapStruct:
    """An L_1-structure on the underlying map of an L_Γ-map."""
    m = lm.m
    G = m.base
    A, B = m.src, m.dst
    to_one = bang(G)
    gm = forget(m)
    Gm = reindex_map(to_one, gm)  # Γ×m over Γ
    pbA = pullback(to_one, bang(A.total))
    pbB = pullback(to_one, bang(B.total))
    h = SliceMap(A, Gm.src, pbA.mediate(A.anchor, identity(A.total)))
    k = SliceMap(B, Gm.dst, pbB.mediate(B.anchor, identity(B.total)))
    kk = I.k_square(SliceSquare(top=h, left=m, right=Gm, bottom=k))
    iso = I.reindex_iso(to_one, gm)
    pi2 = pullback(to_one, I.K(gm).anchor).pi2
    transport = pi2 @ iso.fwd @ kk.map
    w = first_difference(transport @ I.L(m).map, I.L(gm).map)
    if w is not None:
        raise LawViolation("globalize-top-composite", w)
    return LMapStruct(I, gm, transport @ lm.s)


def right_across_left(I: FibredAwfs, m: LMapStruct, ra: RMapStruct, rb: RMapStruct) -> RMapStruct:
    """An R_1-structure on ``b: B -> Γ`` transported across the L_Γ-map ``m``.

    ``ra`` is an R_1-structure on ``a: A -> Γ``; ``rb`` an R_Γ-structure on
    ``b`` as a map to ``(Γ, id)``.
    """
    C = I.cocyl
    A, B = m.m.src, m.m.dst
    G = m.base
    a_slice = as_terminal_map(A)
    ra_G = restrict_right(I, a_slice, ra)
    dr = left_to_deformation(I, m, ra_G, rb)
    r, psi = dr.g, dr.psi

    b = global_map(B.anchor)
    L1b = free_lmap(I, b)
    fa_b = I.factor(b)
    j_a = solve_lift(
        L1b,
        ra,
        top=global_map(r.map),
        bottom=fa_b.R,
    )

    lf = lface0(C, as_terminal_map(B))
    r_lf = I.axiom_lface(rb, verify=False)
    rcB = rel_cocyl(C, B)
    rcG = rel_cocyl(C, terminal_slice(G))
    first = rcG.degen @ fa_b.R.map
    bottom = lf.pb.mediate(first, m.m.map @ j_a.map)
    j_b = solve_lift(
        L1b,
        r_lf,
        top=SliceMap(global_object(B.total), r_lf.f.src, psi.psi),
        bottom=SliceMap(fa_b.K, r_lf.f.dst, bottom),
    )
    return RMapStruct(I, b, rcB.face1 @ j_b.map)


def heterogenize_right(I: FibredAwfs, f_G: RMapStruct, rx: RMapStruct, ry: RMapStruct) -> RMapStruct:
    """An R_1-structure on an R_Γ-map whose source and target anchors are R_1-maps."""
    C = I.cocyl
    f = f_G.f
    X, Y = f.src, f.dst
    G = f.base
    if rx.f.map != X.anchor or ry.f.map != Y.anchor:
        raise BaseMismatch("fibrancy structures are not on the anchors of f")
    gf = forget(f)
    L1f = free_lmap(I, gf)
    fa = I.factor(gf)
    Gam = global_object(G)
    yR = Y.anchor @ fa.R.map

    j_x = solve_lift(L1f, rx, top=slice_identity(rx.f.src), bottom=SliceMap(fa.K, Gam, yR))

    y_glob = global_map(Y.anchor)
    lb = lbdy(C, y_glob)
    r_lb = I.axiom_lbdy(ry, verify=False)
    rcY1 = rel_cocyl(C, global_object(Y.total))
    rcG1 = rel_cocyl(C, global_object(G))
    pbYY = pullback(bang(Y.total), bang(Y.total))
    bottom_y = lb.pb.mediate(rcG1.degen @ yR, pbYY.mediate(f.map @ j_x.map, fa.R.map))
    j_y = solve_lift(
        L1f,
        r_lb,
        top=SliceMap(global_object(X.total), r_lb.f.src, rcY1.degen @ f.map),
        bottom=SliceMap(fa.K, r_lb.f.dst, bottom_y),
    )

    lf = lface0(C, f)
    r_lf = I.axiom_lface(f_G, verify=False)
    rcX = rel_cocyl(C, X)
    rcY = rel_cocyl(C, Y)
    path = rcY.pb.mediate(yR, rcY1.pb.pi2 @ j_y.map)
    bottom_f = lf.pb.mediate(path, j_x.map)
    j_f = solve_lift(
        L1f,
        r_lf,
        top=SliceMap(global_object(X.total), r_lf.f.src, rcX.degen),
        bottom=SliceMap(fa.K, r_lf.f.dst, bottom_f),
    )
    return RMapStruct(I, gf, rcX.face1 @ j_f.map)


def stable_factorization(I: FibredAwfs, f: SliceMap, rx: RMapStruct, ry: RMapStruct) -> tuple[LMapStruct, RMapStruct]:
    """L_1- and R_1-structures on ``L_Γ(f)`` and ``R_Γ(f)``."""
    lm_G, rm_G = free_structures(I, f)
    l1 = globalize_left(I, lm_G)

    ry_G = restrict_right(I, as_terminal_map(f.dst), ry)
    k_G = rmap_compose(rm_G, ry_G)
    # right_across_left sees L_Γ(f) as a map (X,x) -> (K,k) over Γ
    k1 = right_across_left(I, lm_G, rx, k_G)
    r1 = heterogenize_right(I, rm_G, k1, ry)
    return l1, r1


def diagonal(f: SliceMap | GroupoidMap):
    """``Δ_f : (X, f) -> (X ×_Γ X, f∘π1)`` together with the chosen pullback."""
    fm = f.map if isinstance(f, SliceMap) else f
    pb = pullback(fm, fm)
    X = SliceObject(fm.dom, fm)
    XX = SliceObject(pb.P, fm @ pb.pi1)
    return SliceMap(X, XX, pb.mediate(identity(fm.dom), identity(fm.dom))), pb


def diagonal_factorization(I: FibredAwfs, rf: RMapStruct) -> DiagFact:
    """The stable factorization of the diagonal of an R_1-map ``f: X -> Γ``."""
    if rf.base != ONE:
        raise BaseMismatch("diagonal factorization needs a global R-map")
    f = rf.f.map
    d, pb = diagonal(f)
    pi1 = global_map(pb.pi1)
    sq = SliceSquare(top=global_map(pb.pi2), left=pi1, right=rf.f, bottom=rf.f)
    r_pi1 = rmap_pullback(rf, sq)
    r_fpi1 = rmap_compose(r_pi1, rf)
    r, p = stable_factorization(I, d, rf, r_fpi1)
    return DiagFact(rf, I.K(d), d, r, p)


@dataclass(frozen=True, eq=False)
class StabilityReport:
    holds: bool
    square: Square
    diagonal_square_holds: bool


def check_stability(I: FibredAwfs, pb: Square, rf: RMapStruct, rf2: RMapStruct) -> StabilityReport:
    """Compare ``P_{f'}`` and ``P_f`` along a cartesian square ``(h,k): f' -> f``.

    ``pb`` has ``left = f'``, ``right = f``, ``top = h`` and ``bottom = k``.
    The returned square is ``(P_{(h,k)}, k)`` between the anchors of
    ``P_{f'}`` and ``P_f``; ``diagonal_square_holds`` reports the companion
    square over ``X' ×_{Γ'} X' -> X ×_Γ X``.
    """
    if not is_pullback_square(pb):
        raise NotAPullback("stability is only claimed for cartesian squares")
    if rf.f.map != pb.right or rf2.f.map != pb.left:
        raise BaseMismatch("structures are not on the legs of the square")
    h, k = pb.top, pb.bottom
    fp, f = pb.left, pb.right
    d, pbX = diagonal(f)
    dp, pbXp = diagonal(fp)
    P = I.K(d)
    Pp = I.K(dp)

    kX, _ = reindex_slice(k, d.src)
    kXX, _ = reindex_slice(k, d.dst)
    pk_X = pullback(k, d.src.anchor)
    pk_XX = pullback(k, d.dst.anchor)
    h_cmp = SliceMap(dp.src, kX, pk_X.mediate(fp, h))
    hh = pbX.mediate(h @ pbXp.pi1, h @ pbXp.pi2)
    k_cmp = SliceMap(dp.dst, kXX, pk_XX.mediate(dp.dst.anchor, hh))
    P_hk = base_change_k(I, k, dp, d, h_cmp, k_cmp)
    square = Square(top=P_hk, left=Pp.anchor, right=P.anchor, bottom=k)
    holds = is_pullback_square(square)
    dsq = Square(top=P_hk, left=I.R(dp).map, right=I.R(d).map, bottom=hh)
    return StabilityReport(holds, square, dsq.commutes() and is_pullback_square(dsq))
