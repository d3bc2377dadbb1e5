"""Strongly fibred awfs's, pre-ams and Leibniz structures obtained from them.

A pre-ams is represented by its comparison ``ξ_f : K_1(f) -> K_2(f)``
between the middle objects of the two factorizations.  That is all the
cast from trivial-fibration structures to fibration structures consumes:
``p ↦ p∘ξ_f`` is an algebra exactly when ``ξ_f∘L_1 = L_2`` and
``R_2∘ξ_f = R_1``, and both equations are checked before casting.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

from .awfs import (
    FibredAwfs,
    LMapStruct,
    RMapStruct,
    free_lmap,
    reindex_structure,
    solve_lift,
)
from .cocyl import lface0
from .errors import BaseMismatch, NotAPullback, PreAmsViolation
from .gpd import (
    ONE,
    GroupoidMap,
    SliceMap,
    SliceObject,
    SliceSquare,
    Square,
    bang,
    first_difference,
    forget,
    identity,
    is_pullback_square,
    pullback,
    square_mediate,
)
from .instances.degenerate import DegenerateAwfs, degenerate_instance

Xi = Callable[[SliceMap], GroupoidMap]


# -- strongly fibred ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StrongFibred:
    """A fibred awfs used where its right factor must preserve pullbacks."""

    awfs: FibredAwfs

    def right_square(self, sq: SliceSquare) -> Square:
        """``R(h,k) = (K(h,k), k) : R(f') -> R(f)``."""
        I = self.awfs
        return Square(top=I.k_square(sq).map, left=I.R(sq.left).map, right=I.R(sq.right).map, bottom=sq.bottom.map)

    def preserves(self, sq: SliceSquare) -> bool:
        """``R(h,k)`` is cartesian; only meaningful for cartesian ``sq``."""
        return is_pullback_square(self.right_square(sq))


def lmap_pullback_strong(S: StrongFibred, lm: LMapStruct, sq: SliceSquare) -> LMapStruct:
    """Pull an L-structure on ``m`` back along a cartesian square ``(h,k): m' -> m``.

    ``s'`` is the map into the cartesian square ``R(h,k)`` determined by
    ``s∘k`` and ``id``.
    """
    I = S.awfs
    if lm.awfs is not I:
        raise BaseMismatch("structure does not belong to the strongly fibred awfs")
    if sq.right != lm.m:
        raise BaseMismatch("square does not end at the structured map")
    if not is_pullback_square(sq.square):
        raise NotAPullback("L-structures are only pulled back along cartesian squares")
    rsq = S.right_square(sq)
    if not is_pullback_square(rsq):
        raise NotAPullback("right factor does not preserve this pullback")
    mp = sq.left
    s_new = square_mediate(rsq, lm.s @ sq.bottom.map, identity(mp.dst.total))
    return LMapStruct(I, mp, s_new)


# -- pre-ams -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PreAms:
    """``ξ : ⟨C^t, F⟩ -> ⟨C, F^t⟩``; ``first`` is ⟨C^t, F⟩, ``second`` ⟨C, F^t⟩."""

    first: FibredAwfs
    second: FibredAwfs
    xi: Xi

    def comparison(self, f: SliceMap) -> GroupoidMap:
        """``ξ_f`` after checking it commutes with both factorizations."""
        x = self.xi(f)
        fa1, fa2 = self.first.factor(f), self.second.factor(f)
        w = first_difference(x @ fa1.L.map, fa2.L.map)
        if w is not None:
            raise PreAmsViolation(f"xi does not commute with L at {w!r}")
        w = first_difference(fa2.R.map @ x, fa1.R.map)
        if w is not None:
            raise PreAmsViolation(f"xi does not commute with R at {w!r}")
        return x


def cast_ft_to_f(P: PreAms, a: RMapStruct) -> RMapStruct:
    """An F-structure on the underlying map of an F^t-structure: ``p∘ξ_f``."""
    if a.awfs is not P.second:
        raise BaseMismatch("structure does not belong to the trivial-fibration awfs")
    return RMapStruct(P.first, a.f, a.p @ P.comparison(a.f))


def identity_preams(I: FibredAwfs) -> PreAms:
    """``I`` compared with itself by the identity; its cast changes nothing."""
    return PreAms(I, I, lambda f: identity(I.K(f).total))


def degenerate_preams() -> PreAms:
    """Both awfs's degenerate, ``ξ = id``."""
    D = degenerate_instance()
    return PreAms(D, D, lambda f: identity(f.src.total))


def broken_xi(P: PreAms) -> PreAms:
    """Mutation: ``ξ_f`` replaced by the constant map at the first object of ``K_2(f)``."""

    def xi(f):
        K1 = P.first.K(f).total
        K2 = P.second.K(f).total
        c = K2.objects[0]
        return GroupoidMap.lazy(K1, K2, lambda _: c, lambda _: K2.ident(c), ("broken-xi", K1, K2))

    return PreAms(P.first, P.second, xi)


def degenerate_lface(S: FibredAwfs, rf: RMapStruct) -> RMapStruct:
    """``lface0_Γ(f)`` with ``p = id`` in the degenerate awfs."""
    if not isinstance(S, DegenerateAwfs):
        raise BaseMismatch("identity structures exist only in the degenerate awfs")
    lf = lface0(S.cocyl, rf.f)
    return RMapStruct(S, lf.map, identity(lf.map.src.total))


# -- Leibniz face maps from a pre-ams ---------------------------------------


def derive_ft_lface(
    S: StrongFibred,
    rf: RMapStruct,
    axiom2_lface: Callable[[RMapStruct], RMapStruct],
) -> RMapStruct:
    """An F^t_1-structure on ``lface0_Γ(f)`` from the slice-wise F^t_Γ-structure.

    ``g = lface0_Γ(f)`` lifts against its own free C_1-map ``L(g)``: the
    legs of ``g`` put ``L(g)`` over ``Γ``, reindexing along ``!_Γ`` and
    pulling back along ``⟨b, id⟩`` make it a C_Γ-map, and the slice lift
    against ``axiom2_lface(rf)`` is the required algebra.
    """
    C = S.awfs
    f = rf.f
    G = f.base
    lf = lface0(C.cocyl, f)
    g = forget(lf.map)
    lm = free_lmap(C, g)
    m = lm.m
    fa = C.factor(g)
    h = identity(g.src.total)  # top leg of the square L(g) -> g
    k = fa.R.map  # bottom leg
    b = lf.map.dst.anchor @ k
    a = lf.map.src.anchor @ h
    A = SliceObject(m.src.total, a)
    B = SliceObject(m.dst.total, b)
    m_G = SliceMap(A, B, m.map)

    to_one = bang(G)
    lm_G = reindex_structure(C, to_one, lm)  # on Γ×m
    pbA = pullback(to_one, bang(A.total))
    pbB = pullback(to_one, bang(B.total))
    top = SliceMap(A, lm_G.m.src, pbA.mediate(a, identity(A.total)))
    bottom = SliceMap(B, lm_G.m.dst, pbB.mediate(b, identity(B.total)))
    sq = SliceSquare(top=top, left=m_G, right=lm_G.m, bottom=bottom)
    lm_m = lmap_pullback_strong(S, lm_G, sq)

    rs_G = axiom2_lface(rf)
    if rs_G.f != lf.map:
        raise BaseMismatch("axiom structure is not on lface0 of the given map")
    j = solve_lift(lm_m, rs_G, top=SliceMap(A, lf.map.src, h), bottom=SliceMap(B, lf.map.dst, k))
    return RMapStruct(C, g, j.map)


def derive_lface(
    P: PreAms,
    S: StrongFibred,
    rf: RMapStruct,
    axiom2_lface: Callable[[RMapStruct], RMapStruct],
) -> RMapStruct:
    """An F_1-structure on ``lface0_Γ(f)`` for an F_Γ-map ``f``.

    ``P.second`` must be the strongly fibred ``S`` read over the point and
    ``P.first`` the awfs that ``rf`` belongs to.
    """
    if P.second is not S.awfs:
        raise BaseMismatch("pre-ams and strongly fibred awfs disagree")
    if rf.awfs is not P.first:
        raise BaseMismatch("structure does not belong to the pre-ams' fibration awfs")
    ft = derive_ft_lface(S, rf, axiom2_lface)
    if ft.base != ONE:
        raise BaseMismatch("derived structure is not global")
    return cast_ft_to_f(P, ft)
