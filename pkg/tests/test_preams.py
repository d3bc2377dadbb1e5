import pytest
from hypothesis import given, settings
from strategies import rngs

from awfs_forge.awfs import LMapStruct, free_lmap
from awfs_forge.errors import BaseMismatch, NotAPullback, PreAmsViolation
from awfs_forge.gpd import BZ2, D2, IVL, ONE, SliceSquare, bang, global_map, identity, point
from awfs_forge.instances.cofibration import CofibrationAwfs
from awfs_forge.instances.corpus import pullback_square, random_fibrant_map
from awfs_forge.instances.degenerate import degenerate_instance, identity_structure
from awfs_forge.instances.groupoid import groupoid_instance, search_cleavage
from awfs_forge.preams import (
    PreAms,
    StrongFibred,
    broken_xi,
    cast_ft_to_f,
    degenerate_lface,
    degenerate_preams,
    derive_ft_lface,
    derive_lface,
    identity_preams,
    lmap_pullback_strong,
)
from awfs_forge.suite import run_preams

GPD = groupoid_instance()
COF = CofibrationAwfs()


def fibre_square(lm, k0):
    """The chosen pullback of ``lm.m`` along the point ``k0`` of its codomain."""
    m = lm.m
    sq = pullback_square(m.map, point(m.dst.total, k0))
    return SliceSquare(top=global_map(sq.top), left=global_map(sq.left), right=m, bottom=global_map(sq.bottom))


# -- pulling L-structures back ------------------------------------------------


@pytest.mark.parametrize("f", [point(IVL, 0), bang(IVL), bang(BZ2)])
def test_companion_l_structures_pull_back_along_points(f):
    lm = free_lmap(COF, global_map(f))
    for k0 in lm.m.dst.total.objects:
        sq = fibre_square(lm, k0)
        out = lmap_pullback_strong(StrongFibred(COF), lm, sq)
        assert out.m == sq.left
        assert isinstance(out, LMapStruct)  # laws checked on creation


def test_groupoid_pullback_where_it_is_preserved():
    lm = free_lmap(GPD, global_map(point(BZ2, 0)))
    sq = fibre_square(lm, (0, (0, 0)))
    assert StrongFibred(GPD).preserves(sq)
    out = lmap_pullback_strong(StrongFibred(GPD), lm, sq)
    assert out.m == sq.left


def test_groupoid_pullback_where_it_is_not_preserved():
    lm = free_lmap(GPD, global_map(bang(IVL)))
    sq = fibre_square(lm, (0, (0, 0)))
    with pytest.raises(NotAPullback, match="right factor"):
        lmap_pullback_strong(StrongFibred(GPD), lm, sq)


def test_non_cartesian_squares_are_refused():
    D = degenerate_instance()
    lm = free_lmap(D, global_map(identity(D2)))
    p0 = point(D2, 0)
    # commutes, but the pullback of id along the point is ONE, not D2
    sq = SliceSquare(top=global_map(p0 @ bang(D2)), left=global_map(bang(D2)), right=lm.m, bottom=global_map(p0))
    with pytest.raises(NotAPullback, match="cartesian"):
        lmap_pullback_strong(StrongFibred(D), lm, sq)


def test_pullback_checks_ownership():
    lm = free_lmap(COF, global_map(bang(IVL)))
    sq = fibre_square(lm, lm.m.dst.total.objects[0])
    with pytest.raises(BaseMismatch):
        lmap_pullback_strong(StrongFibred(GPD), lm, sq)
    other = fibre_square(free_lmap(COF, global_map(bang(BZ2))), (0, 0))
    with pytest.raises(BaseMismatch):
        lmap_pullback_strong(StrongFibred(COF), lm, other)


# -- pre-ams and the cast ----------------------------------------------------


def test_identity_preams_cast_changes_nothing():
    P = identity_preams(GPD)
    rf = search_cleavage(GPD, global_map(bang(IVL)))
    assert cast_ft_to_f(P, rf).p == rf.p


@pytest.mark.parametrize("X", [ONE, IVL, BZ2, D2])
def test_degenerate_preams_cast_is_identity(X):
    P = degenerate_preams()
    out = cast_ft_to_f(P, identity_structure(P.second, global_map(bang(X))))
    assert out.p == identity(X)
    assert out.awfs is P.first


def test_broken_xi_is_rejected():
    P = broken_xi(degenerate_preams())
    rf = identity_structure(P.second, global_map(bang(IVL)))
    with pytest.raises(PreAmsViolation):
        cast_ft_to_f(P, rf)


def test_broken_xi_goes_unnoticed_on_the_point():
    # a constant map out of ONE is the identity
    P = broken_xi(degenerate_preams())
    rf = identity_structure(P.second, global_map(identity(ONE)))
    assert cast_ft_to_f(P, rf).p == identity(ONE)


def test_cast_needs_a_structure_of_the_second_awfs():
    P = PreAms(GPD, degenerate_instance(), lambda f: identity(f.src.total))
    rf = search_cleavage(GPD, global_map(bang(IVL)))
    with pytest.raises(BaseMismatch):
        cast_ft_to_f(P, rf)


# -- Leibniz face structures from the degenerate pre-ams ----------------------


def lface_of(D):
    return lambda r: degenerate_lface(D, r)


@pytest.mark.parametrize("X", [IVL, BZ2])
def test_derive_lface_over_the_point(X):
    P = degenerate_preams()
    D = P.first
    rf = identity_structure(D, global_map(bang(X)))
    ft = derive_ft_lface(StrongFibred(D), rf, lface_of(D))
    assert ft.base == ONE
    ft.check()
    out = derive_lface(P, StrongFibred(D), rf, lface_of(D))
    out.check()
    assert out.p == identity(out.f.src.total)


@settings(max_examples=15)
@given(rng=rngs)
def test_derive_lface_on_random_maps(rng):
    P = degenerate_preams()
    D = P.first
    rf = D.find_rstructure(random_fibrant_map(rng, D).f)
    derive_lface(P, StrongFibred(D), rf, lface_of(D)).check()


def test_derive_lface_checks_its_inputs():
    P = degenerate_preams()
    D = P.first
    rf = identity_structure(D, global_map(bang(IVL)))
    with pytest.raises(BaseMismatch):
        derive_lface(P, StrongFibred(COF), rf, lface_of(D))
    with pytest.raises(BaseMismatch):
        derive_lface(P, StrongFibred(D), search_cleavage(GPD, global_map(bang(IVL))), lface_of(D))
    with pytest.raises(BaseMismatch):
        degenerate_lface(GPD, rf)


def test_preams_run_detects_the_broken_xi():
    report = run_preams(seed=3, n=6)
    assert report.failures == []
    assert report.extra["broken_xi_detected"] > 0
