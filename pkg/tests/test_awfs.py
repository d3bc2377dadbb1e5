import random

import pytest
from hypothesis import given, settings
from strategies import rngs

from awfs_forge.awfs import (
    LMapStruct,
    RMapStruct,
    check_fibred_iso,
    check_fibred_k_square,
    counit_square,
    factor,
    free_lmap,
    free_rmap,
    k_square,
    reindex_structure,
    rmap_compose,
    rmap_pullback,
    solve_lift,
    unit_square,
)
from awfs_forge.constructs import restrict_right
from awfs_forge.errors import BaseMismatch, LawViolation, NotAPullback
from awfs_forge.gpd import (
    BZ2,
    BZ2_E,
    D2,
    IVL,
    IVL_U,
    ONE,
    CanonIso,
    GroupoidMap,
    SliceMap,
    SliceObject,
    SliceSquare,
    as_terminal_map,
    bang,
    first_difference,
    global_map,
    identity,
    invert,
    point,
    product,
    pullback,
    slice_identity,
)
from awfs_forge.instances.cofibration import CofibrationAwfs
from awfs_forge.instances.corpus import (
    random_base_change,
    random_isofibration,
    random_slice,
    random_slice_map,
    small_groupoid,
)
from awfs_forge.instances.degenerate import degenerate_instance, identity_structure
from awfs_forge.instances.groupoid import groupoid_instance, search_cleavage
from awfs_forge.instances.oracle import search_lstructure
from awfs_forge.instances.validate import (
    check_associative,
    check_coassociative,
    check_k_composite,
    check_k_identity,
    check_natural,
    _square_pair,
    check_unit_counit,
)

GPD = groupoid_instance()
DEG = degenerate_instance()
COF = CofibrationAwfs()
INSTANCES = [GPD, DEG, COF]
ids = [I.name for I in INSTANCES]


def d0():
    return global_map(point(IVL, 0))


def d0_lmap():
    """The L-structure on δ0 given by hand: 0 ↦ (∗, id0), 1 ↦ (∗, u)."""
    K = GPD.K(d0()).total
    obj = {0: (0, (0, 0)), 1: (0, (0, IVL_U))}

    def arr(a):
        s, t = IVL.ends(a)
        (e,) = K.hom(obj[s], obj[t])
        return e

    return LMapStruct(GPD, d0(), GroupoidMap.build(IVL, K, obj.__getitem__, arr))


# -- fixed examples ----------------------------------------------------------


def test_degenerate_factorization_is_trivial():
    f = global_map(bang(IVL))
    L, K, R = factor(DEG, f)
    assert L.map == identity(IVL)
    assert K.total == IVL
    assert R == f


def test_groupoid_factorization_of_ivl_to_one_is_ivl():
    f = global_map(bang(IVL))
    L, K, R = factor(GPD, f)
    CanonIso.of(L.map).check()
    assert len(K.total.objects) == 2


def test_k_of_delta0_has_two_isomorphic_objects():
    L, K, R = factor(GPD, d0())
    T = K.total
    assert sorted(T.objects) == [(0, (0, 0)), (0, (0, IVL_U))]
    assert {R.map.obj[k] for k in T.objects} == {0, 1}
    assert R.map.obj[(0, (0, 0))] == 0 and R.map.obj[(0, (0, IVL_U))] == 1
    assert len(T.hom(*T.objects)) == 1


def test_l_structure_on_delta0_is_unique_and_the_hand_one():
    lm = search_lstructure(GPD, d0())
    assert lm.s.obj[0] == (0, (0, 0))
    assert lm.s.obj[1] == (0, (0, IVL_U))
    assert first_difference(lm.s, d0_lmap().s) is None


def test_r_structure_on_bz2_to_one_is_identity_up_to_iso():
    # Cocyl(ONE) = ONE, so L(!) is an iso and p must be its inverse
    f = global_map(bang(BZ2))
    L = GPD.L(f).map
    CanonIso.of(L).check()
    rs = search_cleavage(GPD, f)
    assert rs.p == invert(L)


def test_canonical_lift_against_bz2_picks_the_unit():
    lm = d0_lmap()
    rb = search_cleavage(GPD, global_map(bang(BZ2)))
    top = global_map(point(BZ2, 0))
    bottom = global_map(bang(IVL))
    j = solve_lift(lm, rb, top, bottom)
    assert j.map.arr[IVL_U] == BZ2_E


def test_degenerate_lift_against_iso_is_h_after_inverse():
    swap = GroupoidMap(IVL, IVL, {0: 1, 1: 0}, {0: 1, 1: 0, 2: 3, 3: 2})
    m = global_map(swap)
    lm = free_lmap(DEG, m)
    f = global_map(bang(BZ2))
    rf = identity_structure(DEG, f)
    h = GroupoidMap(IVL, BZ2, {0: 0, 1: 0}, {0: 0, 1: 0, 2: 1, 3: 1})
    j = solve_lift(lm, rf, global_map(h), global_map(bang(IVL)))
    inv = GroupoidMap(IVL, IVL, {0: 1, 1: 0}, {0: 1, 1: 0, 2: 3, 3: 2})
    assert j.map == h @ inv


def test_identity_square_gives_identity_k_map():
    f = global_map(bang(IVL))
    sq = SliceSquare(top=slice_identity(f.src), left=f, right=f, bottom=slice_identity(f.dst))
    for I in INSTANCES:
        assert first_difference(k_square(I, sq), identity(I.K(f).total)) is None


def test_degenerate_k_square_is_the_top_map():
    f = global_map(bang(IVL))
    fp = global_map(bang(ONE))
    top = global_map(point(IVL, 1))
    sq = SliceSquare(top=top, left=fp, right=f, bottom=slice_identity(f.dst))
    assert k_square(DEG, sq) == top.map


def test_delta0_inclusion_square_is_natural():
    f = global_map(bang(IVL))
    sq = SliceSquare(top=d0(), left=global_map(bang(ONE)), right=f, bottom=slice_identity(f.dst))
    check_natural(GPD, sq)


def test_composite_of_projections_carries_a_structure():
    pb = product(IVL, IVL)
    r1 = search_cleavage(GPD, global_map(pb.pi1))
    r2 = search_cleavage(GPD, global_map(bang(IVL)))
    rc = rmap_compose(r1, r2)
    rc.check()
    assert rc.f.map == bang(IVL) @ pb.pi1


def test_composing_with_an_identity_keeps_the_structure_up_to_iso():
    f = global_map(bang(IVL))
    rf = search_cleavage(GPD, f)
    rid = search_cleavage(GPD, slice_identity(f.src))
    rc = rmap_compose(rid, rf)
    rc.check()
    assert rc.f == f


def test_pullback_of_bz2_structure_along_d2():
    f = global_map(bang(BZ2))
    rf = search_cleavage(GPD, f)
    pb = pullback(bang(D2), f.map)
    sq = SliceSquare(top=global_map(pb.pi2), left=global_map(pb.pi1), right=f, bottom=global_map(bang(D2)))
    rp = rmap_pullback(rf, sq)
    rp.check()


def test_pullback_along_identity_keeps_the_structure_up_to_iso():
    f = global_map(bang(IVL))
    rf = search_cleavage(GPD, f)
    pb = pullback(identity(ONE), f.map)
    sq = SliceSquare(top=global_map(pb.pi2), left=global_map(pb.pi1), right=f, bottom=slice_identity(f.dst))
    rp = rmap_pullback(rf, sq)
    CanonIso.of(pb.pi2).check()
    assert len(rp.f.src.total.objects) == 2


def test_degenerate_pullback_structure_is_identity():
    f = global_map(bang(BZ2))
    rf = identity_structure(DEG, f)
    pb = pullback(bang(D2), f.map)
    sq = SliceSquare(top=global_map(pb.pi2), left=global_map(pb.pi1), right=f, bottom=global_map(bang(D2)))
    rp = rmap_pullback(rf, sq)
    assert rp.p == identity(pb.P)


def test_rmap_pullback_refuses_non_cartesian_squares():
    f = global_map(bang(D2))
    rf = identity_structure(DEG, f)
    sq = SliceSquare(top=global_map(point(D2, 0)), left=global_map(bang(ONE)), right=f, bottom=slice_identity(f.dst))
    with pytest.raises(NotAPullback):
        rmap_pullback(rf, sq)


def test_reindex_projection_structure_along_a_point():
    pb = product(IVL, BZ2)
    X = SliceObject(pb.P, pb.pi1)
    f = SliceMap(X, SliceObject(IVL, identity(IVL)), pb.pi1)
    rf = GPD.find_rstructure(f)
    assert rf is not None
    r0 = reindex_structure(GPD, point(IVL, 0), rf)
    r0.check()
    assert r0.base == ONE
    assert len(r0.f.src.total.objects) == 1


def test_reindex_along_identity_keeps_the_structure_up_to_iso():
    f = global_map(bang(IVL))
    rf = search_cleavage(GPD, f)
    r2 = reindex_structure(GPD, identity(ONE), rf)
    r2.check()


def test_degenerate_reindexing_gives_identity_structure():
    f = global_map(bang(IVL))
    rf = identity_structure(DEG, f)
    r2 = reindex_structure(DEG, bang(D2), rf)
    assert r2.p == identity(r2.f.src.total)


def test_structures_must_share_an_instance():
    f = global_map(bang(BZ2))
    with pytest.raises(BaseMismatch):
        solve_lift(d0_lmap(), identity_structure(DEG, f), global_map(point(BZ2, 0)), global_map(bang(IVL)))


def test_bad_r_structure_is_rejected():
    f = global_map(bang(BZ2))
    K = GPD.K(f).total
    const = GroupoidMap.build(K, BZ2, lambda k: 0, lambda e: BZ2_E)
    with pytest.raises(LawViolation):
        RMapStruct(GPD, f, const)


# -- laws on random slice maps -----------------------------------------------


def sample_map(rng):
    G = small_groupoid(rng)
    Y = random_slice(rng, G)
    return random_slice_map(rng, Y)


@pytest.mark.parametrize("I", INSTANCES, ids=ids)
@settings(max_examples=20)
@given(rng=rngs)
def test_factorization_and_free_structures(I, rng):
    f = sample_map(rng)
    L, K, R = factor(I, f)
    assert R.map @ L.map == f.map
    check_unit_counit(I, f)
    free_lmap(I, f)
    free_rmap(I, f)
    unit_square(I, f).check()
    counit_square(I, f).check()


@pytest.mark.parametrize("I", INSTANCES, ids=ids)
@settings(max_examples=15)
@given(rng=rngs)
def test_comonad_and_monad_laws(I, rng):
    f = sample_map(rng)
    check_coassociative(I, f)
    check_associative(I, f)
    check_k_identity(I, f)


@pytest.mark.parametrize("I", INSTANCES, ids=ids)
@settings(max_examples=15)
@given(rng=rngs)
def test_k_is_a_functor_on_squares(I, rng):
    f = sample_map(rng)
    sq1, sq2 = _square_pair(rng, f)
    check_natural(I, sq2)
    check_k_composite(I, sq1, sq2)


@pytest.mark.parametrize("I", INSTANCES, ids=ids)
@settings(max_examples=15)
@given(rng=rngs)
def test_reindexing_commutes_with_the_factorization(I, rng):
    G = small_groupoid(rng)
    f = random_slice_map(rng, random_slice(rng, G))
    sigma = random_base_change(rng, G)
    check_fibred_iso(I, sigma, f)
    _, sq2 = _square_pair(rng, f)
    check_fibred_k_square(I, sigma, sq2)


@settings(max_examples=15)
@given(rng=rngs)
def test_reindexed_r_structures_pass_their_laws(rng):
    G = small_groupoid(rng)
    rf = random_isofibration(rng, GPD, G)
    r_G = restrict_right(GPD, as_terminal_map(SliceObject(rf.f.src.total, rf.f.map)), rf)
    sigma = random_base_change(rng, G)
    r2 = reindex_structure(GPD, sigma, r_G)
    r2.check()
    assert r2.base == sigma.dom


def test_cofibration_r_maps_are_surjective_equivalences():
    # D2 -> ONE is surjective but not full, IVL -> ONE is both
    assert COF.find_rstructure(global_map(bang(D2))) is None
    assert COF.find_rstructure(global_map(bang(IVL))) is not None
    assert COF.find_rstructure(global_map(bang(BZ2))) is None


def test_rng_is_reproducible():
    a = sample_map(random.Random(5))
    b = sample_map(random.Random(5))
    assert a.map.obj == b.map.obj and a.map.arr == b.map.arr
