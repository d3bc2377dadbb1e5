import pytest
from hypothesis import given
from strategies import functors, groupoids, slices

from awfs_forge.cocyl import (
    ARROW,
    TRIVIAL,
    check_cocylinder_laws,
    check_cocylinder_naturality,
    check_rel_cocyl,
    lbdy,
    leibniz,
    lface0,
    rel_boundary,
    rel_cocyl,
    rel_cocyl_map,
)
from awfs_forge.gpd import (
    BZ2,
    IVL,
    ONE,
    CanonIso,
    SliceObject,
    bang,
    first_difference,
    global_map,
    global_object,
    identity,
    pullback,
    slice_identity,
)
from awfs_forge.instances.oracle import is_pullback_by_probes


def test_cocyl_of_ivl_has_four_objects_and_sixteen_arrows():
    P = ARROW(IVL)
    assert (len(P.objects), len(P.arrows)) == (4, 16)
    # all homs of IVL are singletons, so every pair of paths is joined by one square
    for a in P.objects:
        for b in P.objects:
            assert len(P.hom(a, b)) == 1


def test_cocyl_of_bz2_counts():
    P = ARROW(BZ2)
    assert (len(P.objects), len(P.arrows)) == (2, 8)


def test_cocyl_of_one_is_one():
    P = ARROW(ONE)
    assert (len(P.objects), len(P.arrows)) == (1, 1)


@pytest.mark.parametrize("X", [ONE, IVL, BZ2])
def test_trivial_cocylinder_is_identity(X):
    assert TRIVIAL(X) == X
    assert TRIVIAL.face0(X) == identity(X)
    assert TRIVIAL.face1(X) == identity(X)
    assert TRIVIAL.degen(X) == identity(X)


@given(groupoids())
def test_faces_are_retractions_of_degen(X):
    for C in (ARROW, TRIVIAL):
        check_cocylinder_laws(C, X)
        for i in (0, 1):
            assert C.face(i, X) @ C.degen(X) == identity(X)


@given(functors())
def test_cocylinder_is_natural(k):
    for C in (ARROW, TRIVIAL):
        check_cocylinder_naturality(C, k)
        for i in (0, 1):
            assert first_difference(C.face(i, k.cod) @ C(k), k @ C.face(i, k.dom)) is None
        assert first_difference(C(k) @ C.degen(k.dom), C.degen(k.cod) @ k) is None


def test_cocyl_preserves_identities_and_composites():
    f = bang(IVL)
    assert first_difference(ARROW(identity(IVL)), identity(ARROW(IVL))) is None
    swap = identity(IVL)
    assert first_difference(ARROW(f @ swap), ARROW(f) @ ARROW(swap)) is None


# -- relative cocylinder -----------------------------------------------------


def test_relative_cocylinder_over_the_point_is_cocyl():
    A = global_object(IVL)
    rc = rel_cocyl(ARROW, A)
    CanonIso.of(rc.proj_to_cocyl).check()


def test_relative_cocylinder_of_the_base_itself_is_the_base():
    # only degenerate paths lie over degenerate paths of the identity
    A = SliceObject(IVL, identity(IVL))
    rc = rel_cocyl(ARROW, A)
    T = rc.total.total
    assert (len(T.objects), len(T.arrows)) == (2, 4)
    CanonIso.of(rc.proj_to_base).check()


def test_relative_cocylinder_apex_is_a_pullback():
    A = SliceObject(IVL, identity(IVL))
    rc = rel_cocyl(ARROW, A)
    assert is_pullback_by_probes(rc.pb.square)


@given(slices())
def test_relative_cocylinder_laws(A):
    for C in (ARROW, TRIVIAL):
        rc = rel_cocyl(C, A)
        check_rel_cocyl(rc)
        for i in (0, 1):
            assert rc.face(i) @ rc.degen == identity(A.total)
            assert A.anchor @ rc.face(i) == rc.total.anchor


@given(slices())
def test_relative_cocylinder_map_of_identity(A):
    m = rel_cocyl_map(ARROW, slice_identity(A))
    assert first_difference(m.map, identity(rel_cocyl(ARROW, A).total.total)) is None


def test_face_legs_of_cocyl_ivl_pull_back_to_composable_pairs():
    # each middle object of IVL has two paths in and two out
    pb = pullback(ARROW.face1(IVL), ARROW.face0(IVL))
    assert len(pb.P.objects) == 8


# -- Leibniz maps ------------------------------------------------------------


def test_leibniz_boundary_of_ivl_to_one_hits_every_pair():
    lb = lbdy(ARROW, global_map(bang(IVL)))
    m = lb.map.map
    assert len(lb.map.dst.total.objects) == 4
    assert {m.obj[x] for x in m.dom.objects} == set(lb.map.dst.total.objects)


def test_leibniz_face_of_identity_is_the_first_projection_up_to_iso():
    f = global_map(identity(IVL))
    lf = lface0(ARROW, f)
    iso = CanonIso.of(lf.map.map)
    iso.check()


def test_degenerate_leibniz_face_is_an_iso():
    f = global_map(bang(BZ2))
    lf = lface0(TRIVIAL, f)
    CanonIso.of(lf.map.map).check()


def test_leibniz_kind_dispatch():
    f = global_map(bang(IVL))
    assert leibniz(ARROW, f, "face0").kind == "face0"
    assert leibniz(ARROW, f, "bdy").kind == "bdy"
    with pytest.raises(ValueError):
        leibniz(ARROW, f, "face1")


def test_relative_boundary_pairs_endpoints():
    A = global_object(IVL)
    bdy, pb = rel_boundary(ARROW, A)
    rc = rel_cocyl(ARROW, A)
    assert pb.pi1 @ bdy.map == rc.face0
    assert pb.pi2 @ bdy.map == rc.face1
