"""Instance validator: run every law of a fibred awfs over a seeded corpus.

Each corpus item draws a handful of small groupoids, slices, maps and
squares from its own random stream, so items are independent and the
report does not depend on evaluation order.  A failing check becomes a
record carrying the first element at which the two sides of the law
differ; exceptions raised by the instance are reported the same way.
"""

from __future__ import annotations

import random

from ..awfs import (
    FibredAwfs,
    check_fibred_iso,
    check_fibred_k_square,
    counit_square,
    free_lmap,
    free_rmap,
    unit_square,
)
from ..cocyl import check_cocylinder_laws, check_cocylinder_naturality, check_rel_cocyl, rel_cocyl
from ..errors import LawViolation
from ..gpd import (
    SliceMap,
    SliceObject,
    SliceSquare,
    first_difference,
    identity,
    is_pullback_square,
    pullback,
    slice_identity,
    validate_groupoid,
)
from ..report import Report
from .corpus import (
    CorpusSpec,
    random_base_change,
    random_fibrant_map,
    random_functor,
    random_groupoid,
    random_slice,
    random_slice_map,
    small_groupoid,
)

# Axiom structures are verified over all of K only when K has at most this
# many arrows; larger ones are checked on all objects and a sample of
# arrows (see check_axiom_structure).
AXIOM_BUDGET = 20000


def _differ(law: str, lhs, rhs) -> None:
    w = first_difference(lhs, rhs)
    if w is not None:
        raise LawViolation(law, w)


# -- groupoid and cocylinder checks ------------------------------------------


def check_groupoid(G) -> None:
    bad = validate_groupoid(G)
    if bad:
        raise LawViolation(bad[0].law, bad[0].witness)
    for a in G.arrows:
        if G.inv(G.inv(a)) != a:
            raise LawViolation("inverse-involution", a)


def check_rel_pullback(I: FibredAwfs, A: SliceObject) -> None:
    rc = rel_cocyl(I.cocyl, A)
    check_rel_cocyl(rc)
    if not is_pullback_square(rc.pb.square):
        raise LawViolation("rel-cocyl-pullback", repr(A))


# -- awfs checks -------------------------------------------------------------


def check_factorization(I: FibredAwfs, f: SliceMap) -> None:
    fa = I.factor(f)
    _differ("factorization", fa.R.map @ fa.L.map, f.map)
    fa.L.verify()
    fa.R.verify()


def check_unit_counit(I: FibredAwfs, f: SliceMap) -> None:
    unit_square(I, f).check()
    counit_square(I, f).check()


def check_coassociative(I: FibredAwfs, f: SliceMap) -> None:
    """``K(id, Σ_f)∘Σ_f = Σ_{Lf}∘Σ_f``."""
    fa = I.factor(f)
    Lf = fa.L
    sigma = free_lmap(I, f).s_slice
    sigma_L = I.comult(Lf)
    sq = SliceSquare(top=slice_identity(f.src), left=Lf, right=I.L(Lf), bottom=sigma)
    _differ("comult-coassociative", I.k_square(sq).map @ sigma.map, sigma_L @ sigma.map)


def check_associative(I: FibredAwfs, f: SliceMap) -> None:
    """``Π_f∘K(Π_f, id) = Π_f∘Π_{Rf}``."""
    fa = I.factor(f)
    Rf = fa.R
    pi = free_rmap(I, f).p_slice
    pi_R = I.mult(Rf)
    sq = SliceSquare(top=pi, left=I.R(Rf), right=Rf, bottom=slice_identity(f.dst))
    _differ("mult-associative", pi.map @ I.k_square(sq).map, pi.map @ pi_R)


def check_natural(I: FibredAwfs, sq: SliceSquare) -> None:
    """``K(h,k)∘Lf' = Lf∘h`` and ``Rf∘K(h,k) = k∘Rf'``."""
    kk = I.k_square(sq).map
    Fp, F = I.factor(sq.left), I.factor(sq.right)
    _differ("L-natural", kk @ Fp.L.map, F.L.map @ sq.top.map)
    _differ("R-natural", F.R.map @ kk, sq.bottom.map @ Fp.R.map)


def check_k_identity(I: FibredAwfs, f: SliceMap) -> None:
    sq = SliceSquare(top=slice_identity(f.src), left=f, right=f, bottom=slice_identity(f.dst))
    _differ("K-identity", I.k_square(sq).map, identity(I.K(f).total))


def check_k_composite(I: FibredAwfs, sq1: SliceSquare, sq2: SliceSquare) -> None:
    """``K(sq2∘sq1) = K(sq2)∘K(sq1)`` for pasted squares ``f'' -> f' -> f``."""
    both = SliceSquare(
        top=sq2.top @ sq1.top, left=sq1.left, right=sq2.right, bottom=sq2.bottom @ sq1.bottom
    )
    _differ("K-composite", I.k_square(both).map, I.k_square(sq2).map @ I.k_square(sq1).map)


def check_axiom_structure(rs, sample: int = 24) -> None:
    """Algebra laws on a structure produced by an axiom functor.

    When ``K`` has at most ``AXIOM_BUDGET`` arrows both laws are checked on
    all of it.  Otherwise ``p∘L = id`` is still checked on the whole source,
    ``f∘p = R`` on every object of ``K``, and on the arrows out of
    ``sample`` evenly spaced objects.
    """
    K = rs.awfs.K(rs.f).total
    if K.small(AXIOM_BUDGET):
        rs.check()
        return
    fa = rs.awfs.factor(rs.f)
    _differ("rmap-p-after-L", rs.p @ fa.L.map, identity(rs.f.src.total))
    fo, fr = rs.f.map.obj, rs.f.map.arr
    Ro, Ra = fa.R.map.obj, fa.R.map.arr
    po, pa = rs.p.obj, rs.p.arr
    objs = K.objects
    for k in objs:
        if fo[po[k]] != Ro[k]:
            raise LawViolation("rmap-f-after-p", ("object", k))
    step = max(1, len(objs) // sample)
    for k in objs[::step]:
        for e in K.out(k):
            if fr[pa[e]] != Ra[e]:
                raise LawViolation("rmap-f-after-p", ("arrow", e))


def has_axioms(I: FibredAwfs) -> bool:
    """Whether the instance supplies both Leibniz structure functors."""
    cls = type(I)
    return cls.axiom_lface is not FibredAwfs.axiom_lface and cls.axiom_lbdy is not FibredAwfs.axiom_lbdy


# -- corpus items ------------------------------------------------------------


def _square_pair(rng: random.Random, f: SliceMap):
    """Two composable squares ``f'' -> f' -> f``.

    The second is the chosen pullback of ``f`` along a map ``k`` into its
    target, the first precomposes ``f'`` with a map into its source.
    """
    Yp = random_slice_map(rng, f.dst)
    pb = pullback(f.map, Yp.map)
    Xp = SliceObject(pb.P, f.src.anchor @ pb.pi1)
    fp = SliceMap(Xp, Yp.src, pb.pi2)
    sq2 = SliceSquare(top=SliceMap(Xp, f.src, pb.pi1), left=fp, right=f, bottom=Yp)
    # an empty pullback admits no maps in, so fall back to the identity
    h = random_slice_map(rng, Xp) if Xp.total.objects else slice_identity(Xp)
    sq1 = SliceSquare(top=h, left=fp @ h, right=fp, bottom=slice_identity(fp.dst))
    return sq1, sq2


def validate_item(I: FibredAwfs, spec: CorpusSpec, i: int, report: Report) -> None:
    rng = spec.rng(f"item-{i}")
    tag = f"#{i:03d}"
    C = I.cocyl

    X = random_groupoid(rng, spec.max_objects, spec.max_arrows)
    report.check(f"gpd.laws{tag}", "plumbing", check_groupoid, X)
    report.check(f"cocyl.sections{tag}", "def:cocylinder", check_cocylinder_laws, C, X)
    k = random_functor(rng, small_groupoid(rng), X)
    report.check(f"cocyl.naturality{tag}", "def:cocylinder", check_cocylinder_naturality, C, k)

    G = small_groupoid(rng)
    A = random_slice(rng, G)
    report.check(f"cocyl.relative{tag}", "def:relative-cocylinder", check_rel_pullback, I, A)

    Y = random_slice(rng, G)
    f = random_slice_map(rng, Y)
    report.check(f"awfs.factorization{tag}", "def:awfs", check_factorization, I, f)
    report.check(f"awfs.unit-counit{tag}", "def:awfs", check_unit_counit, I, f)
    report.check(f"awfs.free-L{tag}", "def:map-l-map-r", free_lmap, I, f)
    report.check(f"awfs.free-R{tag}", "def:map-l-map-r", free_rmap, I, f)
    report.check(f"awfs.coassociative{tag}", "def:awfs", check_coassociative, I, f)
    report.check(f"awfs.associative{tag}", "def:awfs", check_associative, I, f)
    report.check(f"awfs.K-identity{tag}", "def:awfs", check_k_identity, I, f)
    squares = report.check(f"awfs.squares{tag}", "plumbing", _square_pair, rng, f)
    if squares is not None:
        sq1, sq2 = squares
        report.check(f"awfs.natural{tag}", "def:awfs", check_natural, I, sq2)
        report.check(f"awfs.K-composite{tag}", "def:awfs", check_k_composite, I, sq1, sq2)

    sigma = random_base_change(rng, G)
    report.check(f"fibred.iso{tag}", "def:fibred-awfs", check_fibred_iso, I, sigma, f)
    if squares is not None:
        report.check(f"fibred.K-square{tag}", "def:fibred-awfs", check_fibred_k_square, I, sigma, squares[1])

    if not has_axioms(I):
        return
    fm = random_fibrant_map(rng, I)
    rf = I.find_rstructure(fm.f)
    if rf is None:
        # the sampled map is not an R-map; use its free R-structure instead
        rf = report.check(f"axioms.R-map{tag}", "def:map-l-map-r", free_rmap, I, fm.f)
    if rf is not None:
        lf = report.check(f"axioms.lface-build{tag}", "axioms-1", I.axiom_lface, rf, False)
        if lf is not None:
            report.check(f"axioms.lface{tag}", "axioms-1", check_axiom_structure, lf)
        lb = report.check(f"axioms.lbdy-build{tag}", "axioms-1", I.axiom_lbdy, rf, False)
        if lb is not None:
            report.check(f"axioms.lbdy{tag}", "axioms-1", check_axiom_structure, lb)


def validate_instance(I: FibredAwfs, spec: CorpusSpec | None = None, command: str = "validate") -> Report:
    """Check every instance law on ``spec.n_slices`` corpus items."""
    spec = spec or CorpusSpec()
    report = Report(command=command, instance=I.name, corpus=spec.as_dict())
    for i in range(spec.n_slices):
        validate_item(I, spec, i, report)
    return report
