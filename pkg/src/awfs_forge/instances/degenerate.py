"""The degenerate model: factor every map as ``id`` then itself.

L-maps are exactly the isomorphisms, every map is an R-map with ``p = id``,
and the cocylinder is the identity functor.  It satisfies the awfs and
fibredness laws on the nose and serves as a smoke test for every generic
construction.
"""

from __future__ import annotations

from ..awfs import Factorization, FibredAwfs, RMapStruct
from ..cocyl import TRIVIAL, lbdy, lface0
from ..gpd import CanonIso, GroupoidMap, SliceMap, SliceSquare, forget, identity, reindex_map, slice_identity


class DegenerateAwfs(FibredAwfs):
    name = "degenerate"
    cocyl = TRIVIAL

    def _factor(self, f: SliceMap) -> Factorization:
        return Factorization(f=f, L=slice_identity(f.src), K=f.src, R=f)

    def _k_square(self, sq: SliceSquare, Kp, K) -> GroupoidMap:
        return sq.top.map

    def comult(self, f: SliceMap) -> GroupoidMap:
        return identity(f.src.total)

    def mult(self, f: SliceMap) -> GroupoidMap:
        return identity(f.src.total)

    def reindex_iso(self, sigma: GroupoidMap, f: SliceMap) -> CanonIso:
        X = reindex_map(sigma, f).src.total
        return CanonIso(identity(X), identity(X))

    def axiom_lface(self, rf: RMapStruct, verify: bool = True) -> RMapStruct:
        g = forget(lface0(self.cocyl, rf.f).map)
        return RMapStruct(self, g, identity(g.src.total))

    def axiom_lbdy(self, rf: RMapStruct, verify: bool = True) -> RMapStruct:
        g = lbdy(self.cocyl, rf.f).map
        return RMapStruct(self, g, identity(g.src.total))


    def find_rstructure(self, f: SliceMap) -> RMapStruct:
        return identity_structure(self, f)


def degenerate_instance() -> DegenerateAwfs:
    return DegenerateAwfs()


def identity_structure(I: DegenerateAwfs, f: SliceMap) -> RMapStruct:
    """Every map is a degenerate R-map via ``p = id``."""
    return RMapStruct(I, f, identity(f.src.total))
