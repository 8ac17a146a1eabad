"""Weil divisor class groups and Picard groups of the projective varieties.

For a tight quiver the class group is the full weight lattice; the Picard
group is the subgroup of weights whose restriction to every component of
every polystable tree sums to zero.  For flag quivers this collapses to the
free group on the source, the sinks and the blocking knots.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactlinalg import (hermite_normal_form, integer_kernel,
                          invariant_factors)
from .polytope import polystable_subquivers
from .quiver import (Quiver, QuiverStructureError, is_tight,
                     require_tight_flag, _flow_feasible)


@dataclass(frozen=True)
class AbelianGroupPresentation:
    generators: tuple            # labels
    relations: tuple             # relation rows in generator coordinates
    rank: int
    torsion: tuple               # invariant factors > 1 (always empty here)
    basis: tuple = ()            # for subgroups of ZZ^generators

    def basis_hnf(self):
        if not self.basis:
            return ()
        h = hermite_normal_form([list(b) for b in self.basis])
        return tuple(tuple(r) for r in h if any(r))


def _presentation_from_relations(generators, relations):
    rank = len(generators)
    torsion = ()
    if relations:
        invs = invariant_factors([list(r) for r in relations])
        rank -= len(invs)
        torsion = tuple(d for d in invs if d != 1)
    return rank, torsion


def weil_class_group(q: Quiver, theta) -> AbelianGroupPresentation:
    """Weight lattice presentation of the divisor class group (tight input).

    Presented two ways at once: as the kernel of the total-degree map on the
    vertex lattice, and as the arrow lattice modulo the cycle sublattice
    (recorded through the relations of the first presentation).
    """
    if not is_tight(q, theta):
        raise QuiverStructureError(
            "class group needs a tight quiver (arrows must match facets)")
    gens = tuple(q.vertices)
    relations = (tuple(1 for _ in gens),)
    rank, torsion = _presentation_from_relations(gens, relations)
    basis = tuple(_weight_basis(len(gens)))
    return AbelianGroupPresentation(gens, relations, rank, torsion, basis)


def _weight_basis(n):
    return [tuple(1 if j == i else (-1 if j == i + 1 else 0) for j in range(n))
            for i in range(n - 1)]


def arrow_presentation(q: Quiver) -> AbelianGroupPresentation:
    """The arrow lattice modulo cycles; free of rank #vertices - 1."""
    cycles = integer_kernel(q.incidence())
    gens = tuple(sorted(q.arrow_names()))
    rels = tuple(tuple(v) for v in cycles.vectors)
    rank, torsion = _presentation_from_relations(gens, rels)
    return AbelianGroupPresentation(gens, rels, rank, torsion)


def polystable_trees(q: Quiver, theta, force=False):
    """Polystable subquivers that are spanning forests (the polytope's
    vertices)."""
    out = []
    for p in polystable_subquivers(q, theta, force):
        sub = q.sub(p)
        if sub.is_forest():
            out.append(sub)
    return out


def picard_group(q: Quiver, theta, force=False) -> AbelianGroupPresentation:
    """Weights vanishing on every component of every polystable tree."""
    if not is_tight(q, theta):
        raise QuiverStructureError("Picard group needs a tight quiver")
    rows = [[1] * q.n_vertices]
    vi = {v: i for i, v in enumerate(q.vertices)}
    for tree in polystable_trees(q, theta, force):
        for comp in tree.components():
            row = [0] * q.n_vertices
            for v in comp:
                row[vi[v]] = 1
            rows.append(row)
    ker = integer_kernel(rows)
    return AbelianGroupPresentation(tuple(q.vertices), (tuple([1] * q.n_vertices),),
                                    ker.rank, (), tuple(ker.vectors))


def blocking_knots(q: Quiver):
    """Inner knots no source-to-all-sinks path system can avoid."""
    flag = require_tight_flag(q)
    theta = q.canonical_weight()
    out = []
    for v in q.vertices:
        if v == flag.source or v in flag.sinks:
            continue
        if _flow_feasible(q.delete_vertex_arrows(v), theta) is None:
            out.append(v)
    return out


def flag_picard(q: Quiver) -> AbelianGroupPresentation:
    """Free group on the source, sinks and blocking knots, inside the
    weight lattice; agrees with the general kernel formula."""
    flag = require_tight_flag(q)
    support = [flag.source, *flag.sinks, *blocking_knots(q)]
    vi = {v: i for i, v in enumerate(q.vertices)}
    basis = []
    anchor = support[0]
    for v in support[1:]:
        row = [0] * q.n_vertices
        row[vi[anchor]] = 1
        row[vi[v]] = -1
        basis.append(tuple(row))
    return AbelianGroupPresentation(tuple(q.vertices),
                                    (tuple([1] * q.n_vertices),),
                                    len(basis), (), tuple(basis))


def subgroups_equal(a: AbelianGroupPresentation, b: AbelianGroupPresentation):
    """Same subgroup of the common ambient lattice (via Hermite forms)."""
    return a.basis_hnf() == b.basis_hnf()
