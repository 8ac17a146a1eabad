"""Deformation theory of flag quivers.

Simple knots are the valence-four inner crossings whose in-pair and
out-pair are not glued to another crossing of the same two ropes; each one
carves a square face out of the quiver polytope and hence a codimension
three A1 stratum of the cone.  Multipaths between the knot's neighbours
count the degree-zero deformations, and sampling positive combinations of
deformation-carrying degrees probes the (always vanishing) obstructions.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .cohomology import d2_vanishing_criterion, face_d_invariant, t_invariant
from .flows import feasible_flow
from .polytope import Degree, conifold_check, quiver_polytope, \
    restrict_to_hyperplane
from .quiver import (Quiver, QuiverStructureError, Subquiver, contract,
                     is_tight, require_tight_flag, tighten)


@dataclass(frozen=True)
class SimpleKnot:
    knot: str
    in_arrows: tuple
    out_arrows: tuple
    tails: tuple          # a1, a2
    heads: tuple          # c1, c2


def simple_knots(q: Quiver):
    """All simple knots of a tight flag quiver, in vertex order."""
    flag = require_tight_flag(q)
    inner = [v for v in q.vertices if v != flag.source and v not in flag.sinks]
    sinks = dict(zip(flag.sinks, flag.multiplicities))
    out = []
    for b in inner:
        ins = q.in_arrows(b)
        outs = q.out_arrows(b)
        if len(ins) != 2 or len(outs) != 2:
            continue
        a1, a2 = ins[0].tail, ins[1].tail
        c1, c2 = outs[0].head, outs[1].head
        if a1 == a2:
            if a1 == flag.source and flag.m == 2:
                continue
            if a1 in inner and len(q.in_arrows(a1)) == 2 and len(q.out_arrows(a1)) == 2:
                continue
        if c1 == c2:
            if c1 in sinks and sinks[c1] == 2:
                continue
            if c1 in inner and len(q.in_arrows(c1)) == 2 and len(q.out_arrows(c1)) == 2:
                continue
        out.append(SimpleKnot(b, tuple(a.name for a in ins),
                              tuple(a.name for a in outs),
                              (a1, a2), (c1, c2)))
    return out


# ---------------------------------------------------------------------------
# multipaths

def standard_multipath(knot: SimpleKnot):
    """The unique multipath using each of the knot's four arrows once."""
    return {a: 1 for a in knot.in_arrows + knot.out_arrows}


def multipaths(q: Quiver, knot: SimpleKnot, avoiding: bool):
    """The multipaths from the knot's tails to its heads that pair with
    deformation degrees: the ones avoiding the knot, and (unless
    ``avoiding``) the standard one through it.

    A multipath is a nonnegative integer flow whose divergence is
    tails-minus-heads; the ones avoiding the knot are in bijection with the
    degree-zero deformation degrees at that knot.
    """
    out = divergence_flows(q, knot, avoid_knot=True)
    if not avoiding:
        out = out + [standard_multipath(knot)]
    return out


def divergence_flows(q: Quiver, knot: SimpleKnot, avoid_knot: bool):
    """All nonnegative integer flows with divergence tails-minus-heads.

    Depth-first over the vertices in topological order; per-arrow flow is
    bounded by the total supply of two, so the search is finite.  With
    ``avoid_knot`` the four arrows through the knot are forced to zero.
    """
    if q.has_oriented_cycles():
        raise QuiverStructureError("multipaths need an acyclic quiver")
    demand = {v: 0 for v in q.vertices}
    for a in knot.tails:
        demand[a] += 1
    for c in knot.heads:
        demand[c] -= 1
    banned = set(knot.in_arrows) | set(knot.out_arrows) if avoid_knot else set()
    order = q.topological_order()
    out_by_vertex = [[a for a in q.out_arrows(v) if a.name not in banned]
                     for v in order]
    results = []
    flow = {}

    def compositions(total, k):
        if k == 0:
            if total == 0:
                yield ()
            return
        for first in range(min(total, 2) + 1):
            for rest in compositions(total - first, k - 1):
                yield (first,) + rest

    def step(i, inflow):
        if i == len(order):
            results.append(dict(flow))
            return
        v = order[i]
        need = inflow.get(v, 0) + demand[v]
        outs = out_by_vertex[i]
        if need < 0 or need > 2 * len(outs):
            return
        for combo in compositions(need, len(outs)):
            nxt = dict(inflow)
            for a, val in zip(outs, combo):
                if val:
                    flow[a.name] = val
                    nxt[a.head] = nxt.get(a.head, 0) + val
            step(i + 1, nxt)
            for a, val in zip(outs, combo):
                if val:
                    del flow[a.name]

    step(0, {})
    return results


def knot_degree_from_multipath(q: Quiver, knot: SimpleKnot, mp) -> Degree:
    """Height-zero deformation degree from an avoiding multipath."""
    coords = {a: 0 for a in q.arrow_names()}
    for a in knot.in_arrows + knot.out_arrows:
        coords[a] += 1
    for a, v in mp.items():
        coords[a] -= v
    return Degree.from_coords(q, coords)


def t1_degree_for_knot(q: Quiver, knot: SimpleKnot):
    """A deformation-carrying degree for the knot, at the least height.

    Prefers height zero (an avoiding multipath); otherwise searches
    downward heights for an integral flow realizing the degree.
    """
    avoid = multipaths(q, knot, avoiding=True)
    if avoid:
        return knot_degree_from_multipath(q, knot, avoid[0])
    theta = q.canonical_weight()
    demand = {v: 0 for v in q.vertices}
    for a in knot.tails:
        demand[a] += 1
    for c in knot.heads:
        demand[c] -= 1
    banned = set(knot.in_arrows) | set(knot.out_arrows)
    arrows = [a for a in q.arrows if a.name not in banned]
    arcs = [(a.tail, a.head) for a in arrows]
    g = 0
    while True:
        g -= 1
        div = {v: demand[v] - g * theta[v] for v in q.vertices}
        sol = feasible_flow(q.vertices, arcs, div)
        if sol is None:
            if g < -4 * q.n_arrows:
                raise AssertionError("no deformation degree found; not a flag quiver?")
            continue
        coords = {a: 0 for a in q.arrow_names()}
        for a in knot.in_arrows + knot.out_arrows:
            coords[a] += 1
        for arr, v in zip(arrows, sol):
            coords[arr.name] -= v
        return Degree.from_coords(q, coords)


def is_t1_degree(q: Quiver, degree: Degree):
    """The simple knot whose square the degree cuts out, or None.

    The degree must be one on the four arrows of the knot and at most zero
    on every other arrow.
    """
    require_tight_flag(q)
    names = sorted(q.arrow_names())
    vals = dict(zip(names, degree.coords))
    ones = {a for a in names if vals[a] == 1}
    if len(ones) != 4 or any(v > 0 for a, v in vals.items() if a not in ones):
        return None
    for knot in simple_knots(q):
        if set(knot.in_arrows) | set(knot.out_arrows) == ones:
            return knot
    return None


def t1_height0(q: Quiver):
    """Per-knot dimensions of the degree-zero deformations, plus the total."""
    knots = simple_knots(q)
    per = {k.knot: len(multipaths(q, k, avoiding=True)) for k in knots}
    return per, sum(per.values())


# ---------------------------------------------------------------------------
# obstruction probe

@dataclass
class ProbeReport:
    base_degrees: int
    samples: int = 0
    within_bound: int = 0
    t2_zero: int = 0
    certified: int = 0
    skipped: int = 0
    failures: list = field(default_factory=list)

    @property
    def all_zero(self):
        return self.t2_zero == self.within_bound and not self.failures


def obstruction_probe(q: Quiver, samples: int = 50, seed: int = 0) -> ProbeReport:
    """Sample positive integer combinations of deformation-carrying degrees
    and check that the degree-two piece vanishes on each.

    A sample is a nonempty subfamily of the base degrees (one deformation
    degree per simple knot at its least height, plus all height-zero ones)
    with positive integer coefficients: small subfamilies with coefficients
    one and two exhaustively, then random draws.  Combinations with some
    coordinate above one are outside the polytope bound and count as
    skipped (the graded piece is zero by the bound).
    """
    require_tight_flag(q)
    ok, witness = conifold_check(quiver_polytope(q), q)
    if not ok:
        raise AssertionError(f"conifold condition fails on {witness}")
    knots = simple_knots(q)
    base = []
    for k in knots:
        degs = [knot_degree_from_multipath(q, k, m)
                for m in multipaths(q, k, avoiding=True)]
        base.extend(degs if degs else [t1_degree_for_knot(q, k)])
    report = ProbeReport(base_degrees=len(base))
    if not base:
        return report
    rng = random.Random(seed)

    def combos():
        import itertools
        for size in range(1, len(base) + 1):
            for subset in itertools.combinations(range(len(base)), size):
                for lam in itertools.product((1, 2), repeat=size):
                    yield subset, lam
        while True:
            size = rng.randrange(1, len(base) + 1)
            subset = tuple(sorted(rng.sample(range(len(base)), size)))
            yield subset, tuple(rng.randrange(1, 4) for _ in subset)

    for subset, lam in combos():
        if report.samples >= samples:
            break
        report.samples += 1
        total = base[subset[0]].scale(lam[0])
        for i, l in zip(subset[1:], lam[1:]):
            total = total + base[i].scale(l)
        if max(total.coords) > 1:
            report.skipped += 1
            continue
        report.within_bound += 1
        t2 = t_invariant(q, total, 2)
        if t2 == 0:
            report.t2_zero += 1
        else:
            report.failures.append(((subset, lam), t2))
        face = restrict_to_hyperplane(q, total)
        if face is not None and face.dim >= 0:
            if d2_vanishing_criterion(q, face).vanishes:
                report.certified += 1
        else:
            report.certified += 1
    return report


# ---------------------------------------------------------------------------
# smoothability

@dataclass
class KnotEvidence:
    knot: str
    avoiding: int
    total: int
    witness: dict


@dataclass
class SmoothabilityReport:
    tightened: bool
    codim3: bool
    degree0: bool
    knots: list
    a1_strata: list
    blocking_reason: str = ""


def smoothability_verdict(q: Quiver) -> SmoothabilityReport:
    """Codimension-three smoothability of the cone and of the projective
    variety itself (degree-zero deformations only).

    The cone is always smoothable in codimension three for a flag quiver;
    the projective variety is iff every simple knot can be bypassed by a
    multipath through its neighbours.
    """
    from .quiver import flag_violation
    reason = flag_violation(q)
    if reason:
        raise QuiverStructureError(f"not a flag quiver: {reason}")
    tightened = False
    theta = q.canonical_weight()
    if not is_tight(q, theta):
        q, _ = tighten(q, theta)
        tightened = True
    knots = simple_knots(q)
    evidence = []
    blocked = []
    for k in knots:
        avoid = multipaths(q, k, avoiding=True)
        total = multipaths(q, k, avoiding=False)
        evidence.append(KnotEvidence(k.knot, len(avoid), len(total),
                                     avoid[0] if avoid else {}))
        if not avoid:
            blocked.append(k.knot)
    reason = "" if not blocked else (
        "knot " + ", ".join(blocked) + " has no avoiding multipath")
    return SmoothabilityReport(
        tightened=tightened,
        codim3=True,
        degree0=not blocked,
        knots=evidence,
        a1_strata=[k.knot for k in knots],
        blocking_reason=reason,
    )
