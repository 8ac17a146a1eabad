"""Shared fixtures and independent brute-force oracles.

The oracles here deliberately avoid the production code paths: stability by
closed-set enumeration over bitmasks, flow-polytope vertices by solving
every forest with Gaussian elimination, multipath counts by enumerating all
capped integer vectors.  Production must agree with them bit for bit.
"""

import itertools

import pytest

from quivar.exactlinalg import solve_exact
from quivar.fixtures import (double_path_quiver, fence_q1, fence_q2,
                             fence_q3, fence_q4, loop_quiver, path_quiver,
                             product_join_fence, three_arrow_quiver)
from quivar.quiver import (Quiver, gamma_dbl, gamma_opp, ladder_flag)


@pytest.fixture(scope="session")
def catalog():
    """Named quivers exercised across the suite."""
    return {
        "easy": three_arrow_quiver(),
        "oct": double_path_quiver(),
        "path3": path_quiver(3),
        "ladder12": ladder_flag(1, 2),
        "ladder25": ladder_flag(2, 5),
        "q1": fence_q1(),
        "q2": fence_q2(),
        "q3": fence_q3(),
        "q4": fence_q4(),
        "ones": product_join_fence(),
        "dbl2": gamma_dbl(2),
        "dbl3": gamma_dbl(3),
        "opp3": gamma_opp(3),
        "loops2": loop_quiver(2),
    }


def all_subquivers(q: Quiver):
    names = sorted(q.arrow_names())
    for r in range(len(names) + 1):
        for combo in itertools.combinations(names, r):
            yield q.sub(combo)


def brute_vertices(q: Quiver, theta):
    """Flow polytope vertices: solve every forest, keep feasible solutions,
    deduplicate.  Independent of the production leaf-stripping."""
    names = sorted(q.arrow_names())
    found = set()
    for sub in all_subquivers(q):
        if not sub.is_forest():
            continue
        arrows = sorted(sub.arrows)
        vi = {v: i for i, v in enumerate(q.vertices)}
        m = [[0] * len(arrows) for _ in q.vertices]
        for j, a in enumerate(arrows):
            ar = q.arrow(a)
            if ar.tail != ar.head:
                m[vi[ar.tail]][j] += 1
                m[vi[ar.head]][j] -= 1
        sol = solve_exact(m, [theta[v] for v in q.vertices])
        if sol is None or not sol[1]:
            continue
        vals, _ = sol
        if any(v < 0 for v in vals):
            continue
        flow = dict(zip(arrows, vals))
        found.add(tuple(flow.get(a, 0) for a in names))
    return sorted(found)


def brute_avoiding_multipaths(q: Quiver, knot, cap=2):
    """Vectors in [0, cap]^arrows with the knot divergence, zero on the
    knot's arrows.  Arrows pinned to zero by conservation at the source and
    sinks are dropped first so the product enumeration stays bounded."""
    demand = {v: 0 for v in q.vertices}
    for a in knot.tails:
        demand[a] += 1
    for c in knot.heads:
        demand[c] -= 1
    banned = set(knot.in_arrows) | set(knot.out_arrows)
    live = [a for a in q.arrows if a.name not in banned]
    # a vertex with no in-arrows and demand 0 sends nothing; dually for sinks
    changed = True
    while changed:
        changed = False
        for v in q.vertices:
            if demand[v] == 0:
                if not any(a.head == v for a in live) and \
                        any(a.tail == v for a in live):
                    live = [a for a in live if a.tail != v]
                    changed = True
                elif not any(a.tail == v for a in live) and \
                        any(a.head == v for a in live):
                    live = [a for a in live if a.head != v]
                    changed = True
    assert len(live) <= 12, "oracle capped at 12 free arrows"
    out = []
    for vec in itertools.product(range(cap + 1), repeat=len(live)):
        div = {v: 0 for v in q.vertices}
        for a, val in zip(live, vec):
            div[a.tail] += val
            div[a.head] -= val
        if div == demand:
            out.append({a.name: v for a, v in zip(live, vec) if v})
    return out
