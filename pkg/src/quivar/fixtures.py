"""Named example quivers used across the tests and shipped as CLI fixtures.

The fence quivers are encoded as rope systems: each rope is a directed path
from the source to a sink, and crossings of two ropes are shared inner
vertices.  Arrow lists are written out explicitly so the encodings stay
diff-stable; the tests pin their structural consequences (dimensions,
simple-knot sets, multipath counts) to guard the transcriptions.
"""

from __future__ import annotations

from .quiver import Arrow, Quiver


def _mk(vertices, arcs):
    return Quiver(tuple(vertices),
                  tuple(Arrow(f"e{i}", t, h) for i, (t, h) in enumerate(arcs, 1)))


def three_arrow_quiver() -> Quiver:
    """Two vertices, one arrow forward and two backward; has oriented cycles.

    The cycle space is two-dimensional and the quotient satisfies the single
    relation a - b + c = 0, so the dual polytope is a unimodular triangle.
    """
    return Quiver(("u", "v"), (Arrow("al", "v", "u"),
                               Arrow("be", "u", "v"),
                               Arrow("ga", "v", "u")))


def double_path_quiver() -> Quiver:
    """Four vertices in a row, two parallel arrows between neighbours.

    Its quiver polytope is the regular octahedron: the rigid cone over the
    Segre threefold, with a two-dimensional obstruction space at the top
    degree.
    """
    return _mk("wxyz", [("w", "x"), ("w", "x"), ("x", "y"), ("x", "y"),
                        ("y", "z"), ("y", "z")])


def fence_q1() -> Quiver:
    """Three ropes from p0 to p1, each pair crossing once.

    Knot a takes both of its in-arrows from the source, knot b sends both
    out-arrows to the sink, knot c sits between them; the polytope has
    dimension five.
    """
    arcs = [
        ("p0", "c"), ("c", "b"), ("b", "p1"),    # rope A
        ("p0", "a"), ("a", "b"), ("b", "p1"),    # rope B
        ("p0", "a"), ("a", "c"), ("c", "p1"),    # rope C
    ]
    return _mk(("p0", "p1", "a", "b", "c"), arcs)


def fence_q2() -> Quiver:
    """Three ropes where one pair crosses twice (knots u then v).

    Only the single crossing b is a simple knot; u and v disqualify each
    other.  Dimension five.
    """
    arcs = [
        ("p0", "b"), ("b", "p1"),                          # straight rope
        ("p0", "b"), ("b", "u"), ("u", "v"), ("v", "p1"),  # rope through all
        ("p0", "u"), ("u", "v"), ("v", "p1"),              # doubling-back rope
    ]
    return _mk(("p0", "p1", "b", "u", "v"), arcs)


def fence_q3() -> Quiver:
    """Six ropes with two over-passes (a non-planar fence).

    All five inner knots are simple, but the central knot b admits exactly
    one multipath between its neighbours and that multipath runs through b,
    so b carries no degree-zero deformation.
    """
    arcs = [
        ("p0", "c1"), ("c1", "p1"),                            # L1
        ("p0", "c3"), ("c3", "b"), ("b", "c2"), ("c2", "p1"),  # L2
        ("p0", "c4"), ("c4", "p1"),                            # L3
        ("p0", "c3"), ("c3", "p1"),                            # M1
        ("p0", "c4"), ("c4", "b"), ("b", "c1"), ("c1", "p1"),  # M2
        ("p0", "c2"), ("c2", "p1"),                            # M3
    ]
    return _mk(("p0", "p1", "b", "c1", "c2", "c3", "c4"), arcs)


def fence_q4() -> Quiver:
    """The three-rope fence with one extra short rope crossing only rope A.

    The extra crossing d is simple, and its insertion removes the avoiding
    multipaths of b: the cone stays smoothable in codimension three but the
    projective variety is not, by degree-zero deformations.
    """
    arcs = [
        ("p0", "c"), ("c", "b"), ("b", "d"), ("d", "p1"),  # rope A
        ("p0", "a"), ("a", "b"), ("b", "p1"),              # rope B
        ("p0", "a"), ("a", "c"), ("c", "p1"),              # rope C
        ("p0", "d"), ("d", "p1"),                          # rope D
    ]
    return _mk(("p0", "p1", "a", "b", "c", "d"), arcs)


def product_join_fence() -> Quiver:
    """Ladder fence extended by two double-arrow segments through a junction.

    The projective variety splits as a product (the junction x is a blocking
    knot), with two sinks; the Picard rank is 2 + 1 = 3.
    """
    arcs = [
        ("s", "i1"), ("s", "i1"), ("s", "i2"), ("s", "t1"), ("s", "t1"),
        ("i1", "i2"), ("i1", "t1"), ("i2", "t1"), ("i2", "t1"),
        ("s", "x"), ("s", "x"), ("x", "t2"), ("x", "t2"),
    ]
    return _mk(("s", "t1", "t2", "i1", "i2", "x"), arcs)


def path_quiver(n: int) -> Quiver:
    """Oriented path on n vertices."""
    vs = [f"v{i}" for i in range(1, n + 1)]
    return _mk(vs, [(vs[i], vs[i + 1]) for i in range(n - 1)])


def loop_quiver(n_loops: int) -> Quiver:
    """One vertex with the given number of loops."""
    return _mk(["v"], [("v", "v")] * n_loops)
