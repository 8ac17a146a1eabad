"""Exact polyhedral geometry over the rationals for desk-scale instances.

Vertex-presented compact polytopes only.  Facets are found by brute force
over affinely spanning vertex subsets, the face lattice by intersecting
facet vertex sets; everything is rational arithmetic (points are tuples of
ints or Fractions).  The quiver-polytope code has faster combinatorial
routes; this module is the reference geometry and handles hand-built
polytopes in the tests.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd

from .exactlinalg import (LatticeBasis, integer_kernel, invariant_factors,
                          primitive, rational_rank, solve_exact, vec_gcd)


def vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def affine_dim(points) -> int:
    pts = list(points)
    if not pts:
        return -1
    return rational_rank([list(vsub(p, pts[0])) for p in pts[1:]])


def linear_rank(vectors) -> int:
    return rational_rank([list(v) for v in vectors])


def _affine_coordinates(points):
    """Map points into QQ^d coordinates of their affine hull (origin = first)."""
    pts = [tuple(Fraction(x) for x in p) for p in points]
    origin = pts[0]
    basis = []
    for p in pts[1:]:
        cand = basis + [list(vsub(p, origin))]
        if rational_rank(cand) == len(cand):
            basis.append(list(vsub(p, origin)))
    d = len(basis)
    bt = [[basis[j][i] for j in range(d)] for i in range(len(origin))]
    coords = []
    for p in pts:
        sol = solve_exact(bt, list(vsub(p, origin)))
        coords.append(tuple(sol[0]))
    return coords, origin, basis


def facet_supports(points):
    """Vertex-index sets of the facets of conv(points).

    Brute force over d-subsets; points must be the vertex set (no interior
    points required, duplicates not allowed).
    """
    n = len(points)
    d = affine_dim(points)
    if d <= 0:
        return []
    coords, _, _ = _affine_coordinates(points)
    if d == 1:
        lo = min(range(n), key=lambda i: coords[i])
        hi = max(range(n), key=lambda i: coords[i])
        return [frozenset([lo]), frozenset([hi])]
    found = {}
    for sub in combinations(range(n), d):
        base = coords[sub[0]]
        dirs = [list(vsub(coords[i], base)) for i in sub[1:]]
        if rational_rank(dirs) != d - 1:
            continue
        normal = _hyperplane_normal(dirs, d)
        if normal is None:
            continue
        c = dot(normal, base)
        sides = [dot(normal, coords[i]) - c for i in range(n)]
        if all(s <= 0 for s in sides) or all(s >= 0 for s in sides):
            support = frozenset(i for i, s in enumerate(sides) if s == 0)
            found[support] = True
    return list(found)


def _hyperplane_normal(dirs, d):
    # one rational vector orthogonal to d-1 independent directions in QQ^d
    dens = 1
    for row in dirs:
        for x in row:
            if isinstance(x, Fraction):
                dens = dens * x.denominator // gcd(dens, x.denominator)
    int_rows = [[int(x * dens) for x in row] for row in dirs]
    ker = integer_kernel(int_rows)
    if ker.rank != 1:
        return None
    return ker.vectors[0]


class FacePoset:
    """All faces of a compact polytope as vertex-index frozensets."""

    def __init__(self, points):
        self.points = [tuple(p) for p in points]
        self.dim = affine_dim(self.points)
        self.facets = facet_supports(self.points)
        self._faces_by_dim = self._close()

    def _close(self):
        everything = frozenset(range(len(self.points)))
        dims = {everything: self.dim}
        frontier = [everything]
        while frontier:
            nxt = []
            for face in frontier:
                for fac in self.facets:
                    g = face & fac
                    if not g or g == face or g in dims:
                        continue
                    dims[g] = affine_dim([self.points[i] for i in g])
                    nxt.append(g)
            frontier = nxt
        by_dim = {}
        for face, d in dims.items():
            by_dim.setdefault(d, []).append(face)
        for d in by_dim:
            by_dim[d].sort(key=sorted)
        return by_dim

    def faces(self, dim):
        return self._faces_by_dim.get(dim, [])

    def all_proper_faces(self):
        out = []
        for d in sorted(self._faces_by_dim):
            if d < self.dim:
                out.extend(self._faces_by_dim[d])
        return out


def polygon_cycle(points, ids=None):
    """Vertices of a 2-dimensional point set in convex boundary order."""
    ids = list(ids) if ids is not None else list(range(len(points)))
    coords, _, _ = _affine_coordinates(points)
    cx = sum(p[0] for p in coords) / len(coords)
    cy = sum(p[1] for p in coords) / len(coords)
    rel = [(p[0] - cx, p[1] - cy) for p in coords]

    def half(v):
        return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1

    import functools

    def cmp(i, j):
        a, b = rel[i], rel[j]
        if half(a) != half(b):
            return half(a) - half(b)
        cross = a[0] * b[1] - a[1] * b[0]
        return -1 if cross > 0 else (1 if cross < 0 else 0)

    order = sorted(range(len(points)), key=functools.cmp_to_key(cmp))
    return [ids[i] for i in order]


# ---------------------------------------------------------------------------
# lattice-sensitive quantities (integer coordinates required)

def _require_int(points):
    for p in points:
        for x in p:
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise ValueError("lattice computation needs integer points")
    return [tuple(int(x) for x in p) for p in points]


def saturation_basis(vectors, ambient):
    """Basis of (QQ-span of the vectors) intersected with ZZ^ambient."""
    if not vectors:
        return LatticeBasis(ambient, ())
    perp = integer_kernel([list(v) for v in vectors])
    return integer_kernel(perp.matrix()) if perp.rank else \
        LatticeBasis(ambient, tuple(tuple(r) for r in
                                    _identity_rows(ambient)))


def _identity_rows(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def lattice_coordinates(vectors, basis: LatticeBasis):
    """Integer coordinates of lattice vectors w.r.t. a saturated basis."""
    bt = [[basis.vectors[j][i] for j in range(basis.rank)]
          for i in range(basis.ambient_dim)]
    out = []
    for v in vectors:
        sol = solve_exact(bt, list(v))
        if sol is None:
            raise ValueError("vector outside the sublattice span")
        out.append(tuple(int(x) for x in sol[0]))
    return out


def in_own_lattice_coords(points):
    """Re-express lattice points inside the saturation of their linear span.

    The result is a full-rank realization in ZZ^(dim+1) preserving the
    induced lattice, suitable for building cochain complexes of faces.
    """
    pts = _require_int(points)
    amb = len(pts[0])
    sat = saturation_basis(pts, amb)
    return lattice_coordinates(pts, sat)


def normalized_area_2face(points) -> Fraction:
    """Lattice-normalized area of a planar lattice polygon.

    Unit triangle -> 1/2, unit square -> 1; measured in the saturated
    lattice of the polygon's plane, so the ambient embedding is irrelevant.
    """
    pts = _require_int(points)
    base = pts[0]
    diffs = [vsub(p, base) for p in pts[1:]]
    sat = saturation_basis(diffs, len(base))
    if sat.rank != 2:
        raise ValueError("not a 2-dimensional point set")
    planar = [(0, 0)] + lattice_coordinates(diffs, sat)
    order = polygon_cycle(planar)
    cyc = [planar[i] for i in order]
    twice = 0
    for i in range(len(cyc)):
        x1, y1 = cyc[i]
        x2, y2 = cyc[(i + 1) % len(cyc)]
        twice += x1 * y2 - x2 * y1
    return Fraction(abs(twice), 2)


def lattice_distance_from_origin(points) -> int:
    """gcd of the values of integral functionals constant on the point set.

    Equals 1 exactly when the affine span lies in a lattice hyperplane at
    distance one from the origin.
    """
    pts = _require_int(points)
    base = pts[0]
    diffs = [list(vsub(p, base)) for p in pts[1:]]
    ker = integer_kernel(diffs) if diffs else \
        LatticeBasis(len(base), tuple(tuple(r) for r in _identity_rows(len(base))))
    vals = [dot(u, base) for u in ker.vectors]
    return abs(vec_gcd(vals))


def is_unimodular_triangle(points) -> bool:
    return len(points) == 3 and normalized_area_2face(points) == Fraction(1, 2)


def is_unimodular_square(points):
    """For a 4-point planar set: unit square up to a lattice transformation."""
    if len(points) != 4:
        return False
    pts = _require_int(points)
    order = polygon_cycle(pts)
    cyc = [pts[i] for i in order]
    if vadd(cyc[0], cyc[2]) != vadd(cyc[1], cyc[3]):
        return False
    return normalized_area_2face(points) == 1


def polar_dual_vertices(points):
    """Vertices of {y : <y, conv(points)> >= -1}; requires 0 interior.

    Returns exact rational vertices (the facet normals scaled to offset -1).
    """
    pts = [tuple(Fraction(x) for x in p) for p in points]
    amb = len(pts[0])
    if affine_dim(pts) != amb:
        raise ValueError("polar dual needs a full-dimensional polytope")
    duals = []
    for support in facet_supports(pts):
        sup = [pts[i] for i in support]
        base = sup[0]
        dirs = [list(vsub(p, base)) for p in sup[1:]]
        normal = _hyperplane_normal(dirs, amb)
        c = dot(normal, base)
        if c == 0:
            raise ValueError("origin lies on a facet hyperplane")
        others = [dot(normal, p) - c for p in pts]
        # orient outward: inner side has <normal, x> < c
        if any(s > 0 for s in others):
            normal = tuple(-x for x in normal)
            c = -c
        if c < 0:
            raise ValueError("origin is not interior")
        duals.append(tuple(Fraction(-x, c) for x in normal))
    duals.sort()
    return duals


def origin_interior(points) -> bool:
    pts = [tuple(Fraction(x) for x in p) for p in points]
    amb = len(pts[0])
    if affine_dim(pts) != amb:
        return False
    try:
        polar_dual_vertices(pts)
        return True
    except ValueError:
        return False


def random_unimodular(dim, rng, steps=12):
    """Random GL(dim, ZZ) matrix as a product of elementary operations."""
    m = _identity_rows(dim)
    for _ in range(steps):
        i = rng.randrange(dim)
        j = rng.randrange(dim)
        if i == j:
            m[i] = [-x for x in m[i]]
            continue
        c = rng.choice([-2, -1, 1, 2])
        for k in range(dim):
            m[i][k] += c * m[j][k]
    return m


def apply_matrix(points, m):
    return [tuple(sum(m[i][k] * p[k] for k in range(len(p)))
                  for i in range(len(m))) for p in points]
