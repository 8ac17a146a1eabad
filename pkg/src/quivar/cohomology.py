"""The face cochain complex of a compact polytope and its cohomology.

For a polytope realized at height one (no vertex is the origin, the origin
is outside the affine hull), the complex has N in degree 0 and one block
per vertex / edge / 2-face in degrees 1..3, each block being N modulo the
linear span of the face.  The first two cohomology dimensions are the
deformation invariants: degree one counts Minkowski summands (minus one
for scaling), degree two carries the obstructions.

Sign conventions: edges are oriented by ascending vertex index, a 2-face is
walked from its least vertex toward its smaller-indexed neighbour; any
other consistent choice gives the same cohomology, which the tests check
with randomized orientations.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

from . import geometry
from .exactlinalg import rational_rank, solve_exact, sparse_rank
from .polytope import Degree, Face, LatticePolytope, low_dim_faces, \
    quiver_polytope, restrict_to_hyperplane
from .quiver import Quiver, QuiverStructureError, contract, is_opp_cycle, is_tight


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("QUIVAR_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# face data: vertices, oriented edges, 2-face boundary cycles

@dataclass(frozen=True)
class FaceData:
    """Combinatorics of a height-one realization of a compact polytope."""

    points: tuple          # vertex coordinates, own-span lattice coords
    edges: tuple           # (tail index, head index)
    polygons: tuple        # boundary cycles as vertex index tuples
    dim: int


def _ordered_cycle(points, idxs):
    pts = [points[i] for i in idxs]
    order = geometry.polygon_cycle(pts, ids=list(idxs))
    return tuple(order)


def facedata_from_polytope(poly: LatticePolytope) -> FaceData:
    """Face data of a hand-built compact polytope via exact geometry."""
    pts = [tuple(p) for p in poly.vertices]
    poset = poly.poset()
    edges = tuple(tuple(sorted(f)) for f in poset.faces(1))
    polys = tuple(_ordered_cycle(pts, sorted(f)) for f in poset.faces(2))
    return FaceData(tuple(pts), edges, polys, poset.dim)


def facedata_from_quiver_face(q: Quiver, face: Face, theta=None) -> FaceData:
    """Face data for a face of the quiver polytope, lifted to height one
    and re-expressed in the saturated lattice of its own span.

    Points are translation-normalized first (an affine lattice isomorphism,
    invisible to the invariants) so parallel faces share cached results.
    """
    low = [f for f in low_dim_faces(q, theta, 2) if f.subquiver >= face.subquiver]
    zero = [f for f in low if f.dim == 0]
    vert_pts = sorted({f.vertices[0] for f in zero})
    if not vert_pts:
        return FaceData((), (), (), -1)
    base = vert_pts[0]
    lifted = [geometry.vsub(p, base) + (1,) for p in vert_pts]
    own = geometry.in_own_lattice_coords(lifted)
    index = {p: i for i, p in enumerate(vert_pts)}
    edges = []
    polys = []
    for f in low:
        corners = _extreme_points(zero, f)
        if f.dim == 1:
            edges.append(tuple(sorted(index[p] for p in corners)))
        elif f.dim == 2:
            polys.append(_ordered_cycle(own, sorted(index[p] for p in corners)))
    return FaceData(tuple(own), tuple(sorted(set(edges))),
                    tuple(sorted(set(polys))), face.dim)


def _extreme_points(zero_faces, face: Face):
    pts = set(face.vertices)
    return sorted({g.vertices[0] for g in zero_faces
                   if g.subquiver >= face.subquiver and g.vertices[0] in pts})


def reorient(data: FaceData, rng) -> FaceData:
    """Randomly flip edge orientations and polygon walks (tests only)."""
    edges = tuple(e if rng.randrange(2) else (e[1], e[0]) for e in data.edges)
    polys = []
    for cyc in data.polygons:
        cyc = list(cyc)
        k = rng.randrange(len(cyc))
        cyc = cyc[k:] + cyc[:k]
        if rng.randrange(2):
            cyc.reverse()
        polys.append(tuple(cyc))
    return FaceData(data.points, edges, tuple(polys), data.dim)


# ---------------------------------------------------------------------------
# the complex

@dataclass
class CochainComplex:
    dims: tuple           # (dim C0, C1, C2, C3)
    d0: list
    d1: list
    d2: list


def _rref_quotient(span_vectors, n):
    """Projection QQ^n -> QQ^(n-k) with kernel the span; returns
    (rows of the projection, free column indices)."""
    rows = [[Fraction(x) for x in v] for v in span_vectors]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if r != len(rows):
        raise ValueError("span vectors are dependent")
    free = [c for c in range(n) if c not in pivots]
    proj = []
    for f in free:
        row = [Fraction(0)] * n
        row[f] = Fraction(1)
        for i, p in enumerate(pivots):
            row[p] = -rows[i][f]
        proj.append(row)
    return proj, free


def build_complex(data: FaceData) -> CochainComplex:
    """Assemble the differentials; requires a nonempty height-one input."""
    pts = data.points
    if not pts:
        raise ValueError("empty polytope has no complex")
    n = len(pts[0])
    vblocks = [_rref_quotient([pts[i]], n) for i in range(len(pts))]
    eblocks = [_rref_quotient([pts[a], pts[b]], n) for a, b in data.edges]
    pblocks = []
    for cyc in data.polygons:
        base = [pts[cyc[0]], pts[cyc[1]], pts[cyc[2]]]
        pblocks.append(_rref_quotient(base, n))
    dims = (n,
            sum(len(b[0]) for b in vblocks),
            sum(len(b[0]) for b in eblocks),
            sum(len(b[0]) for b in pblocks))
    # d0: stack the vertex projections
    d0 = []
    for proj, _ in vblocks:
        d0.extend([row[:] for row in proj])
    # d1: edge block gets -proj_e|incl_tail and +proj_e|incl_head
    voff = _offsets(vblocks)
    d1 = []
    for (a, b), (proj, _) in zip(data.edges, eblocks):
        rows = [[Fraction(0)] * dims[1] for _ in proj]
        for vtx, sign in ((a, -1), (b, 1)):
            vproj, vfree = vblocks[vtx]
            off = voff[vtx]
            for i, prow in enumerate(proj):
                for j, col in enumerate(vfree):
                    rows[i][off + j] += sign * prow[col]
        d1.extend(rows)
    # d2: polygon blocks against walked boundary edges
    eoff = _offsets(eblocks)
    eindex = {}
    for k, e in enumerate(data.edges):
        eindex[e] = (k, 1)
        eindex[(e[1], e[0])] = (k, -1)
    d2 = []
    for cyc, (proj, _) in zip(data.polygons, pblocks):
        rows = [[Fraction(0)] * dims[2] for _ in proj]
        m = len(cyc)
        for t in range(m):
            step = (cyc[t], cyc[(t + 1) % m])
            k, sign = eindex[step]
            eproj, efree = eblocks[k]
            off = eoff[k]
            for i, prow in enumerate(proj):
                for j, col in enumerate(efree):
                    rows[i][off + j] += sign * prow[col]
        d2.extend(rows)
    return CochainComplex(dims, d0, d1, d2)


def _offsets(blocks):
    offs = []
    total = 0
    for proj, _ in blocks:
        offs.append(total)
        total += len(proj)
    return offs


def cohomology_dims(cx: CochainComplex):
    """(h0, h1, h2, h3) with h3 only up to the truncation at 2-faces."""
    r0 = rational_rank(cx.d0) if cx.d0 else 0
    r1 = rational_rank(cx.d1) if cx.d1 else 0
    r2 = rational_rank(cx.d2) if cx.d2 else 0
    c0, c1, c2, c3 = cx.dims
    return (c0 - r0, c1 - r0 - r1, c2 - r1 - r2, c3 - r2)


def _int_row(frac_row):
    den = 1
    for v in frac_row.values():
        den = den * v.denominator // gcd(den, v.denominator)
    return {c: int(v * den) for c, v in frac_row.items() if v}


def _sparse_differentials(data: FaceData, need_d2: bool):
    """The differentials as sparse integer rows (rank is all we need)."""
    pts = data.points
    n = len(pts[0])
    vblocks = [_rref_quotient([pts[i]], n) for i in range(len(pts))]
    eblocks = [_rref_quotient([pts[a], pts[b]], n) for a, b in data.edges]
    voff = _offsets(vblocks)
    d0 = []
    for proj, _ in vblocks:
        for prow in proj:
            d0.append(_int_row({j: x for j, x in enumerate(prow) if x}))
    d1 = []
    for (a, b), (proj, _) in zip(data.edges, eblocks):
        for prow in proj:
            row = {}
            for vtx, sign in ((a, -1), (b, 1)):
                vproj, vfree = vblocks[vtx]
                off = voff[vtx]
                for j, col in enumerate(vfree):
                    if prow[col]:
                        row[off + j] = row.get(off + j, Fraction(0)) + sign * prow[col]
            d1.append(_int_row(row))
    d2 = []
    dims3 = 0
    if need_d2:
        eoff = _offsets(eblocks)
        eindex = {}
        for k, e in enumerate(data.edges):
            eindex[e] = (k, 1)
            eindex[(e[1], e[0])] = (k, -1)
        for cyc in data.polygons:
            base = [pts[cyc[0]], pts[cyc[1]], pts[cyc[2]]]
            proj, _ = _rref_quotient(base, n)
            dims3 += len(proj)
            for prow in proj:
                row = {}
                m = len(cyc)
                for t in range(m):
                    k, sign = eindex[(cyc[t], cyc[(t + 1) % m])]
                    eproj, efree = eblocks[k]
                    off = eoff[k]
                    for j, col in enumerate(efree):
                        if prow[col]:
                            row[off + j] = row.get(off + j, Fraction(0)) + sign * prow[col]
                d2.append(_int_row(row))
    dims = (n, sum(len(b[0]) for b in vblocks), sum(len(b[0]) for b in eblocks),
            dims3)
    return dims, d0, d1, d2


@lru_cache(maxsize=None)
def d_invariant_data(data: FaceData, k: int) -> int:
    if k not in (1, 2):
        raise ValueError("only degrees 1 and 2 are computed")
    if not data.points:
        return 0
    dims, d0, d1, d2 = _sparse_differentials(data, need_d2=(k == 2))
    r0 = sparse_rank(d0)
    r1 = sparse_rank(d1)
    if k == 1:
        return dims[1] - r0 - r1
    r2 = sparse_rank(d2)
    return dims[2] - r1 - r2


def d_invariant(poly: LatticePolytope, k: int) -> int:
    """D^k of a compact polytope given at height one in its ambient space."""
    if not poly.is_compact():
        raise QuiverStructureError("the complex needs a compact polytope")
    if not poly.vertices:
        return 0
    return d_invariant_data(facedata_from_polytope(poly), k)


@lru_cache(maxsize=None)
def _face_d_cached(q: Quiver, subquiver, theta_key, k):
    theta = dict(theta_key) if theta_key else None
    poly = quiver_polytope(q, theta)
    face = poly.face_index.get(subquiver)
    if face is None and not subquiver:
        face = Face(frozenset(), poly.dim, tuple(poly.vertices))
    return d_invariant_data(facedata_from_quiver_face(q, face, theta), k)


def face_d_invariant(q: Quiver, face: Face, k: int, theta=None) -> int:
    if face.dim <= 0:
        return 0
    key = tuple(sorted(theta.items())) if theta else None
    return _face_d_cached(q, face.subquiver, key, k)


# ---------------------------------------------------------------------------
# Minkowski summands via edge dilatations

@lru_cache(maxsize=None)
def minkowski_dimension_data(data: FaceData) -> int:
    """Dimension of the space of edge dilatation factors closing every
    2-face; one more than the number of independent Minkowski summands."""
    if data.dim < 1:
        raise ValueError("needs a polytope of dimension at least one")
    if not data.edges:
        return 0
    n = len(data.points[0])
    eindex = {}
    for k, e in enumerate(data.edges):
        eindex[e] = (k, 1)
        eindex[(e[1], e[0])] = (k, -1)
    rows = []
    for cyc in data.polygons:
        m = len(cyc)
        for coord in range(n):
            row = {}
            for t in range(m):
                a, b = cyc[t], cyc[(t + 1) % m]
                k, _ = eindex[(a, b)]
                # the walk vector b - a is already direction-correct
                row[k] = row.get(k, 0) + data.points[b][coord] - data.points[a][coord]
            rows.append(row)
    rank = sparse_rank(rows) if rows else 0
    return len(data.edges) - rank


def minkowski_dimension(poly: LatticePolytope) -> int:
    return minkowski_dimension_data(facedata_from_polytope(poly))


# ---------------------------------------------------------------------------
# graded deformation pieces

def t_invariant(q: Quiver, degree: Degree, k: int) -> int:
    """Dimension of the degree-wise deformation piece of the cone singularity.

    Zero whenever the degree exceeds one on the polytope, else the D^k of
    the cut face.
    """
    if q.has_oriented_cycles():
        raise QuiverStructureError("graded pieces require an acyclic quiver")
    if len(q.full().components()) != 1:
        raise QuiverStructureError("graded pieces require a connected quiver")
    face = restrict_to_hyperplane(q, degree)
    if face is None or face.dim <= 0:
        return 0
    return face_d_invariant(q, face, k)


# ---------------------------------------------------------------------------
# vanishing criterion for the obstruction space

@dataclass(frozen=True)
class D2Verdict:
    vanishes: bool
    method: str            # "cleaning" | "pyramid-failure" | "cleaning-stuck"

    @property
    def label(self):
        return "vanishes-by-criterion" if self.vanishes else "criterion-inconclusive"


def _criterion_faces(q, face, theta=None):
    # strict subfaces only: the face itself is not one of its own 2-faces
    low = [f for f in low_dim_faces(q, theta, 3) if f.subquiver >= face.subquiver]
    zero = [f for f in low if f.dim == 0]
    verts = sorted({f.vertices[0] for f in zero})
    two, three = [], []
    for f in low:
        if f.subquiver == face.subquiver:
            continue
        if f.dim == 2:
            two.append(frozenset(_extreme_points(zero, f)))
        elif f.dim == 3:
            three.append(frozenset(_extreme_points(zero, f)))
    return verts, set(two), set(three), face.dim


def _criterion_faces_polytope(poly: LatticePolytope):
    pts = [tuple(p) for p in poly.vertices]
    poset = poly.poset()
    full = frozenset(range(len(pts)))
    two = {frozenset(pts[i] for i in f) for f in poset.faces(2) if f != full}
    three = {frozenset(pts[i] for i in f) for f in poset.faces(3) if f != full}
    return pts, two, three, poset.dim


def d2_vanishing_criterion(target, face: Face = None, theta=None) -> D2Verdict:
    """Certify vanishing of the degree-two invariant, or stay inconclusive.

    Every 3-face must be a pyramid; then the iterative cleaning of vertices
    and 2-faces must succeed (a polygon with m vertices is clean once m-3 of
    its vertices are, a vertex once it lies in at most dim-3 unclean
    2-faces).  Never claims nonvanishing.
    """
    if isinstance(target, LatticePolytope):
        verts, two, three, n = _criterion_faces_polytope(target)
    else:
        verts, two, three, n = _criterion_faces(target, face, theta)
    # (a) pyramids
    for f3 in three:
        if not any(f2 < f3 and len(f3 - f2) == 1 for f2 in two):
            return D2Verdict(False, "pyramid-failure")
    # (b) cleaning
    clean_face = {f for f in two if len(f) == 3}
    clean_vert = set()
    changed = True
    while changed:
        changed = False
        for v in verts:
            if v in clean_vert:
                continue
            unclean = sum(1 for f in two if v in f and f not in clean_face)
            if unclean <= n - 3:
                clean_vert.add(v)
                changed = True
        for f in two:
            if f in clean_face:
                continue
            if sum(1 for v in f if v in clean_vert) >= len(f) - 3:
                clean_face.add(f)
                changed = True
    if clean_face == two:
        return D2Verdict(True, "cleaning")
    return D2Verdict(False, "cleaning-stuck")


# ---------------------------------------------------------------------------
# all faces with a nontrivial degree-one invariant

def nontrivial_d1_faces(q: Quiver, theta=None):
    """Proper faces of the quiver polytope with nonzero degree-one invariant.

    Requires an acyclic, canonically tight quiver; each returned face is
    checked to contract to a reversed double cycle of matching length.
    """
    theta = q.canonical_weight() if theta is None else theta
    if q.has_oriented_cycles():
        raise QuiverStructureError("needs an acyclic quiver")
    if not is_tight(q, theta):
        raise QuiverStructureError("quiver is not tight; tighten first")
    poly = quiver_polytope(q, theta)
    full = frozenset(q.arrow_names())
    cands = [(p, f) for p, f in poly.face_index.items()
             if p != full and f.dim >= 2 and f.dim < poly.dim]
    results = []

    def job(item):
        p, f = item
        return p, f, face_d_invariant(q, f, 1, theta)

    n_workers = worker_count()
    if n_workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=n_workers) as ex:
            rows = list(ex.map(job, cands))
    else:
        rows = [job(c) for c in cands]
    for p, f, d1 in sorted(rows, key=lambda r: sorted(r[0])):
        if d1 == 0:
            continue
        gamma, _ = contract(q, q.sub(p))
        if not is_opp_cycle(gamma, f.dim):
            raise AssertionError(
                "face with nontrivial degree-one invariant does not contract "
                "to a reversed double cycle")
        results.append(f)
    return results
