"""Flow polytopes, quiver polytopes and their face lattices.

Faces are keyed by polystable subquivers: the poset of polystable arrow
subsets is isomorphic to the face lattice of the flow polytope and
anti-isomorphic to the face lattice of the dual quiver polytope (faces not
meeting the origin).  Enumeration is a pruned search over arrow subsets:
semistability is inherited under enlargement, so once a subset fails the
flow-feasibility test the whole down-set below it is discarded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from . import geometry
from .exactlinalg import (LatticeBasis, integer_kernel, quotient_coordinates,
                          solve_exact, vec_gcd)
from .quiver import (Quiver, QuiverStructureError, Subquiver, check_weight,
                     contract, is_polystable, simple_oriented_cycles,
                     weight_tuple, _flow_feasible)

ENUMERATION_ARROW_LIMIT = 22


class InstanceSizeError(RuntimeError):
    """Face enumeration refused: instance too large without an override."""


@dataclass(frozen=True)
class Face:
    """A face together with the polystable subquiver that carves it out."""

    subquiver: frozenset
    dim: int
    vertices: tuple
    rays: tuple = ()
    kind: str = "dual"


@dataclass
class LatticePolytope:
    """Vertex-presented polyhedron with exact coordinates.

    ``vertices`` are tuples of ints/Fractions, ``rays`` generate the tail
    cone.  Quiver-built polytopes carry extra combinatorial data: the point
    of each arrow and the face index keyed by polystable subquiver.
    """

    vertices: tuple
    rays: tuple = ()
    arrow_point: dict = field(default_factory=dict)
    face_index: dict = field(default_factory=dict)
    _poset: object = field(default=None, repr=False)

    @property
    def ambient_dim(self):
        if self.vertices:
            return len(self.vertices[0])
        if self.rays:
            return len(self.rays[0])
        return 0

    @property
    def dim(self):
        if not self.vertices:
            return -1
        pts = list(self.vertices) + [geometry.vadd(self.vertices[0], r)
                                     for r in self.rays]
        return geometry.affine_dim(pts)

    def is_compact(self):
        return not self.rays

    def poset(self):
        if self._poset is None:
            if self.rays:
                raise QuiverStructureError("geometric face poset needs compactness")
            self._poset = geometry.FacePoset(list(self.vertices))
        return self._poset

    def geometric_faces(self, dim):
        return [tuple(self.vertices[i] for i in sorted(f))
                for f in self.poset().faces(dim)]

    def polar_dual(self):
        duals = geometry.polar_dual_vertices(list(self.vertices))
        return LatticePolytope(tuple(duals))

    def sorted_vertices(self):
        return sorted(tuple(Fraction(x) for x in v) for v in self.vertices)


# ---------------------------------------------------------------------------
# polystable subquiver enumeration

def _forest_flow(q: Quiver, arrow_names, theta):
    """Unique flow on a forest with the given divergence, by leaf stripping.

    Returns an arrow -> value dict (values may be negative) or None when the
    system is inconsistent.
    """
    residual = {v: theta[v] for v in q.vertices}
    incident = {v: [] for v in q.vertices}
    objs = {}
    for name in arrow_names:
        a = q.arrow(name)
        objs[name] = a
        incident[a.tail].append(name)
        incident[a.head].append(name)
    deg = {v: len(incident[v]) for v in q.vertices}
    leaves = [v for v in q.vertices if deg[v] == 1]
    alive = set(arrow_names)
    flow = {}
    while leaves:
        v = leaves.pop()
        live = [n for n in incident[v] if n in alive]
        if not live:
            continue
        name = live[0]
        a = objs[name]
        if a.tail == v:
            f = residual[v]
            other = a.head
            residual[other] += f
        else:
            f = -residual[v]
            other = a.tail
            residual[other] -= f
        flow[name] = f
        residual[v] = 0
        alive.discard(name)
        deg[v] -= 1
        deg[other] -= 1
        if deg[other] == 1:
            leaves.append(other)
    if alive or any(residual[v] != 0 for v in q.vertices):
        return None
    return flow


def positive_forest_flows(q: Quiver, theta):
    """(arrow set, flow) for every forest carrying a strictly positive flow.

    These are exactly the vertices of the flow polytope; for the zero weight
    the only entry is the empty forest.
    """
    names = sorted(a.name for a in q.arrows if a.tail != a.head)
    objs = {n: q.arrow(n) for n in names}
    out = []

    def forest_ok(chosen, new):
        parent = {}

        def find(x):
            while parent.get(x, x) != x:
                x = parent[x]
            return x

        for n in chosen + [new]:
            a = objs[n]
            ra, rb = find(a.tail), find(a.head)
            if ra == rb:
                return False
            parent[ra] = rb
        return True

    def extend(start, chosen):
        flow = _forest_flow(q, chosen, theta)
        if flow is not None and all(v > 0 for v in flow.values()):
            out.append((frozenset(chosen), dict(flow)))
        for i in range(start, len(names)):
            if forest_ok(chosen, names[i]):
                extend(i + 1, chosen + [names[i]])

    extend(0, [])
    return out


def enumerate_polystable(q: Quiver, theta, force: bool = False):
    """All polystable arrow subsets.

    A subquiver is polystable iff it carries a strictly positive flow, and
    any such flow decomposes over the vertices and rays of the flow
    polytope; so the polystable subsets are exactly the unions of one or
    more positive-forest supports together with arbitrary oriented-cycle
    supports.  Enumerate the generators, then close under unions.
    """
    check_weight(q, theta)
    if q.n_arrows > ENUMERATION_ARROW_LIMIT and not force:
        raise InstanceSizeError(
            f"{q.n_arrows} arrows exceeds the enumeration limit "
            f"{ENUMERATION_ARROW_LIMIT}; pass force=True to override")
    seeds = [supp for supp, _ in positive_forest_flows(q, theta)]
    gens = seeds + [frozenset(c) for c in simple_oriented_cycles(q)]
    family = set(seeds)
    frontier = list(family)
    while frontier:
        new = []
        for f in frontier:
            for g in gens:
                u = f | g
                if u not in family:
                    family.add(u)
                    new.append(u)
        frontier = new
    return sorted(family, key=lambda s: (len(s), sorted(s)))


@lru_cache(maxsize=None)
def _polystable_cached(q: Quiver, theta_t, force):
    theta = dict(zip(q.vertices, theta_t))
    return tuple(enumerate_polystable(q, theta, force))


def polystable_subquivers(q: Quiver, theta, force=False):
    return list(_polystable_cached(q, weight_tuple(q, theta), force))


# ---------------------------------------------------------------------------
# flow polytope

def tree_flow(q: Quiver, tree_arrows, theta):
    """The unique flow supported on a spanning forest, if consistent."""
    sub = q.sub(tree_arrows)
    arrows = sorted(tree_arrows)
    cols = {a: j for j, a in enumerate(arrows)}
    inc = [[0] * len(arrows) for _ in q.vertices]
    vi = {v: i for i, v in enumerate(q.vertices)}
    for a in arrows:
        ar = q.arrow(a)
        if ar.tail != ar.head:
            inc[vi[ar.tail]][cols[a]] += 1
            inc[vi[ar.head]][cols[a]] -= 1
    rhs = [theta[v] for v in q.vertices]
    sol = solve_exact(inc, rhs)
    if sol is None:
        return None
    vals, unique = sol
    flow = {a: vals[cols[a]] for a in arrows}
    if not sub.is_forest():
        unique = False
    return flow, unique


def flow_polytope(q: Quiver, theta, force=False) -> LatticePolytope:
    """Nonnegative flows with divergence theta; empty if not semistable.

    Vertices come from the polystable spanning forests, the tail cone from
    the simple oriented cycles; faces are keyed by polystable subquivers.
    """
    check_weight(q, theta)
    if _flow_feasible(q.full(), theta) is None:
        return LatticePolytope(())
    subs = polystable_subquivers(q, theta, force)
    names = sorted(q.arrow_names())
    verts = []
    faces = {}
    tree_flows = dict(positive_forest_flows(q, theta))
    for p in subs:
        d = len(p) - q.n_vertices + len(q.sub(p).components())
        if d == 0:
            flow = tree_flows[p]
            verts.append((p, tuple(flow.get(a, 0) for a in names)))
    cycles = simple_oriented_cycles(q)
    rays = tuple(tuple(c.get(a, 0) for a in names) for c in cycles)
    for p in subs:
        d = len(p) - q.n_vertices + len(q.sub(p).components())
        fverts = tuple(pt for pp, pt in verts if pp <= p)
        frays = tuple(r for c, r in zip(cycles, rays) if set(c) <= p)
        faces[p] = Face(p, d, fverts, frays, kind="flow")
    poly = LatticePolytope(tuple(pt for _, pt in verts), rays)
    poly.face_index = faces
    return poly


# ---------------------------------------------------------------------------
# the dual-side lattice and quiver polytope

@dataclass(frozen=True)
class FStarLattice:
    """Coordinates for ZZ^arrows / (perp of the cycle lattice)."""

    quiver: Quiver
    matrix: tuple         # d x m integer matrix, columns are the arrow images
    cycle_basis: LatticeBasis

    @property
    def dim(self):
        return len(self.matrix)

    def arrow_image(self, name):
        names = sorted(self.quiver.arrow_names())
        j = names.index(name)
        return tuple(row[j] for row in self.matrix)

    def functional_coordinates(self, flow_vector):
        """Represent an integer cycle-space vector as a functional in ZZ^d."""
        rows = [[self.matrix[i][j] for i in range(self.dim)]
                for j in range(len(flow_vector))]
        sol = solve_exact(rows, list(flow_vector))
        if sol is None:
            raise ValueError("vector is not in the cycle space")
        return tuple(int(x) for x in sol[0])


@lru_cache(maxsize=None)
def fstar_lattice(q: Quiver) -> FStarLattice:
    names = sorted(q.arrow_names())
    vi = {v: i for i, v in enumerate(q.vertices)}
    inc = [[0] * len(names) for _ in q.vertices]
    for j, a in enumerate(names):
        ar = q.arrow(a)
        if ar.tail != ar.head:
            inc[vi[ar.tail]][j] += 1
            inc[vi[ar.head]][j] -= 1
    cycles = integer_kernel(inc)
    perp = integer_kernel(cycles.matrix()) if cycles.rank else \
        LatticeBasis(len(names), tuple(tuple(r) for r in
                                       [[1 if i == j else 0 for j in range(len(names))]
                                        for i in range(len(names))]))
    qmat = quotient_coordinates(len(names), perp)
    return FStarLattice(q, tuple(tuple(r) for r in qmat), cycles)


def quiver_polytope(q: Quiver, theta=None, force=False) -> LatticePolytope:
    """Convex hull of the arrow images in the quotient lattice.

    ``theta`` defaults to the canonical weight; faces come from the
    polystable subquivers via complementation.  Results are cached per
    quiver and weight; treat them as immutable.
    """
    theta = q.canonical_weight() if theta is None else theta
    return _quiver_polytope_cached(q, weight_tuple(q, theta), force)


@lru_cache(maxsize=None)
def _quiver_polytope_cached(q: Quiver, theta_t, force) -> LatticePolytope:
    theta = dict(zip(q.vertices, theta_t))
    if len(q.full().components()) != 1:
        raise QuiverStructureError("quiver polytope needs a connected quiver")
    lat = fstar_lattice(q)
    names = sorted(q.arrow_names())
    pts = {a: lat.arrow_image(a) for a in names}
    subs = polystable_subquivers(q, theta, force)
    faces = {}
    for p in subs:
        comp = [a for a in names if a not in p]
        d = len(comp) - len(q.sub(p).components())
        faces[p] = Face(p, d, tuple(sorted({pts[a] for a in comp})), kind="dual")
    marked = sorted({pts[a] for a in names})
    zero_faces = {f.vertices[0] for f in faces.values() if f.dim == 0}
    if len(zero_faces) == len(marked):
        verts = tuple(marked)
    else:
        # untight or cyclic input: some arrow images are not extreme
        poset = geometry.FacePoset(marked)
        verts = tuple(sorted(marked[next(iter(f))] for f in poset.faces(0)))
    poly = LatticePolytope(verts)
    poly.arrow_point = pts
    poly.face_index = faces
    return poly


def is_reflexive(q: Quiver, force=False) -> bool:
    """Certificate that the quiver polytope is reflexive (acyclic input).

    Checks that the origin is interior and that each facet (one per
    polystable tree, cut out at value -1 by the tree flow shifted by the
    all-ones vector) has an integral normal and full facet rank.
    """
    if q.has_oriented_cycles() or len(q.full().components()) != 1:
        return False
    from .quiver import is_tight, tighten
    theta = q.canonical_weight()
    if not is_tight(q, theta):
        q, _ = tighten(q, theta)
        theta = q.canonical_weight()
    lat = fstar_lattice(q)
    poly = quiver_polytope(q, theta, force)
    names = sorted(q.arrow_names())
    dim = poly.dim
    for p, flow in positive_forest_flows(q, theta):
        shifted = [flow.get(a, 0) - 1 for a in names]
        try:
            lat.functional_coordinates(shifted)
        except ValueError:
            return False
        on_facet = [poly.arrow_point[a] for a in names if flow.get(a, 0) == 0]
        if geometry.affine_dim(sorted(set(on_facet))) != dim - 1:
            return False
    return True


def dual_face_subposet(q: Quiver, p: frozenset, theta=None):
    """All faces of the dual-side face of p: the polystable supersets of p."""
    theta = q.canonical_weight() if theta is None else theta
    poly = quiver_polytope(q, theta)
    return {pp: f for pp, f in poly.face_index.items() if pp >= p}


@lru_cache(maxsize=None)
def _low_dim_face_cache(q: Quiver, theta_t, maxdim):
    theta = dict(zip(q.vertices, theta_t))
    poly = quiver_polytope(q, theta)
    return tuple(f for f in poly.face_index.values() if f.dim <= maxdim)


def low_dim_faces(q: Quiver, theta=None, maxdim=3):
    """The dual-side faces of dimension at most maxdim (cached)."""
    theta = q.canonical_weight() if theta is None else theta
    return _low_dim_face_cache(q, weight_tuple(q, theta), maxdim)


def contraction_face(q: Quiver, sub: Subquiver, theta=None):
    """(face of the quiver polytope, contracted quiver) for polystable sub.

    Checks the dimension formula and that the face's affine span has
    lattice distance one from the origin.
    """
    theta = q.canonical_weight() if theta is None else theta
    if not sub.arrows:
        raise QuiverStructureError("contraction face needs a nonempty subquiver")
    if not is_polystable(sub, theta, method="flow"):
        raise QuiverStructureError("subquiver is not polystable")
    poly = quiver_polytope(q, theta)
    face = poly.face_index[sub.arrows]
    gamma, _, pushed = contract(q, sub, theta)
    expected = gamma.n_arrows - gamma.n_vertices
    if face.dim != expected:
        raise AssertionError("face dimension disagrees with the contraction count")
    if any(v != 0 for v in pushed.values()):
        raise AssertionError("polystable contraction must push the weight to zero")
    if geometry.lattice_distance_from_origin(list(face.vertices)) != 1:
        raise AssertionError("face plane is not at lattice distance one")
    return face, gamma


# ---------------------------------------------------------------------------
# conifold condition and small-face classification

def face_two_faces(q: Quiver, face: Face, theta=None):
    """Vertex tuples of the 2-dimensional subfaces of a dual-side face."""
    return [f.vertices for f in dual_face_subposet(q, face.subquiver, theta).values()
            if f.dim == 2]


def conifold_check(poly: LatticePolytope, q: Quiver = None, theta=None):
    """Every 2-face a unimodular triangle or square?  Returns (ok, witness)."""
    if not poly.is_compact():
        raise QuiverStructureError("conifold check needs a compact polytope")
    if q is not None:
        two = [f.vertices for f in quiver_polytope(q, theta).face_index.values()
               if f.dim == 2]
    else:
        two = poly.geometric_faces(2)
    for pts in two:
        if geometry.is_unimodular_triangle(list(pts)):
            continue
        if geometry.is_unimodular_square(list(pts)):
            continue
        return False, pts
    return True, None


def classify_small_face(face_points) -> str:
    """Shape label for a face of dimension at most 3."""
    pts = [tuple(int(x) for x in p) for p in face_points]
    d = geometry.affine_dim(pts)
    if d > 3:
        raise ValueError("classification only covers dimension <= 3")
    if d == 0:
        return "point"
    if d == 1:
        ends = sorted(set(pts))
        diff = geometry.vsub(ends[-1], ends[0])
        return "unit-interval" if abs(vec_gcd(list(diff))) == 1 else "interval"
    if d == 2:
        if geometry.is_unimodular_triangle(pts):
            return "unit-triangle"
        if geometry.is_unimodular_square(pts):
            return "unit-square"
        raise ValueError("unexpected 2-face shape")
    if len(pts) == 4:
        return "tetrahedron"
    if len(pts) == 5:
        poset = geometry.FacePoset(pts)
        for f in poset.faces(2):
            if len(f) == 4:
                apex = set(range(5)) - f
                if len(apex) == 1:
                    return "pyramid-over-square"
        raise ValueError("unexpected 5-vertex 3-face")
    if len(pts) == 6:
        sums = {}
        for i in range(6):
            for j in range(i + 1, 6):
                sums.setdefault(geometry.vadd(pts[i], pts[j]), []).append((i, j))
        if any(len(pairs) == 3 and len({k for pr in pairs for k in pr}) == 6
               for pairs in sums.values()):
            return "octahedron-shifted-lattice"
        return "unit-prism"
    raise ValueError(f"unexpected 3-face with {len(pts)} vertices")


# ---------------------------------------------------------------------------
# degrees and hyperplane cuts

@dataclass(frozen=True)
class Degree:
    """Integer arrow vector whose divergence is height * canonical weight."""

    quiver: Quiver
    coords: tuple        # aligned with sorted arrow names
    height: int

    @classmethod
    def from_coords(cls, q: Quiver, coords):
        names = sorted(q.arrow_names())
        if isinstance(coords, dict):
            vec = tuple(int(coords.get(a, 0)) for a in names)
        else:
            vec = tuple(int(x) for x in coords)
        div = q.divergence(dict(zip(names, vec)))
        theta = q.canonical_weight()
        nz = [v for v in q.vertices if theta[v] != 0]
        if not nz:
            raise QuiverStructureError(
                "height is ambiguous when the canonical weight vanishes")
        g, rem = divmod(div[nz[0]], theta[nz[0]])
        if rem != 0 or any(div[v] != g * theta[v] for v in q.vertices):
            raise QuiverStructureError(
                "divergence is not an integer multiple of the canonical weight")
        return cls(q, vec, g)

    @classmethod
    def all_ones(cls, q: Quiver):
        return cls(q, tuple(1 for _ in q.arrows), 1)

    def coord(self, arrow_name):
        names = sorted(self.quiver.arrow_names())
        return self.coords[names.index(arrow_name)]

    def as_dict(self):
        return dict(zip(sorted(self.quiver.arrow_names()), self.coords))

    def __add__(self, other):
        if other.quiver != self.quiver:
            raise QuiverStructureError("degrees live on different quivers")
        return Degree(self.quiver,
                      tuple(a + b for a, b in zip(self.coords, other.coords)),
                      self.height + other.height)

    def scale(self, k: int):
        return Degree(self.quiver, tuple(k * x for x in self.coords),
                      k * self.height)


def restrict_to_hyperplane(q: Quiver, degree: Degree, theta=None):
    """The face of the quiver polytope where the degree attains value one.

    Returns the Face, or None if the degree exceeds one on some vertex of
    the polytope (an empty Face if it stays strictly below one).
    """
    theta = q.canonical_weight() if theta is None else theta
    poly = quiver_polytope(q, theta)
    names = sorted(q.arrow_names())
    vals = dict(zip(names, degree.coords))
    by_point = {}
    for a in names:
        by_point.setdefault(poly.arrow_point[a], set()).add(vals[a])
    if any(len(seen) != 1 for seen in by_point.values()):
        raise QuiverStructureError("degree is not well-defined on the polytope")
    if any(vals[a] > 1 for a in names):
        return None
    hit = frozenset(a for a in names if vals[a] == 1)
    if not hit:
        return Face(frozenset(names), -1, (), kind="dual")
    p = frozenset(names) - hit
    if not p:
        # degree equals one everywhere: the cut is the whole polytope
        return Face(frozenset(), poly.dim, tuple(poly.vertices), kind="dual")
    if p not in poly.face_index:
        raise QuiverStructureError(
            "degree level set is not a face; complement is not polystable")
    return poly.face_index[p]
