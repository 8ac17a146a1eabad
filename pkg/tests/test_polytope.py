from fractions import Fraction

import pytest

from quivar import geometry
from quivar.fixtures import (double_path_quiver, fence_q1, loop_quiver,
                             path_quiver, three_arrow_quiver)
from quivar.polytope import (Degree, InstanceSizeError, LatticePolytope,
                             classify_small_face, conifold_check,
                             contraction_face, enumerate_polystable,
                             flow_polytope, is_reflexive, polystable_subquivers,
                             quiver_polytope, restrict_to_hyperplane,
                             positive_forest_flows)
from quivar.quiver import (Arrow, Quiver, QuiverStructureError, contract,
                           gamma_dbl, gamma_opp, is_polystable, ladder_flag)
from conftest import all_subquivers, brute_vertices


class TestFlowPolytope:
    def test_path_single_point(self):
        q = path_quiver(3)
        poly = flow_polytope(q, q.canonical_weight())
        assert poly.vertices == ((1, 1),)
        assert poly.rays == ()

    def test_easy_unbounded(self):
        q = three_arrow_quiver()
        poly = flow_polytope(q, q.canonical_weight())
        assert len(poly.vertices) == 2
        assert len(poly.rays) == 2
        assert poly.dim == 2
        proper = [p for p in poly.face_index
                  if len(p) < q.n_arrows and p]
        assert len(proper) == 5

    def test_vertices_integral(self, catalog):
        for q in catalog.values():
            theta = q.canonical_weight()
            poly = flow_polytope(q, theta)
            for v in poly.vertices:
                assert all(isinstance(x, int) for x in v)

    def test_brute_force_forest_oracle(self, catalog):
        for name, q in catalog.items():
            if q.n_arrows > 12:
                continue
            theta = q.canonical_weight()
            poly = flow_polytope(q, theta)
            assert sorted(poly.vertices) == brute_vertices(q, theta), name

    def test_empty_when_not_semistable(self):
        q = Quiver(("a", "b"), (Arrow("e", "b", "a"),))
        poly = flow_polytope(q, {"a": 1, "b": -1})
        assert poly.vertices == ()


class TestEnumeration:
    def test_union_closure_matches_definition(self, catalog):
        for name, q in catalog.items():
            if q.n_arrows > 9:
                continue
            theta = q.canonical_weight()
            expected = sorted((s.arrows for s in all_subquivers(q)
                               if is_polystable(s, theta, method="components")),
                              key=lambda s: (len(s), sorted(s)))
            got = enumerate_polystable(q, theta)
            assert got == expected, name

    def test_size_guard(self):
        big = Quiver(("a", "b"),
                     tuple(Arrow(f"e{i}", "a", "b") for i in range(12)) +
                     tuple(Arrow(f"f{i}", "b", "a") for i in range(12)))
        with pytest.raises(InstanceSizeError):
            enumerate_polystable(big, big.canonical_weight())
        assert enumerate_polystable(big, big.canonical_weight(), force=True)

    def test_face_dimension_formulas(self, catalog):
        # flow side: #arrows - #vertices + #components equals the affine dim;
        # dual side: #complement - #components.
        for name in ("easy", "ladder25", "q1", "dbl3", "opp3", "oct"):
            q = catalog[name]
            theta = q.canonical_weight()
            flow = flow_polytope(q, theta)
            for p, face in flow.face_index.items():
                sub = q.sub(p)
                expected = len(p) - q.n_vertices + len(sub.components())
                assert face.dim == expected
                pts = list(face.vertices) + \
                    [geometry.vadd(face.vertices[0], r) for r in face.rays]
                assert geometry.affine_dim(pts) == expected
            dual = quiver_polytope(q, theta)
            for p, face in dual.face_index.items():
                gamma, _ = contract(q, q.sub(p))
                expected = gamma.n_arrows - gamma.n_vertices
                assert face.dim == expected
                if face.vertices:
                    assert geometry.affine_dim(list(face.vertices)) == expected


class TestQuiverPolytope:
    def test_easy_triangle(self):
        q = three_arrow_quiver()
        poly = quiver_polytope(q, q.canonical_weight())
        pts = poly.arrow_point
        a, b, c = pts["al"], pts["be"], pts["ga"]
        assert geometry.vadd(a, c) == b
        assert len(poly.vertices) == 3

    def test_octahedron(self):
        q = double_path_quiver()
        poly = quiver_polytope(q)
        assert poly.dim == 3
        pts = sorted(poly.vertices)
        assert len(pts) == 6
        # three opposite pairs through the origin
        assert all(tuple(-x for x in p) in pts for p in pts)
        assert classify_small_face(poly.vertices) == "octahedron-shifted-lattice"

    def test_gamma_families(self):
        opp = gamma_opp(3)
        poly = quiver_polytope(opp, opp.zero_weight())
        assert poly.dim == 3 and len(poly.vertices) == 6
        assert classify_small_face(poly.vertices) == "unit-prism"
        dbl = gamma_dbl(3)
        poly = quiver_polytope(dbl, dbl.zero_weight())
        assert classify_small_face(poly.vertices) == "octahedron-shifted-lattice"
        sq = gamma_dbl(2)
        poly = quiver_polytope(sq, sq.zero_weight())
        assert classify_small_face(poly.vertices) == "unit-square"

    def test_crosspolytope_counts(self):
        for k in (3, 4):
            q = gamma_dbl(k)
            poly = quiver_polytope(q, q.zero_weight())
            assert poly.dim == k
            assert len(poly.vertices) == 2 * k

    def test_geometric_faces_match_subquiver_faces(self):
        q = ladder_flag(2, 5)
        poly = quiver_polytope(q)
        geo = {frozenset(f) for d in range(poly.dim)
               for f in poly.poset().faces(d)}
        idx = {v: i for i, v in enumerate(poly.vertices)}
        comb = {frozenset(idx[p] for p in f.vertices)
                for f in poly.face_index.values() if f.vertices}
        assert geo == comb


class TestContractionFace:
    def test_easy_faces_are_loop_polytopes(self):
        q = three_arrow_quiver()
        theta = q.canonical_weight()
        for p in polystable_subquivers(q, theta):
            if not p or len(p) == 3:
                continue
            face, gamma = contraction_face(q, q.sub(p), theta)
            assert gamma.n_vertices == 1
            assert all(a.tail == a.head for a in gamma.arrows)
            label = classify_small_face(face.vertices)
            assert label in ("point", "unit-interval")

    def test_simple_knot_square(self):
        q = ladder_flag(2, 5)
        sub = q.delete_vertex_arrows("v1_1")
        face, gamma = contraction_face(q, sub)
        assert classify_small_face(face.vertices) == "unit-square"

    def test_double_cycle_contraction_is_octahedron(self):
        # blow each vertex of the double triangle up into a 2-cycle
        vs = [f"{x}{i}" for i in (1, 2, 3) for x in "uv"]
        arrows = []
        for i in (1, 2, 3):
            arrows += [Arrow(f"w{i}", f"u{i}", f"v{i}"),
                       Arrow(f"w{i}r", f"v{i}", f"u{i}")]
        for i in (1, 2, 3):
            j = i % 3 + 1
            arrows += [Arrow(f"b{i}", f"u{i}", f"u{j}"),
                       Arrow(f"c{i}", f"v{i}", f"v{j}")]
        q = Quiver(tuple(vs), tuple(arrows))
        p = q.sub({f"w{i}" for i in (1, 2, 3)} | {f"w{i}r" for i in (1, 2, 3)})
        theta = q.canonical_weight()
        assert is_polystable(p, theta)
        face, gamma = contraction_face(q, p, theta)
        assert classify_small_face(face.vertices) == "octahedron-shifted-lattice"
        # the lattice shift: the center is a half-integral point
        pts = sorted(face.vertices)
        center2 = geometry.vadd(pts[0], [-x for x in [0]*0] if False else
                                tuple(-x for x in pts[0]))
        sums = {geometry.vadd(p1, p2) for p1 in pts for p2 in pts
                if geometry.vadd(p1, p2) != tuple(2 * x for x in p1)}
        # some pair sum is odd in a coordinate, so the midpoint is non-lattice
        pair_sum = [s for s in sums
                    if sum(1 for p1 in pts for p2 in pts
                           if geometry.vadd(p1, p2) == s) >= 6]
        assert any(any(x % 2 for x in s) for s in pair_sum)

    def test_rejects_non_polystable(self):
        q = ladder_flag(2, 5)
        bad = q.sub({sorted(q.arrow_names())[0]})
        with pytest.raises(QuiverStructureError):
            contraction_face(q, bad)


class TestConifold:
    def test_acyclic_fixtures_pass(self, catalog):
        for name in ("oct", "ladder12", "ladder25", "q1", "q2", "q4", "ones"):
            q = catalog[name]
            ok, witness = conifold_check(quiver_polytope(q), q)
            assert ok, (name, witness)

    def test_area_one_triangle_fails(self):
        poly = LatticePolytope(((0, 0, 0, 1), (1, 0, 0, 1), (0, 2, 0, 1),
                                (0, 0, 1, 1)))
        ok, witness = conifold_check(poly)
        assert not ok
        assert len(witness) == 3


class TestClassification:
    def test_loop_quivers(self):
        q2 = loop_quiver(2)
        poly = quiver_polytope(q2, q2.zero_weight())
        assert classify_small_face(poly.vertices) == "unit-interval"
        q3 = loop_quiver(3)
        poly = quiver_polytope(q3, q3.zero_weight())
        assert classify_small_face(poly.vertices) == "unit-triangle"
        q4 = loop_quiver(4)
        poly = quiver_polytope(q4, q4.zero_weight())
        assert classify_small_face(poly.vertices) == "tetrahedron"

    def test_loop_makes_pyramid(self):
        # square quiver plus one loop: pyramid over the unit square
        base = gamma_dbl(2)
        q = Quiver(base.vertices, base.arrows + (Arrow("l", "1", "1"),))
        poly = quiver_polytope(q, q.zero_weight())
        assert classify_small_face(poly.vertices) == "pyramid-over-square"

    def test_rejects_high_dimension(self):
        q = gamma_dbl(4)
        poly = quiver_polytope(q, q.zero_weight())
        with pytest.raises(ValueError):
            classify_small_face(poly.vertices)


class TestDegreesAndCuts:
    def test_all_ones_is_whole_polytope(self):
        q = double_path_quiver()
        face = restrict_to_hyperplane(q, Degree.all_ones(q))
        assert face.dim == 3
        assert len(face.vertices) == 6

    def test_exceeding_degree_is_none(self):
        q = double_path_quiver()
        coords = {a: 0 for a in q.arrow_names()}
        coords["a1"] = coords["a2"] = 2
        deg = Degree.from_coords(q, coords)
        assert restrict_to_hyperplane(q, deg) is None

    def test_degree_invariant_enforced(self):
        q = double_path_quiver()
        with pytest.raises(QuiverStructureError):
            Degree.from_coords(q, {"a1": 1})


class TestReflexivity:
    def test_certificate_on_acyclic(self, catalog):
        for name in ("oct", "ladder12", "ladder25", "q1", "q2", "q4", "ones"):
            assert is_reflexive(catalog[name]), name
        assert not is_reflexive(catalog["easy"])

    def test_dual_of_dual(self, catalog):
        for name in ("oct", "ladder12", "ladder25"):
            q = catalog[name]
            poly = quiver_polytope(q)
            dual = poly.polar_dual()
            assert all(Fraction(x).denominator == 1
                       for v in dual.vertices for x in v)
            back = dual.polar_dual()
            assert back.sorted_vertices() == poly.sorted_vertices()

    def test_dual_equals_shifted_flow_polytope(self, catalog):
        # facet normals are exactly the tree flows shifted by all-ones
        from quivar.polytope import fstar_lattice
        for name in ("oct", "ladder25", "q1"):
            q = catalog[name]
            lat = fstar_lattice(q)
            names = sorted(q.arrow_names())
            theta = q.canonical_weight()
            expected = set()
            for _, flow in positive_forest_flows(q, theta):
                shifted = [flow.get(a, 0) - 1 for a in names]
                expected.add(lat.functional_coordinates(shifted))
            dual = quiver_polytope(q).polar_dual()
            assert {tuple(int(x) for x in v) for v in dual.vertices} == expected

    def test_acyclicity_equivalences(self, catalog):
        for name, q in catalog.items():
            if len(q.full().components()) != 1:
                continue
            acyclic = not q.has_oriented_cycles()
            flow = flow_polytope(q, q.canonical_weight())
            assert (flow.rays == ()) == acyclic
            dual = quiver_polytope(q, q.canonical_weight())
            if dual.dim == dual.ambient_dim:
                assert geometry.origin_interior(list(dual.vertices)) == acyclic

    def test_lattice_distance_one(self, catalog):
        q = catalog["ladder25"]
        poly = quiver_polytope(q)
        for p, face in poly.face_index.items():
            if face.vertices and len(p) < q.n_arrows:
                assert geometry.lattice_distance_from_origin(
                    list(face.vertices)) == 1
