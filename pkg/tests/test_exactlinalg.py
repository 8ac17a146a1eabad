import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from quivar.exactlinalg import (LatticeBasis, hermite_normal_form, identity,
                                integer_kernel, invariant_factors, mat_mul,
                                mat_vec, quotient_coordinates, rational_rank,
                                row_echelon_transform, smith_normal_form,
                                solve_exact, sparse_rank, transpose)
from quivar.fixtures import three_arrow_quiver, path_quiver


small_matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c),
                           min_size=r, max_size=r)))


def det_expansion(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    total = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        total += (-1) ** j * m[0][j] * det_expansion(minor)
    return total


class TestIntegerKernel:
    def test_three_arrow_quiver(self):
        q = three_arrow_quiver()
        ker = integer_kernel(q.incidence())
        assert ker.rank == 2
        assert ker.is_saturated()
        # annihilated by the covector with pattern (+1, -1, +1) on (al, be, ga)
        for v in ker.vectors:
            assert v[0] - v[1] + v[2] == 0

    def test_zero_matrix(self):
        ker = integer_kernel([[0, 0, 0], [0, 0, 0]])
        assert ker.rank == 3

    def test_oriented_path(self):
        q = path_quiver(3)
        assert integer_kernel(q.incidence()).rank == 0

    @settings(max_examples=120, deadline=None)
    @given(small_matrices)
    def test_orthogonality_and_rank_nullity(self, m):
        ker = integer_kernel(m)
        for v in ker.vectors:
            assert all(x == 0 for x in mat_vec(m, list(v)))
        assert ker.rank + rational_rank(m) == len(m[0])
        assert ker.is_saturated()


class TestRationalRank:
    def test_identity(self):
        assert rational_rank(identity(4)) == 4

    def test_all_ones(self):
        assert rational_rank([[1, 1, 1]] * 3) == 1

    def test_fractions(self):
        m = [[Fraction(1, 2), Fraction(1, 3)], [Fraction(1, 2), Fraction(1)]]
        assert rational_rank(m) == 2
        singular = [[Fraction(1, 2), Fraction(1, 3)], [Fraction(3, 2), Fraction(1)]]
        assert rational_rank(singular) == 1

    @settings(max_examples=120, deadline=None)
    @given(small_matrices)
    def test_matches_sparse_rank(self, m):
        sparse = [{j: x for j, x in enumerate(row) if x} for row in m]
        assert rational_rank(m) == sparse_rank(sparse)


class TestNormalForms:
    @settings(max_examples=100, deadline=None)
    @given(small_matrices)
    def test_smith_transforms(self, m):
        d, u, v = smith_normal_form(m)
        assert mat_mul(mat_mul(u, m), v) == d
        assert abs(det_expansion(u)) == 1
        assert abs(det_expansion(v)) == 1
        diag = [d[i][i] for i in range(min(len(d), len(d[0])))]
        for a, b in zip(diag, diag[1:]):
            if a != 0:
                assert b % a == 0
            else:
                assert b == 0

    @settings(max_examples=80, deadline=None)
    @given(small_matrices)
    def test_echelon_transform(self, m):
        h, t = row_echelon_transform(m)
        assert mat_mul(t, m) == h
        assert abs(det_expansion(t)) == 1

    def test_hnf_idempotent_shape(self):
        m = [[2, 4, 4], [-6, 6, 12], [10, 4, 16]]
        h = hermite_normal_form(m)
        assert hermite_normal_form(h) == h


class TestQuotientCoordinates:
    def test_zero_sublattice(self):
        q = quotient_coordinates(3, LatticeBasis(3, ()))
        assert q == identity(3)

    def test_triangle_relation(self):
        sub = LatticeBasis(3, ((1, -1, 1),))
        q = quotient_coordinates(3, sub)
        a, b, c = transpose(q)
        assert [x - y + z for x, y, z in zip(a, b, c)] == [0, 0]
        assert abs(det_expansion([a, c])) == 1

    def test_octahedron_quotient(self):
        sub = LatticeBasis(6, ((1, 1, 0, 0, 0, 0), (0, 0, 1, 1, 0, 0),
                               (0, 0, 0, 0, 1, 1)))
        q = quotient_coordinates(6, sub)
        cols = transpose(q)
        assert cols[1] == [-x for x in cols[0]]
        assert cols[3] == [-x for x in cols[2]]
        assert cols[5] == [-x for x in cols[4]]
        assert abs(det_expansion([cols[0], cols[2], cols[4]])) == 1

    def test_rejects_unsaturated(self):
        with pytest.raises(ValueError):
            quotient_coordinates(2, LatticeBasis(2, ((2, 0),)))

    @settings(max_examples=60, deadline=None)
    @given(small_matrices)
    def test_kernel_quotient_roundtrip(self, m):
        ker = integer_kernel(m)
        q = quotient_coordinates(len(m[0]), ker)
        for v in ker.vectors:
            assert all(x == 0 for x in mat_vec(q, list(v)))
        if q:
            assert all(d == 1 for d in invariant_factors(q))


class TestSolveExact:
    def test_invertible(self):
        sol = solve_exact([[2, 1], [1, 1]], [3, 2])
        assert sol == ([Fraction(1), Fraction(1)], True)

    def test_inconsistent(self):
        assert solve_exact([[1, 1], [1, 1]], [0, 1]) is None

    def test_underdetermined(self):
        sol = solve_exact([[1, 1]], [2])
        assert sol is not None and sol[1] is False

    def test_tree_flow_unique_integral(self):
        q = path_quiver(3)
        theta = q.canonical_weight()
        m = q.incidence()
        sol, unique = solve_exact(m, [theta[v] for v in q.vertices])
        assert unique
        assert sol == [1, 1]


class TestTotalUnimodularity:
    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_incidence_submatrices(self, data):
        n = data.draw(st.integers(2, 5))
        m = data.draw(st.integers(1, 6))
        from quivar.quiver import Arrow, Quiver
        arrows = []
        for i in range(m):
            t = data.draw(st.integers(0, n - 1))
            h = data.draw(st.integers(0, n - 1))
            arrows.append(Arrow(f"a{i}", f"v{t}", f"v{h}"))
        q = Quiver(tuple(f"v{i}" for i in range(n)), tuple(arrows))
        inc = q.incidence()
        k = data.draw(st.integers(1, min(n, m, 4)))
        rows = data.draw(st.permutations(range(n)))[:k]
        cols = data.draw(st.permutations(range(m)))[:k]
        sub = [[inc[i][j] for j in cols] for i in rows]
        assert det_expansion(sub) in (-1, 0, 1)
