import pytest

from quivar.exactlinalg import integer_kernel
from quivar.fixtures import (double_path_quiver, fence_q2, loop_quiver,
                             path_quiver, three_arrow_quiver)
from quivar.quiver import (Arrow, Quiver, QuiverStructureError, contract,
                           gamma_dbl, gamma_opp, gamma_perm, is_flag_quiver,
                           is_polystable, is_semistable, is_stable, is_tight,
                           ladder_flag, maximal_polystable, quiver_isomorphic,
                           tighten)
from conftest import all_subquivers


def arrow_multiset(q):
    out = {}
    for a in q.arrows:
        out[(a.tail, a.head)] = out.get((a.tail, a.head), 0) + 1
    return out


class TestIncidence:
    def test_single_arrow(self):
        q = Quiver(("a", "b"), (Arrow("e", "a", "b"),))
        assert q.incidence() == [[1], [-1]]

    def test_loop_column_is_zero(self):
        q = loop_quiver(1)
        assert q.incidence() == [[0]]

    def test_double_path(self):
        inc = double_path_quiver().incidence()
        assert len(inc) == 4 and len(inc[0]) == 6
        for j in range(6):
            col = [inc[i][j] for i in range(4)]
            assert sorted(col) == [-1, 0, 0, 1]


class TestCanonicalWeight:
    def test_ladder(self):
        q = ladder_flag(2, 5)
        w = q.canonical_weight()
        assert w["p0"] == 5 and w["p1"] == -5
        assert w["v1_1"] == w["v2_1"] == 0

    def test_gamma_opp_is_zero(self):
        q = gamma_opp(3)
        assert set(q.canonical_weight().values()) == {0}

    def test_single_arrow(self):
        q = Quiver(("a", "b"), (Arrow("e", "a", "b"),))
        assert q.canonical_weight() == {"a": 1, "b": -1}

    def test_sums_to_zero(self, catalog):
        for q in catalog.values():
            assert sum(q.canonical_weight().values()) == 0

    def test_kernel_rank_formula(self, catalog):
        for q in catalog.values():
            comps = len(q.full().components())
            assert integer_kernel(q.incidence()).rank == \
                q.n_arrows - q.n_vertices + comps


class TestStability:
    def test_connected_canonical_stable(self, catalog):
        for name, q in catalog.items():
            if len(q.full().components()) == 1:
                assert is_stable(q.full(), q.canonical_weight()), name

    def test_single_arrow(self):
        q = Quiver(("a", "b"), (Arrow("e", "a", "b"),))
        assert is_stable(q.full(), {"a": 1, "b": -1})

    def test_two_isolated_vertices(self):
        q = Quiver(("a", "b"), ())
        theta = {"a": 0, "b": 0}
        assert is_semistable(q.full(), theta)
        assert not is_stable(q.full(), theta)
        assert is_polystable(q.full(), theta)

    def test_methods_agree_on_small_quivers(self, catalog):
        small = [q for q in catalog.values() if q.n_arrows <= 9]
        for q in small:
            theta = q.canonical_weight()
            for sub in all_subquivers(q):
                brute_stable = is_stable(sub, theta, method="bruteforce")
                assert is_stable(sub, theta, method="closure") == brute_stable
                brute_semi = is_semistable(sub, theta, method="bruteforce")
                assert is_semistable(sub, theta, method="closure") == brute_semi
                assert is_semistable(sub, theta, method="flow") == brute_semi
                assert is_polystable(sub, theta, method="components") == \
                    is_polystable(sub, theta, method="flow")

    def test_implication_chain(self, catalog):
        for q in (catalog["easy"], catalog["ladder25"], catalog["dbl2"]):
            theta = q.canonical_weight()
            for sub in all_subquivers(q):
                stable = is_stable(sub, theta)
                poly = is_polystable(sub, theta)
                semi = is_semistable(sub, theta)
                if stable:
                    assert len(sub.components()) == 1
                    assert poly
                if poly:
                    assert semi

    def test_easy_quiver_five_polystable(self):
        q = three_arrow_quiver()
        theta = q.canonical_weight()
        count = sum(1 for sub in all_subquivers(q)
                    if 0 < len(sub.arrows) < 3 and is_polystable(sub, theta))
        # two singletons and three pairs; the middle arrow alone fails
        assert count == 5


class TestMaximalPolystable:
    def test_idempotent(self, catalog):
        q = catalog["ladder25"]
        theta = q.canonical_weight()
        sub = q.full()
        top = maximal_polystable(sub, theta)
        assert top.arrows == maximal_polystable(top, theta).arrows

    def test_contains_every_polystable(self, catalog):
        for q in (catalog["easy"], catalog["ladder12"], catalog["q1"]):
            theta = q.canonical_weight()
            for sub in all_subquivers(q):
                if not is_semistable(sub, theta):
                    continue
                top = maximal_polystable(sub, theta)
                assert is_polystable(q.sub(top.arrows), theta)
                for inner in all_subquivers(q):
                    if inner.arrows <= sub.arrows and \
                            is_polystable(inner, theta):
                        assert inner.arrows <= top.arrows

    def test_two_disjoint_cycles(self):
        q = Quiver(("a", "b", "c", "d"),
                   (Arrow("e1", "a", "b"), Arrow("e2", "b", "a"),
                    Arrow("e3", "c", "d"), Arrow("e4", "d", "c")))
        theta = q.zero_weight()
        assert maximal_polystable(q.full(), theta).arrows == \
            frozenset({"e1", "e2", "e3", "e4"})

    def test_rejects_non_semistable(self):
        q = Quiver(("a", "b"), (Arrow("e", "a", "b"),))
        with pytest.raises(QuiverStructureError):
            maximal_polystable(q.sub(()), {"a": 1, "b": -1})


class TestContract:
    def test_whole_quiver(self):
        q = three_arrow_quiver()
        gamma, vmap = contract(q, q.full())
        assert gamma.n_vertices == 1 and gamma.n_arrows == 0

    def test_easy_two_arrows_leaves_loop(self):
        q = three_arrow_quiver()
        gamma, _ = contract(q, q.sub({"be", "ga"}))
        assert gamma.n_vertices == 1
        assert [a.name for a in gamma.arrows] == ["al"]
        assert gamma.arrows[0].tail == gamma.arrows[0].head

    def test_polystable_pushes_weight_to_zero(self, catalog):
        q = catalog["ladder25"]
        theta = q.canonical_weight()
        for sub in all_subquivers(q):
            if sub.arrows and is_polystable(sub, theta):
                _, _, pushed = contract(q, sub, theta)
                assert set(pushed.values()) == {0}


class TestTighten:
    def test_fixpoint_on_tight(self):
        q = ladder_flag(2, 5)
        theta = q.canonical_weight()
        assert is_tight(q, theta)
        tq, amap = tighten(q, theta)
        assert tq == q
        assert set(amap) == set(q.arrow_names())

    def test_merges_valence_one_inner_vertex(self):
        # flag-like quiver with an inner vertex of valence (1, 1)
        q = Quiver(("s", "m", "t"),
                   (Arrow("e1", "s", "m"), Arrow("e2", "m", "t"),
                    Arrow("e3", "s", "t")))
        theta = q.canonical_weight()
        tq, _ = tighten(q, theta)
        assert tq.n_vertices == 2
        assert is_tight(tq, tq.canonical_weight())

    def test_result_always_tight(self, catalog):
        for q in (catalog["q2"], catalog["easy"], catalog["dbl3"]):
            theta = q.canonical_weight()
            tq, _ = tighten(q, theta)
            pushed = tq.canonical_weight()
            assert is_tight(tq, pushed)

    def test_zero_tight_arrow_bound(self):
        # a 0-tight quiver on >= 2 vertices has >= 2 ins and outs per knot
        for q in (gamma_dbl(3), gamma_opp(3), gamma_dbl(2)):
            assert is_tight(q, q.zero_weight())
            loops = sum(1 for a in q.arrows if a.tail == a.head)
            assert q.n_arrows >= 2 * q.n_vertices + loops
            for v in q.vertices:
                ins = sum(1 for a in q.arrows if a.head == v and a.tail != v)
                outs = sum(1 for a in q.arrows if a.tail == v and a.head != v)
                assert ins >= 2 and outs >= 2

    def test_rejects_unstable(self):
        q = Quiver(("a", "b"), (Arrow("e", "a", "b"),))
        with pytest.raises(QuiverStructureError):
            tighten(q, {"a": -1, "b": 1})


class TestGenerators:
    def test_dbl2_equals_opp2(self):
        assert arrow_multiset(gamma_dbl(2)) == arrow_multiset(gamma_opp(2))
        q = gamma_dbl(2)
        assert q.n_vertices == 2 and q.n_arrows == 4
        assert all(a.tail != a.head for a in q.arrows)

    def test_opp1_two_loops(self):
        q = gamma_opp(1)
        assert q.n_vertices == 1 and q.n_arrows == 2
        assert all(a.tail == a.head for a in q.arrows)

    def test_dbl3_double_triangle(self):
        q = gamma_dbl(3)
        assert arrow_multiset(q) == {("1", "2"): 2, ("2", "3"): 2, ("3", "1"): 2}

    def test_perm_rejects_non_bijection(self):
        with pytest.raises(QuiverStructureError):
            gamma_perm(3, [1, 1, 2])

    def test_ladder_25(self):
        q = ladder_flag(2, 5)
        assert q.n_vertices == 4 and q.n_arrows == 9
        assert integer_kernel(q.incidence()).rank == 6
        flag = is_flag_quiver(q)
        assert flag.m == 5 and flag.multiplicities == (5,)

    def test_ladder_12(self):
        q = ladder_flag(1, 2)
        assert q.n_vertices == 2 and q.n_arrows == 2
        assert len({(a.tail, a.head) for a in q.arrows}) == 1

    def test_ladder_rejects_bad_args(self):
        with pytest.raises(QuiverStructureError):
            ladder_flag(5, 2)
        with pytest.raises(QuiverStructureError):
            ladder_flag(2, 2)

    def test_ladder_multi_sink(self):
        q = ladder_flag(1, 2, 3)
        flag = is_flag_quiver(q)
        assert flag is not None
        assert flag.m == 4 and sorted(flag.multiplicities) == [2, 2]
        assert is_tight(q, q.canonical_weight())


class TestFlagRecognition:
    def test_ladder_is_flag(self):
        flag = is_flag_quiver(ladder_flag(2, 5))
        assert flag.m == 5 and flag.sinks == ("p1",)

    def test_cycles_are_not(self):
        assert is_flag_quiver(gamma_dbl(3)) is None

    def test_multiplicity_one_sink(self):
        assert is_flag_quiver(path_quiver(3)) is None

    def test_fence_q2(self):
        assert is_flag_quiver(fence_q2()) is not None


class TestCycles:
    def test_easy_has_cycles(self):
        assert three_arrow_quiver().has_oriented_cycles()

    def test_flag_quivers_do_not(self, catalog):
        for name in ("ladder25", "q1", "q2", "q3", "q4", "ones", "oct"):
            assert not catalog[name].has_oriented_cycles()

    def test_loop_counts(self):
        assert loop_quiver(1).has_oriented_cycles()


class TestIsomorphism:
    def test_relabel(self):
        q = ladder_flag(2, 5)
        relabeled = Quiver(tuple(reversed(q.vertices)), q.arrows)
        assert quiver_isomorphic(q, relabeled)

    def test_not_isomorphic(self):
        assert not quiver_isomorphic(gamma_dbl(3), gamma_opp(3))
