import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hetring import (ActiveSet, BudgetExceededError, DomainError, FixedPoint, StabilityRegimeError, UnsupportedError,
                     build_network, classify_symmetric, connections_from, cycle_from_labels, enumerate_cycles,
                     fixed_points, from_edges, independent_sets, linearization_eigenvalues, lucas, make_ring,
                     maximally_active)

R, GAMMA = 2.0, 3.04


def oracle_targets(g, active):
    """Connections derived by hand: each uninhibited inactive node b enters and knocks out the actives it inhibits."""
    active = set(active)
    out = {}
    for b in range(1, g.n + 1):
        if b in active or any(g.inhibits(a, b) for a in active):
            continue
        out[b] = tuple(sorted((active - {t for t in active if g.inhibits(b, t)}) | {b}))
    return out


def labels(cycle):
    return [fp.active.members for fp in cycle.fixed_points]


class TestFixedPoints:
    def test_seven_one_census(self):
        sizes = [fp.size for fp in fixed_points(make_ring(7, 1), 2.0)]
        assert [sizes.count(k) for k in (1, 2, 3)] == [7, 14, 7]
        assert 0 not in sizes

    def test_five_two_singletons_only(self):
        fps = fixed_points(make_ring(5, 2), 2.0)
        assert [fp.active.members for fp in fps] == [(k,) for k in range(1, 6)]

    def test_three_one(self):
        fps = fixed_points(make_ring(3, 1), 2.0)
        assert [fp.active.members for fp in fps] == [(1,), (2,), (3,)]
        assert all(fp.xhat == 0.5 for fp in fps)
        assert np.array_equal(fps[0].state(), [0.5, 0, 0])

    def test_origin_on_request(self):
        fps = fixed_points(make_ring(5, 1), 2.0, include_origin=True)
        assert fps[0].active.members == () and fps[0].label == "origin"

    @pytest.mark.parametrize("r", [1.0, 0.5, -2.0])
    def test_r_at_most_one_rejected(self, r):
        with pytest.raises(DomainError):
            fixed_points(make_ring(5, 1), r)

    @pytest.mark.parametrize("n", range(3, 16))
    def test_lucas_with_origin(self, n):
        assert len(fixed_points(make_ring(n, 1), 2.5, include_origin=True)) == lucas(n)


class TestLinearization:
    def test_five_one_single(self):
        g = make_ring(5, 1)
        fp = FixedPoint(ActiveSet((1,)), 2.0, 5)
        vals = {k: (v, c) for k, v, c in linearization_eigenvalues(g, fp, 2.0, 3.04)}
        assert vals[1] == (0.0, "active")
        assert vals[2][1] == "suppressed"
        assert vals[2][0] == pytest.approx(2 * math.exp(-1.52), rel=1e-14)
        assert all(vals[k] == (2.0, "growing") for k in (3, 4, 5))

    def test_gamma_zero_uncoupled(self):
        g = make_ring(7, 2)
        fp = FixedPoint(ActiveSet((1, 4)), 2.5, 7)
        for k, v, c in linearization_eigenvalues(g, fp, 2.5, 0.0):
            assert v == pytest.approx(2.0 - 2.5 if c == "active" else 2.5)

    def test_saddle(self):
        assert 2.0 * math.exp(-3.04 * 0.5) < 1

    def test_suppression_number_two(self):
        # a node with two active inhibitors decays twice as fast in log terms
        g = from_edges(3, [(1, 3), (2, 3)])
        fp = FixedPoint(ActiveSet((1, 2)), 2.0, 3)
        vals = {k: v for k, v, _ in linearization_eigenvalues(g, fp, 2.0, 1.0)}
        assert vals[3] == pytest.approx(2.0 * math.exp(-2 * 1.0 * 0.5))

    def test_negative_gamma_rejected(self):
        g = make_ring(5, 1)
        with pytest.raises(DomainError):
            linearization_eigenvalues(g, FixedPoint(ActiveSet((1,)), 2.0, 5), 2.0, -1.0)


class TestConnections:
    def test_five_one_from_single(self):
        g = make_ring(5, 1)
        got = {c.target.active.members: c for c in connections_from(g, FixedPoint(ActiveSet((1,)), R, 5), R, GAMMA)}
        assert set(got) == {(5,), (1, 3), (1, 4)}
        assert got[(5,)].entering == 5 and got[(5,)].displaced.members == (1,)
        assert got[(5,)].kind == (1, 1)
        assert got[(1, 3)].kind == (1, 2) and got[(1, 4)].kind == (1, 2)

    def test_five_one_from_pair(self):
        g = make_ring(5, 1)
        conns = connections_from(g, FixedPoint(ActiveSet((1, 3)), R, 5), R, GAMMA)
        assert [(c.entering, c.target.active.members) for c in conns] == [(5, (3, 5))]

    def test_six_one_triple_is_sink(self):
        g = make_ring(6, 1)
        assert connections_from(g, FixedPoint(ActiveSet((1, 3, 5)), R, 6), R, GAMMA) == []

    def test_six_one_single_targets(self):
        g = make_ring(6, 1)
        targets = {c.target.active.members for c in connections_from(g, FixedPoint(ActiveSet((1,)), R, 6), R, GAMMA)}
        assert targets == {(6,), (1, 3), (1, 4), (1, 5)}

    def test_not_saddle_rejected(self):
        g = make_ring(5, 1)
        with pytest.raises(StabilityRegimeError):
            connections_from(g, FixedPoint(ActiveSet((1,)), R, 5), R, 1.0)
        with pytest.raises(StabilityRegimeError):
            build_network(g, R, math.log(2) / 0.5)

    @given(st.integers(3, 11).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, (n - 1) // 2))),
           st.floats(1.2, 3.0))
    def test_matches_oracle_and_invariants(self, nm, r):
        n, m = nm
        g = make_ring(n, m)
        gamma = 1.01 * math.log(r) / ((r - 1) / r) + 0.1
        net = build_network(g, r, gamma)
        for fp in net.fixed_points:
            want = oracle_targets(g, fp.active.members)
            got = {c.entering: c.target.active.members for c in net.outgoing(fp)}
            assert got == want
            for c in net.outgoing(fp):
                tgt = (set(fp.active.members) | {c.entering}) - set(c.displaced.members)
                assert set(c.target.active.members) == tgt
                assert c.kind[1] == c.kind[0] - len(c.displaced) + 1
                if m == 1:
                    assert c.kind[1] >= c.kind[0]
                    assert len(c.displaced) <= 1
        sinks = {fp.active for fp in net.sinks}
        assert sinks == {fp.active for fp in net.fixed_points if not oracle_targets(g, fp.active.members)}

    @given(st.integers(3, 10).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, (n - 1) // 2),
                                                          st.integers(1, n - 1))))
    def test_rotation_equivariance(self, nms):
        n, m, s = nms
        g = make_ring(n, m)
        net = build_network(g, 2.0, 4.0)
        edges = {(c.source.active.members, c.target.active.members) for c in net.connections}
        keys = {fp.active.members for fp in net.fixed_points}
        for a, b in edges:
            assert g.rotate(a, s) in keys
            assert (g.rotate(a, s), g.rotate(b, s)) in edges


class TestBuildNetwork:
    def test_five_one(self):
        net = build_network(make_ring(5, 1), R, GAMMA)
        assert net.census() == {1: 5, 2: 5}
        kinds = [c.kind for c in net.connections]
        assert kinds.count((1, 1)) == 5 and kinds.count((1, 2)) == 10 and kinds.count((2, 2)) == 5
        assert len(net.connections) == 20
        assert net.sinks == []

    def test_seven_two(self):
        net = build_network(make_ring(7, 2), R, GAMMA)
        assert net.census() == {1: 7, 2: 7}
        cycles = enumerate_cycles(net)
        for j in (1, 2):
            assert any(c.j == j and len(c) == 7 and c.symmetric for c in cycles)

    def test_six_one(self):
        net = build_network(make_ring(6, 1), R, GAMMA)
        assert net.census() == {1: 6, 2: 9, 3: 2}
        assert sorted(fp.active.members for fp in net.sinks) == [(1, 3, 5), (2, 4, 6)]
        # single-active points reach their predecessor and three pairs
        for fp in net.fixed_points[:6]:
            j = fp.active.members[0]
            want = {((j - 2) % 6 + 1,)} | {tuple(sorted((j, (j + d - 1) % 6 + 1))) for d in (2, 3, 4)}
            assert {c.target.active.members for c in net.outgoing(fp)} == want
        # pair level: no cycle is symmetric
        pair_cycles = [c for c in enumerate_cycles(net) if c.j == 2]
        assert pair_cycles and not any(c.symmetric for c in pair_cycles)

    def test_five_two(self):
        net = build_network(make_ring(5, 2), R, GAMMA)
        assert len(net.fixed_points) == 5 and len(net.connections) == 10
        assert all(len(net.outgoing(fp)) == 2 for fp in net.fixed_points)


class TestEnumerateCycles:
    def test_five_one_two_cycles(self):
        cycles = enumerate_cycles(build_network(make_ring(5, 1), R, GAMMA))
        assert len(cycles) == 2
        assert sorted(c.j for c in cycles) == [1, 2]
        assert all(len(c) == 5 and c.symmetric for c in cycles)

    def test_five_two_has_both_published_cycles(self):
        net = build_network(make_ring(5, 2), R, GAMMA)
        found = [labels(c) for c in enumerate_cycles(net)]
        assert [(1,), (5,), (4,), (3,), (2,)] in found
        assert [(1,), (4,), (2,), (5,), (3,)] in found

    def test_sink_only_network(self):
        net = build_network(from_edges(2, []), R, GAMMA)
        assert enumerate_cycles(net) == []

    def test_budget(self):
        net = build_network(make_ring(7, 1), R, GAMMA)
        with pytest.raises(BudgetExceededError):
            enumerate_cycles(net, budget=3)

    def test_max_len(self):
        net = build_network(make_ring(7, 1), R, GAMMA)
        assert all(len(c) <= 4 for c in enumerate_cycles(net, max_len=4))

    def test_deterministic(self):
        net = build_network(make_ring(7, 1), R, GAMMA)
        assert [labels(c) for c in enumerate_cycles(net)] == [labels(c) for c in enumerate_cycles(net)]

    @given(st.sampled_from([(5, 1), (6, 1), (7, 1), (7, 2), (8, 3)]))
    def test_cycles_are_simple_and_closed(self, nm):
        net = build_network(make_ring(*nm), R, GAMMA)
        edges = {(c.source.active, c.target.active) for c in net.connections}
        for cyc in enumerate_cycles(net, max_len=8):
            nodes = [fp.active for fp in cyc.fixed_points]
            assert len(set(nodes)) == len(nodes)
            for i, c in enumerate(cyc.path):
                assert (c.source.active, c.target.active) in edges
                assert c.target.active == cyc.path[(i + 1) % len(cyc)].source.active


class TestClassifySymmetric:
    def test_five_one_pairs_case_i(self):
        net = build_network(make_ring(5, 1), R, GAMMA)
        pair = next(c for c in enumerate_cycles(net) if c.j == 2)
        cls = classify_symmetric(pair, net.graph)
        assert (cls.kind, cls.param) == ("case_i", 2)

    def test_seven_one_j_j3_cycle(self):
        net = build_network(make_ring(7, 1), R, GAMMA)
        cyc = cycle_from_labels(net, [(1, 4), (4, 7), (3, 7), (3, 6), (2, 6), (2, 5), (1, 5)])
        assert cyc.symmetric and cyc.rotation == 3
        cls = classify_symmetric(cyc, net.graph)
        # 7 = 4*2 - 1 and also 7 = 3*2 + 1; both conditions hold at j = 2
        assert ("case_ii", 4) in ((cls.kind, cls.param),) + cls.equivalent

    def test_seven_one_triples_case_ii(self):
        net = build_network(make_ring(7, 1), R, GAMMA)
        cyc = cycle_from_labels(net, [(1, 3, 5), (3, 5, 7), (2, 5, 7), (2, 4, 7), (2, 4, 6), (1, 4, 6), (1, 3, 6)])
        cls = classify_symmetric(cyc, net.graph)
        assert cyc.symmetric and (cls.kind, cls.param) == ("case_i", 2)

    def test_six_one_pairs_none(self):
        net = build_network(make_ring(6, 1), R, GAMMA)
        for cyc in enumerate_cycles(net):
            if cyc.j == 2:
                assert classify_symmetric(cyc, net.graph).kind == "none"

    def test_single_node(self):
        net = build_network(make_ring(6, 1), R, GAMMA)
        cyc = next(c for c in enumerate_cycles(net) if c.j == 1)
        assert classify_symmetric(cyc, net.graph).kind == "single_node"

    def test_non_ring_unsupported(self):
        g = from_edges(4, [(1, 2), (2, 3), (3, 4), (4, 1), (1, 3)])
        net = build_network(g, R, GAMMA)
        cyc = enumerate_cycles(net)[0]
        with pytest.raises(UnsupportedError):
            classify_symmetric(cyc, g)

    @pytest.mark.parametrize("n", range(5, 12))
    def test_arithmetic_and_rotation(self, n):
        net = build_network(make_ring(n, 1), R, GAMMA)
        for cyc in enumerate_cycles(net, max_len=n):
            cls = cyc.symmetry_class
            if cls.kind == "case_i":
                assert n == cls.param * cyc.j + 1 and cls.param >= 2 and cyc.symmetric
            elif cls.kind == "case_ii":
                assert n == cls.param * cyc.j - 1 and cls.param >= 3 and cyc.symmetric


class TestMaximallyActive:
    @pytest.mark.parametrize("nm,jmax,verdict", [
        ((6, 1), 3, "all_sinks"), ((7, 1), 3, "single_cycle"), ((5, 2), 1, "network(2)"),
        ((8, 1), 4, "all_sinks"), ((9, 2), 3, "all_sinks"), ((10, 2), 3, "single_cycle"),
    ])
    def test_examples(self, nm, jmax, verdict):
        res = maximally_active(make_ring(*nm))
        assert (res.j_max, str(res)) == (jmax, verdict)

    @pytest.mark.parametrize("n", range(3, 16))
    def test_m1_formula(self, n):
        res = maximally_active(make_ring(n, 1))
        assert res.j_max == n // 2
        assert res.verdict == ("all_sinks" if n % 2 == 0 else "single_cycle")

    @pytest.mark.parametrize("nm", [(6, 1), (8, 1), (9, 2), (8, 3)])
    def test_all_sinks_really_are_sinks(self, nm):
        g = make_ring(*nm)
        net = build_network(g, R, GAMMA)
        jmax = maximally_active(g).j_max
        top = [fp for fp in net.fixed_points if fp.size == jmax]
        assert all(not net.outgoing(fp) for fp in top)

    def test_non_ring(self):
        with pytest.raises(UnsupportedError):
            maximally_active(from_edges(3, [(1, 2)]))
