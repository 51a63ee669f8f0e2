import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hetring import (ActiveSet, DomainError, ValidationError, from_adjacency, from_edges, independent_sets,
                     is_independent, lucas, make_ring, suppression_profile)


def brute_independent(g):
    out = []
    for size in range(g.n + 1):
        for combo in itertools.combinations(range(1, g.n + 1), size):
            if all(not g.inhibits(a, b) for a in combo for b in combo):
                out.append(combo)
    return out


def lucas_oracle(n):
    # closed form with the golden ratio: L_n = phi^n + (-phi)^-n
    phi = (1 + 5 ** 0.5) / 2
    return round(phi ** n + (-phi) ** -n)


class TestMakeRing:
    def test_five_one_has_predecessor_pattern(self):
        g = make_ring(5, 1)
        assert g.edge_count == 5
        for k in range(1, 6):
            assert g.inhibits((k - 2) % 5 + 1, k)

    def test_five_two_each_node_has_two_predecessors(self):
        g = make_ring(5, 2)
        for k in range(1, 6):
            assert set(g.inhibitors(k)) == {(k - 2) % 5 + 1, (k - 3) % 5 + 1}

    def test_three_one_is_cyclic(self):
        g = make_ring(3, 1)
        assert g.edges() == [(1, 2), (2, 3), (3, 1)]

    @pytest.mark.parametrize("n,m", [(2, 1), (4, 2), (6, 3), (5, 0), (1, 1)])
    def test_rejects_bad_sizes(self, n, m):
        with pytest.raises(DomainError):
            make_ring(n, m)

    @given(st.integers(3, 30).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, (n - 1) // 2))))
    def test_ring_rule(self, nm):
        n, m = nm
        g = make_ring(n, m)
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                assert g.inhibits(a, b) == ((b - a) % n in range(1, m + 1))
        assert g.ring_m == m
        assert not g.adj.diagonal().any()


class TestFromAdjacency:
    def test_cyclic_matrix_equals_ring(self):
        a = np.zeros((3, 3), dtype=bool)
        a[0, 1] = a[1, 2] = a[2, 0] = True
        assert from_adjacency(a) == make_ring(3, 1)

    def test_self_loop_rejected(self):
        with pytest.raises(ValidationError):
            from_adjacency([[1, 0], [0, 0]])

    def test_non_square_rejected(self):
        with pytest.raises(ValidationError):
            from_adjacency([[0, 1, 0], [0, 0, 1]])

    def test_edgeless_two_node_graph(self):
        g = from_adjacency(np.zeros((2, 2), dtype=bool))
        assert g.n == 2 and g.edge_count == 0
        assert not g.is_ring

    def test_edges_out_of_range(self):
        with pytest.raises(ValidationError):
            from_edges(3, [(1, 4)])

    def test_adjacency_is_read_only(self):
        g = make_ring(5, 1)
        with pytest.raises(ValueError):
            g.adj[0, 0] = True


class TestIndependentSets:
    def test_five_one_gives_eleven(self):
        assert len(independent_sets(make_ring(5, 1))) == 11

    def test_six_one_breakdown(self):
        sizes = [len(z) for z in independent_sets(make_ring(6, 1))]
        assert len(sizes) == 18
        assert [sizes.count(k) for k in range(4)] == [1, 6, 9, 2]

    def test_edgeless_two_node_power_set(self):
        g = from_adjacency(np.zeros((2, 2), dtype=bool))
        assert [z.members for z in independent_sets(g)] == [(), (1,), (2,), (1, 2)]

    @pytest.mark.parametrize("n", range(3, 21))
    def test_lucas_counts(self, n):
        count = len(independent_sets(make_ring(n, 1)))
        assert count == lucas(n) == lucas_oracle(n)

    def test_cap_is_explicit(self):
        with pytest.raises(DomainError):
            independent_sets(make_ring(25, 1))
        assert len(independent_sets(make_ring(25, 1), max_nodes=25)) == lucas(25)

    @given(st.integers(1, 8), st.data())
    def test_matches_brute_force_on_random_digraphs(self, n, data):
        bits = data.draw(st.lists(st.booleans(), min_size=n * n, max_size=n * n))
        a = np.array(bits, dtype=bool).reshape(n, n)
        np.fill_diagonal(a, False)
        g = from_adjacency(a)
        got = [z.members for z in independent_sets(g)]
        want = brute_independent(g)
        assert sorted(got) == sorted(want)
        assert got == sorted(got, key=lambda s: (len(s), s))
        assert all(is_independent(g, z) for z in got)


class TestSuppressionProfile:
    def test_five_one_single(self):
        p = suppression_profile(make_ring(5, 1), ActiveSet((1,)))
        assert p.suppressed == {2: 1}
        assert p.growing == (3, 4, 5)

    def test_five_two_single(self):
        p = suppression_profile(make_ring(5, 2), ActiveSet((1,)))
        assert p.suppressed == {2: 1, 3: 1}
        assert p.growing == (4, 5)

    def test_empty_active_set(self):
        g = make_ring(7, 2)
        p = suppression_profile(g, ActiveSet(()))
        assert p.suppressed == {} and p.growing == tuple(range(1, 8))

    def test_non_independent_rejected(self):
        with pytest.raises(DomainError):
            suppression_profile(make_ring(5, 1), (1, 2))

    def test_suppression_number_counts_inhibitors(self):
        # node 3 of the (7,2)-ring is inhibited by both 1 and 2; {1, 5} leaves it with one
        p = suppression_profile(make_ring(7, 2), (1, 4))
        assert p.suppressed == {2: 1, 3: 1, 5: 1, 6: 1}
        p = suppression_profile(make_ring(9, 3), (1, 5))
        assert p.suppressed[2] == 1 and p.suppressed[6] == 1 and p.suppressed[7] == 1

    @given(st.integers(3, 14).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, (n - 1) // 2))), st.data())
    def test_partition_and_rotation(self, nm, data):
        n, m = nm
        g = make_ring(n, m)
        z = data.draw(st.sampled_from(independent_sets(g)))
        p = suppression_profile(g, z)
        parts = set(z.members) | set(p.suppressed) | set(p.growing)
        assert parts == set(range(1, n + 1))
        assert len(z) + len(p.suppressed) + len(p.growing) == n
        assert all(v >= 1 for v in p.suppressed.values())
        if m == 1:
            assert len(p.suppressed) == len(z)
            assert set(p.suppressed.values()) <= {1}
        shift = data.draw(st.integers(1, n - 1))
        rot = suppression_profile(g, g.rotate(z, shift))
        assert rot.suppressed == {(k - 1 + shift) % n + 1: v for k, v in p.suppressed.items()}
        assert set(rot.growing) == set(g.rotate(p.growing, shift))
