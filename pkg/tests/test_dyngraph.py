import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dylp.dyngraph import (DynamicNetwork, Snapshot, build_network,
                           decode_pair_keys, pair_history,
                           was_previously_observed)
from dylp.errors import StructuralError


class TestBuildNetwork:
    def test_two_snapshots(self):
        net = build_network([(1, [(0, 1)]), (2, [(1, 2)])], directed=False)
        assert net.num_steps == 2
        assert net.seen_nodes(2).tolist() == [0, 1, 2]

    def test_self_loop_dropped_with_count(self):
        net = build_network([(1, [(0, 0), (0, 1)])], directed=False)
        assert net.self_loops_dropped == 1
        assert len(net.snapshot(1)) == 1

    def test_non_contiguous_steps_rejected(self):
        with pytest.raises(StructuralError):
            build_network([(1, [(0, 1)]), (3, [(1, 2)])], directed=False)

    def test_duplicate_steps_rejected(self):
        with pytest.raises(StructuralError):
            build_network([(1, [(0, 1)]), (1, [(1, 2)])], directed=False)

    def test_multiplicity_collapses(self):
        net = build_network([(1, [(0, 1), (1, 0), (0, 1)])], directed=False)
        assert len(net.snapshot(1)) == 1

    def test_directed_keeps_both_orientations(self):
        net = build_network([(1, [(0, 1), (1, 0)])], directed=True)
        assert len(net.snapshot(1)) == 2

    def test_directedness_mismatch_rejected(self):
        snap = Snapshot(1, frozenset({(0, 1)}), directed=True)
        with pytest.raises(StructuralError):
            DynamicNetwork([snap], num_nodes=2, directed=False)

    def test_unregistered_node_rejected(self):
        snap = Snapshot(1, frozenset({(0, 5)}), directed=False)
        with pytest.raises(StructuralError):
            DynamicNetwork([snap], num_nodes=2, directed=False)


class TestPairHistory:
    def test_union_persists_after_edge_vanishes(self):
        net = build_network([(1, [(0, 1)]), (2, []), (3, [])], directed=False)
        hist = pair_history(net, 3)
        assert (0, 1) in hist.union_edges

    def test_empty_network(self):
        net = build_network([(1, []), (2, [])], directed=False, num_nodes=4)
        hist = pair_history(net, 2)
        assert hist.union_edges == frozenset()
        assert hist.seen_nodes == frozenset()

    def test_cutoff_out_of_range(self):
        net = build_network([(1, [(0, 1)])], directed=False)
        with pytest.raises(ValueError):
            pair_history(net, 2)
        with pytest.raises(ValueError):
            pair_history(net, 0)


class TestWasPreviouslyObserved:
    def test_seen_pair(self):
        net = build_network([(1, [(0, 1)]), (2, [])], directed=False)
        hist = pair_history(net, 2)
        assert was_previously_observed(hist, (0, 1))
        assert was_previously_observed(hist, (1, 0))  # canonicalized

    def test_never_seen_pair(self):
        net = build_network([(1, [(0, 1)]), (2, [(1, 2)])], directed=False)
        assert not was_previously_observed(pair_history(net, 1), (0, 2))

    def test_directed_ordered_semantics(self):
        net = build_network([(1, [(0, 1)])], directed=True)
        hist = pair_history(net, 1)
        assert was_previously_observed(hist, (0, 1))
        assert not was_previously_observed(hist, (1, 0))

    def test_unregistered_endpoint_rejected(self):
        net = build_network([(1, [(0, 1)])], directed=False)
        with pytest.raises(ValueError):
            was_previously_observed(pair_history(net, 1), (0, 9))


def _random_network(rng, directed):
    n = int(rng.integers(3, 9))
    T = int(rng.integers(2, 5))
    snaps = []
    for t in range(1, T + 1):
        m = int(rng.integers(0, n))
        edges = [
            (int(rng.integers(0, n)), int(rng.integers(0, n))) for _ in range(m)
        ]
        edges = [(u, v) for u, v in edges if u != v]
        snaps.append((t, edges))
    return build_network(snaps, directed=directed, num_nodes=n)


class TestPartitionProperty:
    @pytest.mark.parametrize("directed", [False, True])
    def test_prev_xor_new_covers_universe(self, directed):
        rng = np.random.default_rng(0 if directed else 1)
        for _ in range(20):
            net = _random_network(rng, directed)
            for t in range(1, net.num_steps + 1):
                keys = net.candidate_pair_keys(t)
                union = net.union_keys(t)
                prev_mask = np.isin(keys, union)
                # union edges always sit inside the candidate universe
                assert prev_mask.sum() == union.size
                # the complement plus the prev set tile the universe
                assert prev_mask.sum() + (~prev_mask).sum() == keys.size

    def test_monotone_false_to_true(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            net = _random_network(rng, directed=False)
            histories = [pair_history(net, t) for t in range(1, net.num_steps + 1)]
            n = net.num_nodes
            for u in range(n):
                for v in range(u + 1, n):
                    flags = [was_previously_observed(h, (u, v)) for h in histories]
                    assert flags == sorted(flags)  # False before True only

    def test_candidate_keys_sorted_unique(self):
        rng = np.random.default_rng(3)
        for directed in (False, True):
            net = _random_network(rng, directed)
            for t in range(1, net.num_steps + 1):
                keys = net.candidate_pair_keys(t)
                assert np.all(np.diff(keys) > 0)
                seen = net.seen_nodes(t)
                k = seen.size
                expected = k * (k - 1) if directed else k * (k - 1) // 2
                assert keys.size == expected


@settings(max_examples=40, deadline=None)
@given(
    edges=st.lists(
        st.tuples(st.integers(0, 5), st.integers(0, 5)).filter(lambda e: e[0] != e[1]),
        max_size=8,
    ),
    later=st.lists(
        st.tuples(st.integers(0, 5), st.integers(0, 5)).filter(lambda e: e[0] != e[1]),
        max_size=8,
    ),
)
def test_undirected_canonicalization_property(edges, later):
    net = build_network([(1, edges), (2, later)], directed=False, num_nodes=6)
    hist = pair_history(net, 2)
    for u in range(6):
        for v in range(6):
            if u == v:
                continue
            assert was_previously_observed(hist, (u, v)) == was_previously_observed(
                hist, (v, u)
            )


def test_decode_roundtrip():
    net = build_network([(1, [(0, 3), (1, 2)])], directed=False, num_nodes=4)
    keys = net.edge_keys(1)
    u, v = decode_pair_keys(keys, 4)
    assert sorted(zip(u.tolist(), v.tolist())) == [(0, 3), (1, 2)]
