import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from swarmcomm.core import BeliefMatrix, Environment, SimParams
from swarmcomm.metrics import (
    BeliefHistogram,
    DegenerateEnvironmentError,
    best_path_matrix,
    belief_histogram,
    ccs,
    detection_probability,
    perf_agent,
    perf_agent_thresholded,
    perf_swarm,
    risk_rates,
    u_r,
)


def brute_best_paths(phi, max_hops):
    """Enumerate every walk of 1..max_hops edges between distinct endpoints."""
    n = phi.shape[0]
    best = np.zeros((n, n))
    for a in range(n):
        best[a, a] = 1.0
        for hops in range(1, max_hops + 1):
            for mids in itertools.product(range(n), repeat=hops - 1):
                for b in range(n):
                    path = (a, *mids, b)
                    if any(path[i] == path[i + 1] for i in range(hops)):
                        continue
                    prod = math.prod(phi[path[i], path[i + 1]] for i in range(hops))
                    best[a, b] = max(best[a, b], prod)
    return best


def sym3(x12, x23, x13):
    return np.array([[1, x12, x13], [x12, 1, x23], [x13, x23, 1]], dtype=float)


class TestPerformance:
    def test_all_ones(self):
        assert perf_agent(np.ones(5)) == 1.0
        assert perf_swarm(np.ones((5, 5))) == 1.0
        assert perf_swarm(np.ones((5, 5)), thresholded=True) == 1.0

    def test_small_rows(self):
        assert perf_agent([1, 0.5], beta=1) == pytest.approx(0.75)
        assert perf_agent([1, 0.5], beta=2) == pytest.approx(0.625)

    def test_thresholded_examples(self):
        row = np.array([1.0] + [0.9] * 5 + [0.1] * 14)
        assert perf_agent_thresholded(row, 0.75) == pytest.approx(5.5 / 6)
        lonely = np.array([1.0] + [0.1] * 19)
        assert perf_agent_thresholded(lonely, 0.75) == pytest.approx(1 / math.log(20))
        assert perf_agent_thresholded(np.ones(20), 0.75) == 1.0

    def test_identical_rows(self):
        row = np.array([1.0, 0.8, 0.3, 0.95])
        phi = np.tile(row, (4, 1))
        assert perf_swarm(phi, beta=2) == pytest.approx(perf_agent(row, 2))
        assert perf_swarm(phi, phi_T=0.75, thresholded=True) == pytest.approx(
            perf_agent_thresholded(row, 0.75)
        )

    @given(arrays(float, (6, 6), elements=st.floats(0, 1)))
    def test_beta_one_is_plain_mean(self, phi):
        np.fill_diagonal(phi, 1.0)
        assert perf_swarm(BeliefMatrix(phi)) == pytest.approx(phi.mean(), abs=1e-15)

    def test_range(self):
        rng = np.random.default_rng(0)
        phi = rng.random((8, 8))
        np.fill_diagonal(phi, 1.0)
        v = perf_agent(phi, 2.0)
        assert np.all(v >= 1 / 8) and np.all(v <= 1)


class TestRisk:
    def test_zero(self):
        per, total, norm = risk_rates(np.zeros(20), 100, SimParams())
        assert total == 0 and norm == 0 and np.all(per == 0)

    def test_reference_rate(self):
        p = SimParams(n=20, k_period=200)
        per, total, norm = risk_rates(np.full(20, 19 * 5), 200 * 5, p)
        assert norm == pytest.approx(1.0)
        assert total == pytest.approx(20 * 19 / 200)

    def test_xi_and_tau(self):
        p = SimParams(n=4, k_period=10, xi=2.0, tau=0.5)
        per, _, norm = risk_rates(np.array([3, 3, 3, 3]), 10, p)
        np.testing.assert_allclose(per, 2.0 * 3 / 5.0)
        assert norm == pytest.approx(1.0)

    def test_empty_window(self):
        with pytest.raises(ValueError):
            risk_rates(np.zeros(3), 0, SimParams(n=3, k_period=10))

    def test_detection(self):
        assert detection_probability(0.0, 1.0) == 0.0
        assert detection_probability(math.log(2), 1.0) == pytest.approx(0.5)
        p = detection_probability(0.01, 1.0)
        assert p == pytest.approx(0.00995, abs=5e-6) and abs(p - 0.01) / 0.01 < 0.005
        xs = np.linspace(0, 50, 200)
        ps = detection_probability(xs, 1.0)
        assert np.all(np.diff(ps) >= 0) and np.all(ps <= 1)
        with pytest.raises(ValueError):
            detection_probability(-1.0, 1.0)


class TestCCS:
    def test_complete(self):
        assert ccs(np.ones((3, 3)))

    def test_weak_chain(self):
        phi = sym3(0.8, 0.8, 0.1)
        assert best_path_matrix(phi)[0, 2] == pytest.approx(0.64)
        assert not ccs(phi, 0.75, 3)

    def test_strong_chain(self):
        phi = sym3(0.9, 0.9, 0.1)
        assert best_path_matrix(phi)[0, 2] == pytest.approx(0.81)
        assert ccs(phi, 0.75, 3)

    def test_hop_bound(self):
        # a 5-agent directed ring needs 4 hops to go backwards
        phi = np.eye(5)
        for i in range(5):
            phi[i, (i + 1) % 5] = 1.0
        assert not ccs(phi, 0.5, 3)
        assert ccs(phi, 0.5, 4)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 4), st.integers(1, 3), st.integers(0, 2**32 - 1))
    def test_matches_enumeration(self, n, hops, seed):
        phi = np.random.default_rng(seed).random((n, n))
        np.fill_diagonal(phi, 1.0)
        np.testing.assert_allclose(best_path_matrix(phi, hops), brute_best_paths(phi, hops), atol=1e-15)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0.3, 0.95))
    def test_monotone(self, seed, phi_T):
        rng = np.random.default_rng(seed)
        phi = rng.random((5, 5)) ** 0.3
        np.fill_diagonal(phi, 1.0)
        before = ccs(phi, phi_T)
        i, j = rng.integers(0, 5, 2)
        raised = phi.copy()
        raised[i, j] = min(1.0, raised[i, j] + rng.random())
        if before:
            assert ccs(raised, phi_T)
        if not before:
            assert not ccs(phi, min(phi_T + 0.01, 0.999))

    def test_more_hops_never_worse(self):
        rng = np.random.default_rng(2)
        phi = rng.random((7, 7))
        np.fill_diagonal(phi, 1.0)
        prev = best_path_matrix(phi, 1)
        for h in range(2, 6):
            cur = best_path_matrix(phi, h)
            assert np.all(cur >= prev)
            prev = cur

    @pytest.mark.parametrize("c", [0.5, 0.8])
    def test_uniform_complete_graph(self, c):
        phi = np.full((6, 6), c)
        np.fill_diagonal(phi, 1.0)
        for h in (1, 2, 3):
            assert ccs(phi, 0.75, h) == (c > 0.75)


class TestUr:
    def test_full(self):
        env = Environment(np.ones((4, 4)))
        assert u_r(np.ones((4, 4)), env, 0.75) == 1.0

    def test_half(self):
        env = Environment(np.ones((2, 2)))
        assert u_r(np.array([[1, 0.9], [0.1, 1]]), env, 0.75) == 0.5

    def test_degenerate(self):
        with pytest.raises(DegenerateEnvironmentError):
            u_r(np.ones((3, 3)), Environment(np.zeros((3, 3))), 0.75)


class TestHistogram:
    def test_single_bin(self):
        counts = belief_histogram([BeliefMatrix.floor(5, 0.1)] * 3, bins=50)
        assert np.count_nonzero(counts) == 1 and counts.sum() == 3 * 20

    def test_conservation(self):
        rng = np.random.default_rng(4)
        h = BeliefHistogram(17)
        for _ in range(11):
            h.add(rng.random((6, 6)))
        assert h.counts.sum() == 11 * 30 and np.all(h.counts >= 0)

    def test_edges_and_one(self):
        h = BeliefHistogram(4)
        phi = np.array([[1.0, 0.0], [1.0, 1.0]])
        h.add(phi)
        np.testing.assert_array_equal(h.counts, [1, 0, 0, 1])
        assert [r[:2] for r in h.rows()][0] == (0.0, 0.25)

    def test_bins(self):
        with pytest.raises(ValueError):
            BeliefHistogram(1)
