import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from girgnav.geometry import InvalidInputError, TorusPoint
from girgnav.model import (
    ModelParams,
    Vertex,
    build_graph,
    edge_probability,
    edge_probability_arrays,
    marginal_edge_probability_estimate,
    sample_edges,
    sample_edges_bruteforce,
    sample_graph,
    sample_vertices,
    sample_weight,
)
from girgnav.rngs import substream


def vertex(i, w, *coords):
    return Vertex(i, TorusPoint(coords), w)


class TestModelParams:
    @pytest.mark.parametrize("kw", [
        dict(n=-1), dict(d=0), dict(beta=2.0), dict(beta=3.0),
        dict(w_min=0.0), dict(alpha=1.0), dict(alpha=0.5),
        dict(kernel_c=0.0), dict(c1=0.0), dict(c1=2.0, c2=1.0),
    ])
    def test_rejects_invalid(self, kw):
        with pytest.raises(InvalidInputError):
            ModelParams(**{"n": 100, **kw})

    def test_accepts_threshold_regime(self):
        p = ModelParams(n=10, alpha=math.inf)
        assert math.isinf(p.alpha)


class TestSampleWeight:
    def test_uniform_one_gives_minimum(self):
        p = ModelParams(n=10, w_min=3.5)
        assert sample_weight(p, 1.0) == pytest.approx(3.5)

    def test_closed_form_inversion(self):
        # with exponent 3 (boundary value, direct formula check):
        # 0.25 = w**(1-3)  =>  w = 2
        p = ModelParams(n=10, beta=2.5, w_min=1.0)
        w = p.w_min * 0.25 ** (-1.0 / (3.0 - 1.0))
        assert w == pytest.approx(2.0)
        # the shipped sampler at its own exponent agrees with its formula
        assert sample_weight(p, 0.25) == pytest.approx(0.25 ** (-1 / 1.5))

    def test_rejects_out_of_range_uniform(self):
        p = ModelParams(n=10)
        for u in (0.0, -0.5, 1.5):
            with pytest.raises(InvalidInputError):
                sample_weight(p, u)

    def test_empirical_tail(self):
        p = ModelParams(n=10, beta=2.5, w_min=1.0)
        rng = np.random.default_rng(123)
        w = sample_weight(p, 1.0 - rng.random(10 ** 6))
        assert np.mean(w >= 4.0) == pytest.approx(0.125, abs=0.003)

    def test_tail_grid_within_four_sigma(self):
        p = ModelParams(n=10, beta=2.7, w_min=2.0)
        rng = np.random.default_rng(9)
        n_samples = 10 ** 6
        w = sample_weight(p, 1.0 - rng.random(n_samples))
        for wq in (2.5, 3.0, 5.0, 10.0, 30.0):
            tail = (wq / p.w_min) ** (1.0 - p.beta)
            se = math.sqrt(tail * (1 - tail) / n_samples)
            assert abs(float(np.mean(w >= wq)) - tail) < 4 * se

    @given(st.floats(min_value=1e-9, max_value=1.0),
           st.floats(min_value=2.01, max_value=2.99),
           st.floats(min_value=0.01, max_value=100))
    def test_support_and_monotonicity(self, u, beta, w_min):
        p = ModelParams(n=10, beta=beta, w_min=w_min)
        w = sample_weight(p, u)
        assert w >= w_min * (1 - 1e-12)
        assert sample_weight(p, min(1.0, u * 2)) <= w * (1 + 1e-12)


class TestSampleVertices:
    def test_zero_intensity(self):
        pos, w = sample_vertices(ModelParams(n=0, d=2))
        assert len(pos) == 0 and len(w) == 0

    def test_poisson_count_mean(self):
        counts = [
            len(sample_vertices(ModelParams(n=1000, seed=s))[1])
            for s in range(1000)
        ]
        mean = np.mean(counts)
        # Poisson(1000) mean over 1000 graphs: SE = sqrt(1000/1000)
        assert abs(mean - 1000) < 3 * math.sqrt(1000 / 1000) * math.sqrt(1000)

    def test_subregion_count_scales_with_volume(self):
        hits = []
        for s in range(400):
            pos, _ = sample_vertices(ModelParams(n=1000, d=2, seed=s))
            hits.append(int(np.sum(np.all(pos < 0.5, axis=1))))
        mean = np.mean(hits)
        se = math.sqrt(250 / 400)
        assert abs(mean - 250) < 4 * se

    def test_weights_at_least_minimum(self):
        pos, w = sample_vertices(ModelParams(n=500, w_min=2.5, seed=3))
        assert np.all(w >= 2.5)


class TestEdgeProbability:
    def test_threshold_boundary_connects(self):
        # distance**d exactly at the cutoff is inside the ball
        p = ModelParams(n=100, d=1, alpha=math.inf, c1=1.0, w_min=1.0)
        u = vertex(0, 5.0, 0.0)
        v = vertex(1, 4.0, 0.2)  # 0.2 = 1 * 5*4/(1*100)
        assert edge_probability(p, u, v) == 1.0
        v_far = vertex(1, 4.0, 0.2 + 1e-9)
        assert edge_probability(p, u, v_far) == 0.0

    def test_polynomial_decay_value(self):
        # q = 0.5 with exponent 2 gives probability 0.25
        p = ModelParams(n=100, d=1, alpha=2.0, kernel_c=1.0, w_min=1.0)
        u = vertex(0, 5.0, 0.0)
        v = vertex(1, 1.0, 0.1)  # q = 5/(100*0.1) = 0.5
        assert edge_probability(p, u, v) == pytest.approx(0.25)

    def test_polynomial_decay_caps_at_one(self):
        p = ModelParams(n=100, d=1, alpha=2.0, kernel_c=1.0, w_min=1.0)
        u = vertex(0, 100.0, 0.0)
        v = vertex(1, 1.0, 0.1)  # q = 10
        assert edge_probability(p, u, v) == 1.0

    def test_deterministic_short_edges_override(self):
        p = ModelParams(n=1000, d=1, alpha=2.0, kernel_c=0.001, c1=1.0,
                        ep3=True, w_min=1.0)
        u = vertex(0, 10.0, 0.0)
        v = vertex(1, 10.0, 0.05)  # inside the ball: 0.05 <= 100/1000
        assert edge_probability(p, u, v) == 1.0
        v_far = vertex(1, 10.0, 0.3)
        assert edge_probability(p, u, v_far) < 1.0

    def test_self_pair_rejected(self):
        p = ModelParams(n=100)
        u = vertex(0, 1.0, 0.5)
        with pytest.raises(InvalidInputError):
            edge_probability(p, u, u)

    @given(st.floats(min_value=1, max_value=50),
           st.floats(min_value=1, max_value=50),
           st.floats(min_value=1e-4, max_value=0.5),
           st.floats(min_value=1.01, max_value=10))
    def test_probability_in_unit_interval(self, wu, wv, dist, alpha):
        p = ModelParams(n=100, d=2, alpha=alpha)
        val = float(edge_probability_arrays(p, wu, wv, dist))
        assert 0.0 <= val <= 1.0


class TestMarginalEstimate:
    def test_heavy_pair_exceeds_ball_volume_bound(self):
        # always-connect ball of measure (2r)^d with r = (c1 q)^(1/d) / ... :
        # for d=1 the connect set has measure min(1, 2*c1*wu*wv/(w_min*n))
        p = ModelParams(n=100, d=1, alpha=math.inf, c1=1.0)
        est = marginal_edge_probability_estimate(p, 10.0, 2.0, trials=200_000)
        assert est == pytest.approx(min(1.0, 2 * 10 * 2 / 100), abs=0.01)

    def test_light_pair_vanishes(self):
        p = ModelParams(n=10 ** 9, d=2, alpha=math.inf)
        est = marginal_edge_probability_estimate(p, 1.0, 1.0, trials=10_000)
        assert est < 1e-6

    def test_rejects_zero_trials(self):
        with pytest.raises(InvalidInputError):
            marginal_edge_probability_estimate(ModelParams(n=10), 1, 1, trials=0)


class TestSampleGraph:
    def test_empty_graph(self):
        g = sample_graph(ModelParams(n=0, d=2))
        assert g.num_vertices == 0 and g.num_edges == 0

    def test_forced_edge_between_injected_vertices(self):
        p = ModelParams(n=5, d=1, alpha=2.0, kernel_c=1.0, seed=11)
        g = sample_graph(p, fixed_vertices=[(100.0, (0.1,)), (100.0, (0.11,))])
        assert 1 in g.neighbors(0)

    def test_symmetry_and_no_self_loops(self):
        for seed in range(5):
            g = sample_graph(ModelParams(n=300, d=2, alpha=2.0, seed=seed))
            for v in range(g.num_vertices):
                nbrs = g.neighbors(v)
                assert v not in nbrs
                assert np.all(np.diff(nbrs) > 0)  # sorted, no duplicates
                for u in nbrs:
                    assert v in g.neighbors(int(u))

    def test_determinism_byte_for_byte(self, tmp_path):
        from girgnav.io import write_girg_graph

        p = ModelParams(n=400, d=2, alpha=2.5, seed=42)
        f1, f2 = tmp_path / "a.txt", tmp_path / "b.txt"
        write_girg_graph(sample_graph(p), f1)
        write_girg_graph(sample_graph(p), f2)
        assert f1.read_bytes() == f2.read_bytes()

    def test_different_seed_changes_graph(self):
        a = sample_graph(ModelParams(n=400, d=1, seed=1))
        b = sample_graph(ModelParams(n=400, d=1, seed=2))
        assert a.num_vertices != b.num_vertices or not np.array_equal(a.indices, b.indices)


class TestFastSamplerMatchesBruteForce:
    """The bucketed cell sampler must realize the same pairwise-independent
    distribution as the quadratic one-coin-per-pair reference."""

    @pytest.mark.parametrize("params", [
        ModelParams(n=60, d=1, beta=2.5, alpha=math.inf, c1=0.5),
        ModelParams(n=60, d=2, beta=2.5, alpha=2.0, kernel_c=1.0),
        ModelParams(n=60, d=1, beta=2.2, alpha=1.5, kernel_c=0.5, ep3=True, c1=0.3, c2=0.3),
    ])
    def test_edge_frequency_agreement(self, params):
        rng = substream(5, 77)
        n_pts = 40
        positions = rng.random((n_pts, params.d))
        weights = np.asarray(sample_weight(params, 1.0 - rng.random(n_pts)))
        reps = 400
        counts_fast = np.zeros((n_pts, n_pts))
        exact_p = np.zeros((n_pts, n_pts))
        from girgnav.geometry import torus_distance_arrays

        for u in range(n_pts):
            d = torus_distance_arrays(positions[u], positions)
            exact_p[u] = edge_probability_arrays(params, weights[u], weights, d)
        for rep in range(reps):
            e = sample_edges(params, weights, positions, seed=rep)
            for u, v in e:
                counts_fast[u, v] += 1
                counts_fast[v, u] += 1
        for u in range(n_pts):
            for v in range(u + 1, n_pts):
                p = exact_p[u, v]
                se = math.sqrt(max(p * (1 - p), 1e-12) / reps)
                obs = counts_fast[u, v] / reps
                if p in (0.0, 1.0):
                    assert obs == p
                else:
                    assert abs(obs - p) < 5 * se + 1e-9

    def test_deterministic_pairs_always_match_reference(self):
        params = ModelParams(n=50, d=1, alpha=math.inf, c1=1.0, seed=4)
        rng = substream(4, 88)
        positions = rng.random((45, 1))
        weights = np.asarray(sample_weight(params, 1.0 - rng.random(45)))
        fast = sample_edges(params, weights, positions, seed=0)
        ref = sample_edges_bruteforce(params, weights, positions, seed=0)
        canon = lambda e: set(map(tuple, np.sort(e, axis=1)))
        # the threshold regime is fully deterministic: exact equality
        assert canon(fast) == canon(ref)


class TestBuildGraph:
    def test_csr_layout(self):
        p = ModelParams(n=4)
        pos = np.array([[0.1], [0.2], [0.3], [0.4]])
        w = np.ones(4)
        edges = np.array([[0, 2], [2, 1]])
        g = build_graph(p, pos, w, edges)
        assert list(g.neighbors(2)) == [0, 1]
        assert list(g.neighbors(0)) == [2]
        assert g.degree(3) == 0
        assert g.num_edges == 2

    def test_vertex_accessor(self):
        p = ModelParams(n=2)
        g = build_graph(p, np.array([[0.25]]), np.array([3.0]),
                        np.empty((0, 2), dtype=np.int64))
        v = g.vertex(0)
        assert v.weight == 3.0 and v.pos.coords == (0.25,)
