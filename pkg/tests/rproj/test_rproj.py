import time
import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from export.binary_io import ArtifactFormatError, TruncatedFileError
from graph.transition import transition_matrix
from rproj.config import ProjectionConfig
from rproj.initialization import degree_scaling, init_projection
from rproj.initializers.counter import counter_uniforms
from rproj.propagation import MemoryBudgetError, propagate, propagate_matrix, required_bytes
from rproj.storage import ProjectionDigestWarning, load_projections, save_projections
from tests.helpers import complete_graph, graph_from_pairs, path_graph, random_graph


def exact_config(n, max_power):
    return ProjectionConfig(dim=n, max_power=max_power, init='identity', dtype='float64')


class TestProjectionConfig:
    @pytest.mark.parametrize("kwargs", [
        {'dim': 0}, {'max_power': -1}, {'init': 'uniforme'}, {'init': 'sparse', 'sparsity': 0},
        {'normalization': 'l2'}, {'seed': -1}, {'dtype': 'float16'},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            ProjectionConfig(**kwargs)

    def test_dot_scale(self):
        assert ProjectionConfig(dim=64).dot_scale == pytest.approx(1.0)
        assert ProjectionConfig(dim=64, init='sparse').dot_scale == pytest.approx(1 / 64)

    def test_digest_stable(self):
        assert ProjectionConfig(seed=3).digest() == ProjectionConfig(seed=3).digest()
        assert ProjectionConfig(seed=3).digest() != ProjectionConfig(seed=4).digest()


class TestInitProjection:
    def test_counter_uniforms_position_independent(self):
        whole = counter_uniforms(11, 0, 40)
        assert_array_equal(counter_uniforms(11, 13, 20), whole[13:33])
        assert np.all((whole > 0) & (whole < 1))

    def test_entry_depends_only_on_seed_and_position(self):
        config = ProjectionConfig(dim=16, seed=5, dtype='float64')
        small = init_projection(10, config)
        large = init_projection(5000, config)
        assert_array_equal(small, large[:10])
        assert_array_equal(small, init_projection(10, config))

    def test_gaussian_moments(self):
        config = ProjectionConfig(dim=128, seed=1, dtype='float64')
        values = init_projection(7813, config).ravel()
        sigma = np.sqrt(1 / 128)
        assert abs(values.mean()) <= 4e-3 * sigma
        assert values.var() == pytest.approx(1 / 128, rel=0.05)

    def test_sparse_values(self):
        config = ProjectionConfig(dim=100, init='sparse', sparsity=3, seed=2, dtype='float64')
        values = init_projection(1000, config).ravel()
        assert set(np.unique(values)) <= {-np.sqrt(3), 0.0, np.sqrt(3)}
        assert np.mean(values == 0) == pytest.approx(2 / 3, abs=0.01)

    def test_moment_identity(self):
        n, dim, seeds = 30, 128, 200
        diag, off = [], []
        mask = ~np.eye(n, dtype=bool)
        for seed in range(seeds):
            r0 = init_projection(n, ProjectionConfig(dim=dim, seed=seed, dtype='float64'))
            gram = r0 @ r0.T
            diag.append(np.diag(gram))
            off.append(gram[mask])
        assert abs(np.mean(diag) - 1) <= 4 * np.sqrt(2 / dim) / np.sqrt(seeds)
        assert abs(np.mean(off)) <= 4 * np.sqrt(1 / dim) / np.sqrt(seeds)

    def test_degree_scaling(self):
        scale = degree_scaling(np.array([2.0, 0.0, 4.0]), edge_count=3, beta=-0.9)
        assert_allclose(scale, [(2 / 6) ** -0.9, 1.0, (4 / 6) ** -0.9])

    def test_degree_normalization_scales_rows(self):
        g = graph_from_pairs(4, [(0, 1), (1, 2)])
        base = ProjectionConfig(dim=8, seed=4, dtype='float64')
        normalized = ProjectionConfig(dim=8, seed=4, dtype='float64', normalization='degree')
        plain = init_projection(4, base)
        scaled = init_projection(4, normalized, degrees=g.degrees(), edge_count=g.edge_count)
        expected = plain * degree_scaling(g.degrees(), g.edge_count, -0.9)[:, None]
        assert_allclose(scaled, expected)
        assert_array_equal(scaled[3], plain[3])

    def test_degree_normalization_requires_degrees(self):
        with pytest.raises(ValueError):
            init_projection(4, ProjectionConfig(dim=4, normalization='degree'))

    def test_identity_requires_square(self):
        with pytest.raises(ValueError):
            init_projection(5, ProjectionConfig(dim=4, init='identity'))


class TestPropagate:
    def test_exact_mode_matches_matrix_powers(self):
        g = random_graph(40, 0.1, seed=8)
        t = transition_matrix(g)
        ps = propagate(t, exact_config(40, 5))
        dense = t.to_dense()
        power = np.eye(40)
        for k in range(6):
            assert_allclose(ps.power(k), power, atol=1e-12)
            power = dense @ power

    def test_path_two_steps(self):
        ps = propagate(transition_matrix(path_graph(3)), exact_config(3, 2))
        assert_allclose(ps.power(2)[0], [0.5, 0.0, 0.5], atol=1e-15)

    def test_zero_powers(self):
        ps = propagate(transition_matrix(path_graph(3)), ProjectionConfig(dim=4, max_power=0))
        assert ps.matrices.shape == (1, 3, 4)

    def test_chain_consistency(self):
        t = transition_matrix(random_graph(30, 0.2, seed=2))
        ps = propagate(t, ProjectionConfig(dim=16, max_power=4, dtype='float64'))
        for k in range(1, 5):
            assert_allclose(t.to_dense() @ ps.power(k - 1), ps.power(k), atol=1e-9)

    def test_linearity(self):
        t = transition_matrix(random_graph(25, 0.2, seed=6))
        rng = np.random.default_rng(0)
        r1, r2 = rng.normal(size=(25, 6)), rng.normal(size=(25, 6))
        combined = propagate_matrix(t, 2.0 * r1 - 0.5 * r2, 4)
        separate = 2.0 * propagate_matrix(t, r1, 4) - 0.5 * propagate_matrix(t, r2, 4)
        assert_allclose(combined, separate, atol=1e-9)

    def test_constant_columns_preserved(self):
        g = graph_from_pairs(8, [(0, 1), (1, 2), (2, 3), (4, 5)])
        r0 = np.tile([1.0, -2.0, 3.5], (8, 1))
        matrices = propagate_matrix(transition_matrix(g), r0, 5)
        for k in range(6):
            assert_allclose(matrices[k], r0, atol=1e-12)

    @pytest.mark.parametrize("threads", [2, 3, 8])
    def test_threads_do_not_change_results(self, threads):
        t = transition_matrix(random_graph(200, 0.03, seed=9))
        config = ProjectionConfig(dim=32, max_power=4, seed=3)
        assert_array_equal(propagate(t, config, threads=1).matrices,
                           propagate(t, config, threads=threads).matrices)

    def test_memory_budget(self):
        t = transition_matrix(complete_graph(10))
        config = ProjectionConfig(dim=128, max_power=10)
        with pytest.raises(MemoryBudgetError) as info:
            propagate(t, config, memory_budget=1000)
        assert info.value.required_bytes == required_bytes(10, config) == 11 * 10 * 128 * 4

    def test_projection_set_immutable(self):
        ps = propagate(transition_matrix(path_graph(3)), ProjectionConfig(dim=4, max_power=1))
        with pytest.raises(ValueError):
            ps.matrices[0, 0, 0] = 1.0

    @pytest.mark.slow
    def test_cost_linear_in_edges(self):
        config = ProjectionConfig(dim=32, max_power=3)
        timings = []
        for edges in (100_000, 200_000, 400_000):
            rng = np.random.default_rng(edges)
            n = 20_000
            g = graph_from_pairs(n, zip(rng.integers(0, n, edges), rng.integers(0, n, edges)))
            t = transition_matrix(g)
            best = np.inf
            for _ in range(3):
                start = time.perf_counter()
                propagate(t, config)
                best = min(best, time.perf_counter() - start)
            timings.append(best)
        assert timings[1] / timings[0] <= 1.6 * 2
        assert timings[2] / timings[1] <= 1.6 * 2


class TestStorage:
    def _projections(self, dtype='float32'):
        t = transition_matrix(random_graph(20, 0.2, seed=1))
        return t, propagate(t, ProjectionConfig(dim=8, max_power=3, seed=7, dtype=dtype,
                                                normalization='degree'))

    @pytest.mark.parametrize("dtype", ['float32', 'float64'])
    def test_round_trip_bit_exact(self, tmp_path, dtype):
        t, ps = self._projections(dtype)
        path = tmp_path / "p.rpj"
        save_projections(ps, path)
        loaded = load_projections(path, expected_hash=t.digest)
        assert_array_equal(loaded.matrices, ps.matrices)
        assert loaded.matrices.dtype == ps.matrices.dtype
        assert loaded.config == ps.config
        assert loaded.graph_hash == ps.graph_hash
        assert loaded.digest == ps.digest

    def test_truncated(self, tmp_path):
        _, ps = self._projections()
        path = tmp_path / "p.rpj"
        save_projections(ps, path)
        path.write_bytes(path.read_bytes()[:-1])
        with pytest.raises(TruncatedFileError):
            load_projections(path)

    def test_bad_magic(self, tmp_path):
        _, ps = self._projections()
        path = tmp_path / "p.rpj"
        save_projections(ps, path)
        data = bytearray(path.read_bytes())
        data[:4] = b"XXXX"
        path.write_bytes(bytes(data))
        with pytest.raises(ArtifactFormatError, match="magic"):
            load_projections(path)

    def test_digest_mismatch_warns(self, tmp_path):
        _, ps = self._projections()
        path = tmp_path / "p.rpj"
        save_projections(ps, path)
        with pytest.warns(ProjectionDigestWarning):
            load_projections(path, expected_hash=bytes(32))

    def test_matching_digest_is_silent(self, tmp_path):
        t, ps = self._projections()
        path = tmp_path / "p.rpj"
        save_projections(ps, path)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            load_projections(path, expected_hash=t.digest)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_projections(tmp_path / "nada.rpj")
