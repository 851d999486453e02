import numpy as np
import pytest
from math import comb

from invopt import SimplexSpec, project_onto_simplex, sample_uniform_simplex, upa_grid
from oracle_helpers import brute_force_projection


class TestSpec:
    def test_rejects_bad_dimensions(self):
        with pytest.raises(ValueError):
            SimplexSpec(1)
        with pytest.raises(ValueError):
            SimplexSpec(3, shift=-0.1)

    def test_total_mass(self):
        assert SimplexSpec(4).total_mass == 1.0
        assert SimplexSpec(4, 1e-3).total_mass == pytest.approx(1.004)


class TestProjection:
    def test_on_simplex_is_fixed(self, unit_spec):
        v = np.array([0.5, 0.5])
        assert np.array_equal(project_onto_simplex(v, unit_spec), v)

    def test_nearest_vertex(self, unit_spec):
        out = project_onto_simplex(np.array([2.0, 0.0]), unit_spec)
        assert np.allclose(out, [1.0, 0.0], atol=1e-15)

    def test_interior_shift(self, unit_spec):
        # brute-force oracle: free set {1,2}, spread (1 - 0.5)/2 = 0.25 each
        out = project_onto_simplex(np.array([0.4, 0.1]), unit_spec)
        assert np.allclose(out, [0.65, 0.35], atol=1e-15)

    def test_dimension_mismatch(self, unit_spec):
        with pytest.raises(ValueError):
            project_onto_simplex(np.array([1.0, 2.0, 3.0]), unit_spec)

    def test_idempotent_bitwise(self, rng):
        for _ in range(200):
            d = int(rng.integers(2, 9))
            spec = SimplexSpec(d, shift=float(rng.choice([0.0, 1e-3])))
            v = rng.normal(0, 3, d)
            once = project_onto_simplex(v, spec)
            twice = project_onto_simplex(once, spec)
            assert np.array_equal(once, twice)

    def test_never_farther_than_feasible_points(self, rng):
        for _ in range(1000):
            d = int(rng.integers(2, 7))
            spec = SimplexSpec(d)
            v = rng.normal(0, 2, d)
            p = sample_uniform_simplex(spec, rng)
            proj = project_onto_simplex(v, spec)
            assert np.linalg.norm(proj - v) <= np.linalg.norm(p - v) + 1e-12

    def test_matches_active_set_enumeration(self, rng):
        for _ in range(1000):
            d = int(rng.integers(2, 11))
            spec = SimplexSpec(d, shift=float(rng.choice([0.0, 1e-3])))
            v = rng.normal(0, 2, d)
            expected = brute_force_projection(v, spec)
            assert np.abs(project_onto_simplex(v, spec) - expected).max() <= 1e-9

    def test_shifted_output_feasible(self, rng):
        spec = SimplexSpec(3, shift=1e-3)
        for _ in range(100):
            out = project_onto_simplex(rng.normal(0, 2, 3), spec)
            assert np.all(out >= spec.shift)
            assert out.sum() == pytest.approx(spec.total_mass, abs=1e-12)


class TestSampling:
    def test_basic_invariants(self, unit_spec, rng):
        w = sample_uniform_simplex(unit_spec, rng)
        assert w.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(w >= 0)

    def test_mean_matches_flat_dirichlet(self, rng):
        spec = SimplexSpec(3)
        samples = np.array([sample_uniform_simplex(spec, rng) for _ in range(100_000)])
        assert np.abs(samples.mean(axis=0) - 1.0 / 3.0).max() < 0.01

    def test_shifted(self, rng):
        spec = SimplexSpec(2, shift=1e-3)
        w = sample_uniform_simplex(spec, rng)
        assert w.sum() == pytest.approx(1.002, abs=1e-12)
        assert np.all(w >= 1e-3)


class TestUpaGrid:
    def test_level_zero(self, unit_spec):
        grid = upa_grid(unit_spec, 0)
        assert grid.shape == (1, 2)
        assert np.allclose(grid[0], [0.5, 0.5])

    def test_level_one(self, unit_spec):
        grid = upa_grid(unit_spec, 1)
        got = {tuple(p) for p in np.round(grid, 12)}
        assert got == {(0.75, 0.25), (0.25, 0.75)}

    def test_three_dims_level_two(self):
        grid = upa_grid(SimplexSpec(3), 2)
        assert grid.shape == (6, 3)
        assert np.allclose(grid.sum(axis=1), 1.0)

    def test_cardinality_is_stars_and_bars(self):
        for d in (2, 3, 4, 5):
            for level in (0, 1, 2, 3, 5):
                grid = upa_grid(SimplexSpec(d), level)
                assert len(grid) == comb(level + d - 1, d - 1)
                assert len(np.unique(np.round(grid, 12), axis=0)) == len(grid)

    def test_points_strictly_interior(self):
        for level in (0, 1, 4):
            grid = upa_grid(SimplexSpec(4), level)
            assert np.all(grid > 0)

    def test_shifted_grid(self):
        spec = SimplexSpec(2, shift=1e-3)
        grid = upa_grid(spec, 1)
        assert np.allclose(grid.sum(axis=1), spec.total_mass)
        assert np.all(grid > spec.shift)

    def test_negative_level_rejected(self, unit_spec):
        with pytest.raises(ValueError):
            upa_grid(unit_spec, -1)
