import math

import numpy as np
import pytest

from nsch.oracle import (DenseSpectralOracle, bisect, dense_series_evaluator,
                         quadrature)
from nsch.potential import Phi, PotentialParams, phi

TWO_PI = 2.0 * np.pi


class TestDenseTransform:
    def test_size_guard(self):
        with pytest.raises(ValueError):
            DenseSpectralOracle(32)
        with pytest.raises(ValueError):
            DenseSpectralOracle(7)

    def test_cosine_coefficient_table(self):
        o = DenseSpectralOracle(8)
        x = np.arange(8) * (TWO_PI / 8)
        X1, _ = np.meshgrid(x, x, indexing="ij")
        c = o.transform(np.cos(X1))
        expected = np.zeros((8, 8), dtype=complex)
        expected[1, 0] = 0.5
        expected[-1, 0] = 0.5
        assert np.abs(c - expected).max() <= 1e-14

    def test_linearity(self, rng):
        o = DenseSpectralOracle(8)
        f = rng.standard_normal((8, 8))
        g = rng.standard_normal((8, 8))
        lhs = o.transform(f + g)
        rhs = o.transform(f) + o.transform(g)
        assert np.abs(lhs - rhs).max() <= 1e-12

    def test_inverse_round_trip(self, rng):
        o = DenseSpectralOracle(8)
        v = rng.standard_normal((8, 8))
        assert np.abs(o.inverse(o.transform(v)) - v).max() <= 1e-12

    def test_inverse_laplacian_eigenmode(self):
        o = DenseSpectralOracle(8)
        x = np.arange(8) * (TWO_PI / 8)
        X1, _ = np.meshgrid(x, x, indexing="ij")
        out = o.inverse_laplacian(np.cos(2 * X1))
        assert np.abs(out - np.cos(2 * X1) / 4).max() <= 1e-12


class TestSeriesEvaluator:
    def test_reproduces_grid_values(self, grid8, rng):
        from nsch.spectral import transform

        v = rng.standard_normal((8, 8))
        f = transform(v, grid8)
        ev = dense_series_evaluator(f.coeffs)
        assert np.abs(ev(grid8.x1, grid8.x2) - v).max() <= 1e-12


class TestQuadrature:
    def test_constant(self):
        assert quadrature(lambda x1, x2: np.ones_like(x1), 2) == pytest.approx(TWO_PI**2)

    def test_cosine_squared(self):
        val = quadrature(lambda x1, x2: np.cos(x1) ** 2, 4)
        assert val == pytest.approx(2 * math.pi**2, rel=1e-13)

    def test_oversample_guard(self):
        with pytest.raises(ValueError):
            quadrature(lambda x1, x2: np.ones_like(x1), 3)

    def test_log_density_integral_stable(self, params):
        def integrand(x1, x2):
            return np.vectorize(lambda s: Phi(s, params))(0.5 * np.cos(x1))

        v4 = quadrature(integrand, 4)
        v8 = quadrature(integrand, 8)
        assert abs(v4 - v8) <= 1e-9


class TestBisect:
    def test_identity_root(self):
        assert abs(bisect(lambda y: y, -1.0, 1.0)) <= 1e-14

    def test_recovers_shifted_root(self, params):
        # phi is monotone between its turning points +-sqrt(1 - a0/a)
        target = phi(0.3, params)
        root = bisect(lambda y: phi(y, params) - target, -0.5, 0.6)
        assert abs(root - 0.3) <= 1e-12

    def test_no_sign_change(self):
        with pytest.raises(ValueError):
            bisect(lambda y: y + 10.0, -1.0, 1.0)
