import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import nsch.spectral as sp
from nsch.errors import DataError, PreconditionError
from nsch.oracle import DenseSpectralOracle
from nsch.spectral import Grid, ScalarField, VectorField, transform

TWO_PI = 2.0 * np.pi


def random_field(grid, rng, band=None):
    f = transform(rng.standard_normal((grid.n, grid.n)), grid)
    if band is not None:
        f = sp.cutoff(f, band)
    return f


class TestGrid:
    def test_rejects_odd_and_small(self):
        with pytest.raises(ValueError):
            Grid(7)
        with pytest.raises(ValueError):
            Grid(4)

    def test_dealias_cut_default_and_bounds(self):
        assert Grid(12).dealias_cut == 4
        with pytest.raises(ValueError):
            Grid(8, dealias_cut=5)


class TestTransform:
    def test_zero_field(self, grid8):
        f = transform(np.zeros((8, 8)), grid8)
        assert np.all(f.coeffs == 0)

    def test_single_cosine_mode(self, grid8):
        f = transform(np.cos(grid8.x1), grid8)
        expected = np.zeros((8, 8), dtype=complex)
        expected[1, 0] = 0.5
        expected[-1, 0] = 0.5
        assert np.abs(f.coeffs - expected).max() < 1e-15

    def test_round_trip_against_dense_oracle(self, grid8, rng):
        oracle = DenseSpectralOracle(8)
        for _ in range(20):
            v = rng.standard_normal((8, 8))
            f = transform(v, grid8)
            assert np.abs(f.values() - v).max() <= 1e-12
            assert np.abs(f.coeffs - oracle.transform(v)).max() <= 1e-12

    @pytest.mark.parametrize("n", [8, 16, 32, 64, 128, 256])
    def test_round_trip_all_grid_sizes(self, n, rng):
        grid = Grid(n)
        v = rng.standard_normal((n, n))
        assert np.abs(transform(v, grid).values() - v).max() <= 1e-12

    def test_rejects_non_finite(self, grid8):
        v = np.zeros((8, 8))
        v[3, 4] = np.nan
        with pytest.raises(DataError):
            transform(v, grid8)
        v[3, 4] = np.inf
        with pytest.raises(DataError):
            transform(v, grid8)

    def test_parseval(self, grid32, rng):
        f = random_field(grid32, rng)
        collocation = np.sqrt(np.mean(f.values() ** 2) * TWO_PI**2)
        assert sp.l2_norm(f) == pytest.approx(collocation, rel=1e-12)

    def test_hermitian_symmetry(self, grid32, rng):
        f = random_field(grid32, rng)
        assert sp.hermitian_symmetry_error(f) <= 1e-14


class TestDerivatives:
    def test_d1_cos_is_minus_sin(self, grid8):
        f = transform(np.cos(grid8.x1), grid8)
        assert np.abs(sp.derivative(f, 1).values() + np.sin(grid8.x1)).max() <= 1e-13

    def test_laplacian_eigenmode(self, grid8):
        f = transform(np.cos(2 * grid8.x1), grid8)
        assert np.abs(sp.laplacian(f).values() + 4 * np.cos(2 * grid8.x1)).max() <= 1e-12

    def test_bilaplacian_matches_oracle(self, grid8, rng):
        oracle = DenseSpectralOracle(8)
        for _ in range(10):
            v = random_field(grid8, rng, band=3).values()
            f = transform(v, grid8)
            assert np.abs(sp.bilaplacian(f).values() - oracle.bilaplacian(v)).max() <= 1e-10

    def test_derivative_axis_validation(self, grid8):
        f = ScalarField.zero(grid8)
        with pytest.raises(ValueError):
            sp.derivative(f, 3)
        with pytest.raises(ValueError):
            sp.derivative(f, 1, order=0)


class TestInverseLaplacian:
    def test_eigenmodes(self, grid8):
        f = transform(np.cos(grid8.x1), grid8)
        assert np.abs(sp.inverse_laplacian(f).values() - np.cos(grid8.x1)).max() <= 1e-13
        g = transform(np.cos(2 * grid8.x1), grid8)
        assert np.abs(sp.inverse_laplacian(g).values() - np.cos(2 * grid8.x1) / 4).max() <= 1e-13

    def test_rejects_nonzero_mean(self, grid8):
        f = transform(1.0 + np.cos(grid8.x1), grid8)
        with pytest.raises(PreconditionError, match="mean"):
            sp.inverse_laplacian(f)

    def test_inverts_laplacian(self, grid32, rng):
        f = random_field(grid32, rng, band=10)
        coeffs = f.coeffs.copy()
        coeffs[0, 0] = 0.0
        f = ScalarField(grid32, coeffs)
        back = sp.laplacian(sp.inverse_laplacian(f))
        assert sp.l2_norm(back + f) <= 1e-12 * max(1.0, sp.l2_norm(f))


class TestMean:
    def test_constant(self, grid8):
        assert sp.mean(transform(np.full((8, 8), 2.5), grid8)) == pytest.approx(2.5)

    def test_cosine_is_mean_free(self, grid8):
        assert abs(sp.mean(transform(np.cos(grid8.x1), grid8))) <= 1e-15

    def test_shifted_cosine(self, grid8):
        assert sp.mean(transform(1.0 + np.cos(grid8.x1), grid8)) == pytest.approx(1.0)


class TestLerayProjection:
    def test_annihilates_gradients(self, grid8):
        # grad of cos(x1) is (-sin x1, 0)
        u = VectorField(transform(-np.sin(grid8.x1), grid8), ScalarField.zero(grid8))
        p = sp.leray_project(u)
        assert sp.l2_norm(p.u1) <= 1e-13
        assert sp.l2_norm(p.u2) <= 1e-13

    def test_keeps_divergence_free_fields(self, grid8):
        u = VectorField(transform(np.cos(grid8.x2), grid8), ScalarField.zero(grid8))
        p = sp.leray_project(u)
        assert np.abs(p.u1.coeffs - u.u1.coeffs).max() <= 1e-14
        assert np.abs(p.u2.coeffs - u.u2.coeffs).max() <= 1e-14

    def test_idempotent_and_divergence_free(self, grid32, rng):
        u = VectorField(random_field(grid32, rng), random_field(grid32, rng))
        p = sp.leray_project(u)
        p2 = sp.leray_project(p)
        assert np.abs(p2.u1.coeffs - p.u1.coeffs).max() <= 1e-12
        assert np.abs(p2.u2.coeffs - p.u2.coeffs).max() <= 1e-12
        assert p.divergence_error() <= 1e-12

    def test_matches_dense_oracle(self, grid8, rng):
        oracle = DenseSpectralOracle(8)
        for _ in range(10):
            v1 = rng.standard_normal((8, 8))
            v2 = rng.standard_normal((8, 8))
            p = sp.leray_project(VectorField(transform(v1, grid8), transform(v2, grid8)))
            o1, o2 = oracle.leray_project(v1, v2)
            assert np.abs(p.u1.values() - o1).max() <= 1e-10
            assert np.abs(p.u2.values() - o2).max() <= 1e-10


class TestCutoff:
    def test_removes_outside_ball(self, grid8):
        f = transform(np.cos(2 * grid8.x1), grid8)
        assert sp.l2_norm(sp.cutoff(f, 1)) <= 1e-14

    def test_keeps_boundary_modes(self, grid8):
        f = transform(np.cos(2 * grid8.x1), grid8)
        assert np.abs(sp.cutoff(f, 2).coeffs - f.coeffs).max() <= 1e-15

    def test_full_retention(self, grid8, rng):
        f = random_field(grid8, rng)
        radius = int(math.ceil(8 / 2 * math.sqrt(2)))
        assert np.abs(sp.cutoff(f, radius).coeffs - f.coeffs).max() == 0.0

    @given(radius=st.integers(min_value=1, max_value=6))
    @settings(max_examples=20, deadline=None)
    def test_idempotent(self, radius):
        rng = np.random.default_rng(radius)
        grid = Grid(8)
        f = transform(rng.standard_normal((8, 8)), grid)
        once = sp.cutoff(f, radius)
        twice = sp.cutoff(once, radius)
        assert np.abs(once.coeffs - twice.coeffs).max() == 0.0

    def test_commutes_with_derivative(self, grid8, rng):
        f = random_field(grid8, rng)
        a = sp.derivative(sp.cutoff(f, 3), 1)
        b = sp.cutoff(sp.derivative(f, 1), 3)
        assert np.abs(a.coeffs - b.coeffs).max() <= 1e-15

    def test_truncation_error_nonincreasing_in_radius(self, grid32, rng):
        f = random_field(grid32, rng)
        errs = [sp.sobolev_norm(sp.cutoff(f, r) - f, 1.0) for r in range(1, 16)]
        assert all(errs[i + 1] <= errs[i] + 1e-14 for i in range(len(errs) - 1))


class TestSobolevNorm:
    def test_zero(self, grid8):
        assert sp.sobolev_norm(ScalarField.zero(grid8), 3.0) == 0.0

    def test_cosine_l2(self, grid8):
        f = transform(np.cos(grid8.x1), grid8)
        assert sp.sobolev_norm(f, 0.0) == pytest.approx(math.sqrt(2 * math.pi**2), rel=1e-14)

    @pytest.mark.parametrize("s", [-1.0, 0.0, 0.5, 1.0, 2.0, 3.5])
    def test_cosine_general_s(self, grid8, s):
        f = transform(np.cos(grid8.x1), grid8)
        expected = 2 * math.pi * 2 ** ((s - 1) / 2)
        assert sp.sobolev_norm(f, s) == pytest.approx(expected, rel=1e-13)


class TestDealiasProduct:
    def test_zero_absorbing(self, grid8, rng):
        f = random_field(grid8, rng)
        z = ScalarField.zero(grid8)
        assert sp.l2_norm(sp.dealias_product(f, z)) == 0.0

    def test_cos_squared(self, grid8):
        f = transform(np.cos(grid8.x1), grid8)
        prod = sp.dealias_product(f, f)
        expected = 0.5 + 0.5 * np.cos(2 * grid8.x1)
        assert np.abs(prod.values() - expected).max() <= 1e-13

    def test_band_limited_against_quadrature_oracle(self, grid8, rng):
        from nsch.oracle import dense_series_evaluator

        cut = grid8.dealias_cut
        for _ in range(5):
            f = random_field(grid8, rng, band=cut)
            g = random_field(grid8, rng, band=cut)
            hf = dense_series_evaluator(f.coeffs)
            hg = dense_series_evaluator(g.coeffs)
            m = 32
            x = np.arange(m) * (TWO_PI / m)
            X1, X2 = np.meshgrid(x, x, indexing="ij")
            prod_vals = hf(X1, X2) * hg(X1, X2)
            prod = sp.dealias_product(f, g)
            for n1 in range(-cut, cut + 1):
                for n2 in range(-cut, cut + 1):
                    want = np.sum(prod_vals * np.exp(-1j * (n1 * X1 + n2 * X2))) / m**2
                    got = prod.coeffs[n1 % 8, n2 % 8]
                    assert abs(got - want) <= 1e-10

    def test_rejects_mismatched_grids(self, grid8, grid32):
        with pytest.raises(PreconditionError):
            sp.dealias_product(ScalarField.zero(grid8), ScalarField.zero(grid32))


class TestResampling:
    def test_oversampled_values_interpolate(self, grid8, rng):
        f = random_field(grid8, rng)
        v2 = sp.values_oversampled(f, 2)
        assert np.abs(v2[::2, ::2] - f.values()).max() <= 1e-12

    def test_restrict_inverts_embed(self, grid8, rng):
        f = random_field(grid8, rng)
        back = sp.transform_oversampled(sp.values_oversampled(f, 4), grid8)
        assert np.abs(back.coeffs - f.coeffs).max() <= 1e-13

    def test_padded_product_alias_free(self, grid8, rng):
        # quadratic content fits on the doubled grid, so the padded product
        # equals the exact Galerkin truncation
        f = random_field(grid8, rng, band=3)
        g = random_field(grid8, rng, band=3)
        p2 = sp.padded_product(f, g, 2)
        p4 = sp.padded_product(f, g, 4)
        assert np.abs(p2.coeffs - p4.coeffs).max() <= 1e-13


class TestBiharmonicSemigroup:
    def test_eigenfunction(self, grid8):
        f = transform(np.cos(grid8.x1), grid8)
        out = sp.biharmonic_semigroup(f, 0.7)
        assert sp.l2_norm(out - math.exp(-0.7) * f) <= 1e-13

    def test_mode_two_rate(self, grid8):
        f = transform(np.cos(2 * grid8.x1), grid8)
        out = sp.biharmonic_semigroup(f, 0.1)
        assert sp.l2_norm(out - math.exp(-1.6) * f) <= 1e-13

    def test_rejects_negative_time(self, grid8):
        with pytest.raises(ValueError):
            sp.biharmonic_semigroup(ScalarField.zero(grid8), -0.1)

    def test_semigroup_property(self, grid32, rng):
        f = random_field(grid32, rng)
        ab = sp.biharmonic_semigroup(sp.biharmonic_semigroup(f, 0.013), 0.029)
        direct = sp.biharmonic_semigroup(f, 0.042)
        assert np.abs(ab.coeffs - direct.coeffs).max() <= 1e-12

    def test_preserves_mean(self, grid32, rng):
        f = random_field(grid32, rng)
        assert sp.mean(sp.biharmonic_semigroup(f, 0.5)) == pytest.approx(sp.mean(f), abs=1e-14)

    def test_contractive_in_sobolev_norms(self, grid32, rng):
        f = random_field(grid32, rng)
        for s in (0.0, 1.0, 2.0):
            assert sp.sobolev_norm(sp.biharmonic_semigroup(f, 0.01), s) <= sp.sobolev_norm(f, s) + 1e-14

    def test_linf_decay_to_initial_datum(self, grid32, rng):
        theta0 = sp.cutoff(random_field(grid32, rng), 6)
        errs = [sp.linf_norm(sp.biharmonic_semigroup(theta0, t) - theta0)
                for t in (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)]
        assert all(errs[i + 1] <= errs[i] for i in range(len(errs) - 1))
        assert errs[-1] <= 1e-3 * sp.linf_norm(theta0)

    def test_linf_hold_time_positive(self, grid32, rng):
        theta0 = sp.cutoff(random_field(grid32, rng), 6)
        theta0 = theta0 * (0.9 / sp.linf_norm(theta0))
        t1 = sp.semigroup_linf_hold_time(theta0, delta0=0.1)
        assert t1 > 0.0


@given(seed=st.integers(min_value=0, max_value=10**6))
@settings(max_examples=25, deadline=None)
def test_round_trip_property(seed):
    rng = np.random.default_rng(seed)
    grid = Grid(16)
    v = rng.uniform(-5, 5, size=(16, 16))
    f = transform(v, grid)
    assert np.abs(f.values() - v).max() <= 1e-12
    assert sp.hermitian_symmetry_error(f) <= 1e-13
