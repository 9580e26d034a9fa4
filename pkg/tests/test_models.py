import numpy as np
import pytest

from regselect.experiments.models import (
    SparseDeblur,
    SparseDenoise,
    SpectralSource,
    TvImages,
    gen_sparse_dataset,
    gen_spectral_dataset,
    sample_unit_ball,
)
from regselect.experiments.risk import rng_from
from regselect.operators import ConvolutionOperator


class TestUnitBall:
    def test_norms_never_exceed_one(self):
        rng = np.random.default_rng(0)
        pts = sample_unit_ball(8, rng, 5000)
        assert pts.shape == (5000, 8)
        assert np.linalg.norm(pts, axis=1).max() <= 1.0 + 1e-12

    def test_second_moment(self):
        # E ||X||^2 = d / (d + 2) for the uniform ball; MC tolerance ~30 sigma
        rng = np.random.default_rng(1)
        for d in (2, 5, 11):
            pts = sample_unit_ball(d, rng, 200_000)
            want = d / (d + 2.0)
            assert np.mean(np.sum(pts ** 2, axis=1)) == pytest.approx(want, rel=0.02)

    def test_mean_is_origin(self):
        rng = np.random.default_rng(2)
        pts = sample_unit_ball(1, rng, 100_000)
        # Var X = 1/3 in d=1; allow 4 standard errors
        assert abs(pts.mean()) <= 4.0 * np.sqrt(1.0 / 3.0 / 100_000)

    def test_single_draw_shape(self):
        rng = np.random.default_rng(3)
        assert sample_unit_ball(6, rng).shape == (6,)

    def test_rejects_bad_dimension(self):
        with pytest.raises(ValueError):
            sample_unit_ball(0, np.random.default_rng(0))


class TestSpectralSource:
    def test_sample_shapes_and_norms(self):
        model = SpectralSource(d=12, noise_level=0.05)
        data = model.sample(rng_from(0, "t"), 40)
        assert data.ys.shape == (40, 12)
        assert data.xs.shape == (40, 12)
        assert np.linalg.norm(data.xs, axis=1).max() <= 1.0 + 1e-9

    def test_noiseless_consistency(self):
        # tau = 0: observations are exactly the operator applied to the truths
        model = SpectralSource(d=10, noise_level=0.0)
        data = model.sample(rng_from(1, "t"), 15)
        np.testing.assert_allclose(data.ys, model.operator().apply(data.xs), atol=1e-14)

    def test_operator_is_normalized_and_cached(self):
        model = SpectralSource(d=20)
        op = model.operator()
        assert op.operator_norm() <= 1.0 + 1e-10
        assert model.operator() is op
        # same seed, fresh instance: identical matrix
        np.testing.assert_array_equal(SpectralSource(d=20).operator().matrix, op.matrix)

    def test_different_operator_seeds_differ(self):
        a = SpectralSource(d=8, operator_seed=0).operator().matrix
        b = SpectralSource(d=8, operator_seed=1).operator().matrix
        assert np.abs(a - b).max() > 1e-3

    def test_smoother_sources_have_smaller_high_mode_content(self):
        # larger s multiplies coefficients by higher powers of eigenvalues < 1,
        # so the norm of the truth shrinks with s on the same base draw
        rough = SpectralSource(d=30, source_exponent=0.25)
        smooth = SpectralSource(d=30, source_exponent=2.0)
        xs_r = rough.sample(rng_from(2, "t"), 50).xs
        xs_s = smooth.sample(rng_from(2, "t"), 50).xs
        assert np.linalg.norm(xs_s, axis=1).mean() < np.linalg.norm(xs_r, axis=1).mean()

    def test_determinism(self):
        model = SpectralSource(d=9, noise_level=0.1)
        a = model.sample(rng_from(5, "t"), 7)
        b = model.sample(rng_from(5, "t"), 7)
        np.testing.assert_array_equal(a.ys, b.ys)
        np.testing.assert_array_equal(a.xs, b.xs)

    def test_gen_spectral_dataset(self):
        model = SpectralSource(d=11)
        op, data = gen_spectral_dataset(model, 13, np.random.default_rng(4))
        assert op is model.operator()
        assert len(data) == 13


class TestSparseModels:
    def test_denoise_sparsity_and_norm(self):
        model = SparseDenoise(d=100, sparsity=7, noise_level=0.1)
        data = model.sample(rng_from(6, "t"), 30)
        counts = np.count_nonzero(data.xs, axis=1)
        assert np.all(counts == 7)
        np.testing.assert_allclose(np.linalg.norm(data.xs, axis=1), 1.0, rtol=1e-12)

    def test_denoise_observation_model(self):
        model = SparseDenoise(d=50, sparsity=5, noise_level=0.0)
        data = model.sample(rng_from(7, "t"), 10)
        np.testing.assert_array_equal(data.ys, data.xs)

    def test_deblur_noiseless_matches_convolution(self):
        model = SparseDeblur(d=64, sparsity=4, noise_level=0.0)
        data = model.sample(rng_from(8, "t"), 6)
        op = model.operator()
        assert isinstance(op, ConvolutionOperator)
        np.testing.assert_allclose(data.ys, op.apply(data.xs), atol=1e-12)

    def test_deblur_operator_normalized(self):
        assert SparseDeblur(d=128).operator().operator_norm() <= 1.0 + 1e-10

    def test_gen_sparse_dataset_type_check(self):
        with pytest.raises(TypeError):
            gen_sparse_dataset(SpectralSource(d=5), 3, np.random.default_rng(0))

    def test_gen_sparse_dataset_roundtrip(self):
        model = SparseDenoise(d=40, sparsity=3)
        op, data = gen_sparse_dataset(model, 9, np.random.default_rng(9))
        assert len(data) == 9
        assert data.xs.shape == (9, 40)


class TestTvImages:
    def test_pool_and_sample(self):
        model = TvImages(side=10, pool_size=16)
        pool = model.pool()
        assert pool.shape == (16, 10, 10)
        assert pool.min() >= 0.0 and pool.max() <= 1.0
        data = model.sample(rng_from(10, "t"), 12)
        assert data.xs.shape == (12, 10, 10)
        assert data.ys.shape == (12, 10, 10)

    def test_noise_is_additive_gaussian(self):
        model = TvImages(side=8, pool_size=4, noise_level=0.0)
        data = model.sample(rng_from(11, "t"), 5)
        np.testing.assert_array_equal(data.ys, data.xs)

    def test_pool_determinism(self):
        np.testing.assert_array_equal(TvImages(side=9, pool_size=8).pool(),
                                      TvImages(side=9, pool_size=8).pool())

    def test_truths_are_pool_members(self):
        model = TvImages(side=6, pool_size=5, noise_level=0.1)
        pool = model.pool()
        data = model.sample(rng_from(12, "t"), 20)
        for img in data.xs:
            assert any(np.array_equal(img, p) for p in pool)
