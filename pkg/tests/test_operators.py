import numpy as np
import pytest

from regselect.operators import (
    ConvolutionOperator,
    DenseOperator,
    GradientOperator,
    IdentityOperator,
    SpectralDecomposition,
    fractional_power_apply,
    gaussian_deriv2_kernel,
    gradient_adjoint,
    image_gradient,
)


def circulant_from_kernel(kernel):
    # independent oracle: column j of the circulant is the kernel rolled by j
    d = len(kernel)
    C = np.empty((d, d))
    for j in range(d):
        C[:, j] = np.roll(kernel, j)
    return C


class TestDenseOperator:
    def test_apply_is_matrix_product(self):
        rng = np.random.default_rng(0)
        A = rng.standard_normal((7, 5))
        op = DenseOperator(A)
        x = rng.standard_normal(5)
        np.testing.assert_allclose(op.apply(x), A @ x, rtol=1e-14)

    def test_apply_identity(self):
        op = DenseOperator(np.eye(2))
        np.testing.assert_array_equal(op.apply([3.0, -1.0]), [3.0, -1.0])

    def test_apply_diagonal(self):
        op = DenseOperator(np.diag([2.0, 0.5]))
        np.testing.assert_array_equal(op.apply([1.0, 1.0]), [2.0, 0.5])

    def test_adjoint_by_hand(self):
        op = DenseOperator(np.array([[0.0, 1.0], [0.0, 0.0]]))
        np.testing.assert_array_equal(op.adjoint_apply([1.0, 0.0]), [0.0, 1.0])

    def test_adjoint_inner_product_identity(self):
        rng = np.random.default_rng(1)
        A = rng.standard_normal((9, 6))
        op = DenseOperator(A)
        for _ in range(20):
            x = rng.standard_normal(6)
            y = rng.standard_normal(9)
            lhs = op.apply(x) @ y
            rhs = x @ op.adjoint_apply(y)
            assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))

    def test_operator_norm_diag(self):
        assert DenseOperator(np.diag([3.0, 1.0])).operator_norm() == pytest.approx(3.0)

    def test_operator_norm_identity(self):
        assert DenseOperator(np.eye(4)).operator_norm() == pytest.approx(1.0)

    def test_operator_norm_matches_svd(self):
        rng = np.random.default_rng(2)
        A = rng.standard_normal((10, 10))
        want = np.linalg.svd(A, compute_uv=False)[0]
        assert DenseOperator(A).operator_norm() == pytest.approx(want, rel=1e-8)

    def test_normalize_unit_norm(self):
        rng = np.random.default_rng(3)
        op = DenseOperator(rng.standard_normal((8, 8))).normalize()
        assert op.operator_norm() <= 1.0 + 1e-10
        assert op.operator_norm() == pytest.approx(1.0, rel=1e-10)

    def test_dimension_mismatch(self):
        op = DenseOperator(np.ones((3, 2)))
        with pytest.raises(ValueError):
            op.apply(np.ones(3))
        with pytest.raises(ValueError):
            op.adjoint_apply(np.ones(2))

    def test_batch_apply_rows(self):
        rng = np.random.default_rng(4)
        A = rng.standard_normal((5, 4))
        X = rng.standard_normal((6, 4))
        out = DenseOperator(A).apply(X)
        np.testing.assert_allclose(out, X @ A.T, rtol=1e-14)


class TestSpectralDecomposition:
    def test_reconstruction(self):
        rng = np.random.default_rng(5)
        A = rng.standard_normal((12, 8))
        dec = DenseOperator(A).decomposition()
        np.testing.assert_allclose(dec.reconstruct(), A, atol=1e-8 * np.abs(A).max())

    def test_singular_values_sorted(self):
        rng = np.random.default_rng(6)
        dec = DenseOperator(rng.standard_normal((10, 10))).decomposition()
        assert np.all(np.diff(dec.singular_values) <= 0)
        assert np.all(dec.singular_values >= 0)

    def test_rejects_increasing_order(self):
        eye = np.eye(2)
        with pytest.raises(ValueError):
            SpectralDecomposition(np.array([1.0, 2.0]), eye, eye)

    def test_decomposition_cached(self):
        op = DenseOperator(np.eye(3))
        assert op.decomposition() is op.decomposition()


class TestConvolutionOperator:
    def test_delta_kernel_is_identity(self):
        rng = np.random.default_rng(7)
        kernel = np.zeros(16)
        kernel[0] = 1.0
        op = ConvolutionOperator(kernel)
        x = rng.standard_normal(16)
        np.testing.assert_allclose(op.apply(x), x, atol=1e-12)

    def test_matches_dense_circulant(self):
        rng = np.random.default_rng(8)
        for d in (4, 17, 64):
            kernel = rng.standard_normal(d)
            op = ConvolutionOperator(kernel)
            C = circulant_from_kernel(kernel)
            x = rng.standard_normal(d)
            np.testing.assert_allclose(op.apply(x), C @ x, atol=1e-10)
            y = rng.standard_normal(d)
            np.testing.assert_allclose(op.adjoint_apply(y), C.T @ y, atol=1e-10)

    def test_as_dense_matches_oracle(self):
        rng = np.random.default_rng(9)
        kernel = rng.standard_normal(12)
        np.testing.assert_allclose(ConvolutionOperator(kernel).as_dense().matrix,
                                   circulant_from_kernel(kernel), atol=1e-12)

    def test_operator_norm_is_max_fourier_modulus(self):
        rng = np.random.default_rng(10)
        kernel = rng.standard_normal(20)
        want = np.abs(np.fft.fft(kernel)).max()
        assert ConvolutionOperator(kernel).operator_norm() == pytest.approx(want, rel=1e-12)

    def test_adjoint_inner_product_identity(self):
        rng = np.random.default_rng(11)
        op = ConvolutionOperator(rng.standard_normal(15))
        for _ in range(10):
            x = rng.standard_normal(15)
            y = rng.standard_normal(15)
            assert op.apply(x) @ y == pytest.approx(x @ op.adjoint_apply(y), rel=1e-10)

    def test_normalize(self):
        rng = np.random.default_rng(12)
        op = ConvolutionOperator(3.7 * rng.standard_normal(9)).normalize()
        assert op.operator_norm() == pytest.approx(1.0, rel=1e-12)


class TestGradientOperator:
    def test_constant_image_maps_to_zero(self):
        op = GradientOperator(6)
        x = np.full(36, 2.5)
        np.testing.assert_array_equal(op.apply(x), np.zeros(op.range_dim))

    def test_output_dimension(self):
        # 2 d (d-1) stacked finite differences
        for d in (2, 5, 9):
            assert GradientOperator(d).range_dim == 2 * d * (d - 1)

    def test_adjoint_inner_product_identity(self):
        rng = np.random.default_rng(13)
        op = GradientOperator(5)
        for _ in range(10):
            x = rng.standard_normal(25)
            p = rng.standard_normal(op.range_dim)
            lhs = op.apply(x) @ p
            rhs = x @ op.adjoint_apply(p)
            assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))

    def test_matches_image_gradient_helper(self):
        rng = np.random.default_rng(14)
        img = rng.standard_normal((4, 4))
        dv, dh = image_gradient(img)
        flat = GradientOperator(4).apply(img.ravel())
        np.testing.assert_allclose(flat, np.concatenate([dv.ravel(), dh.ravel()]), atol=1e-14)

    def test_gradient_adjoint_helper_identity(self):
        rng = np.random.default_rng(15)
        img = rng.standard_normal((5, 5))
        dv = rng.standard_normal((4, 5))
        dh = rng.standard_normal((5, 4))
        lhs = np.sum(image_gradient(img)[0] * dv) + np.sum(image_gradient(img)[1] * dh)
        rhs = np.sum(img * gradient_adjoint(dv, dh))
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_operator_norm_closed_form(self):
        # largest singular value of the 2D difference map: sqrt(8) sin((d-1) pi / (2d))
        for d in (3, 8):
            op = GradientOperator(d)
            want = np.sqrt(8.0) * np.sin((d - 1) * np.pi / (2 * d))
            dense = np.zeros((op.range_dim, d * d))
            eye = np.eye(d * d)
            for j in range(d * d):
                dense[:, j] = op.apply(eye[j])
            brute = np.linalg.svd(dense, compute_uv=False)[0]
            assert op.operator_norm() == pytest.approx(brute, rel=1e-10)
            assert op.operator_norm() == pytest.approx(want, rel=1e-10)


class TestIdentityOperator:
    def test_apply_and_adjoint(self):
        op = IdentityOperator(3)
        x = np.array([1.0, -2.0, 0.5])
        np.testing.assert_array_equal(op.apply(x), x)
        np.testing.assert_array_equal(op.adjoint_apply(x), x)

    def test_norm_and_decomposition(self):
        op = IdentityOperator(4)
        assert op.operator_norm() == 1.0
        np.testing.assert_array_equal(op.decomposition().singular_values, np.ones(4))


class TestFractionalPower:
    def test_semigroup_half_half_equals_one(self):
        rng = np.random.default_rng(16)
        dec = DenseOperator(rng.standard_normal((9, 7))).decomposition()
        z = rng.standard_normal(7)
        once = fractional_power_apply(dec, 1.0, z)
        twice = fractional_power_apply(dec, 0.5, fractional_power_apply(dec, 0.5, z))
        np.testing.assert_allclose(twice, once, atol=1e-10)

    def test_power_one_is_gram_matrix(self):
        rng = np.random.default_rng(17)
        A = rng.standard_normal((8, 6))
        dec = DenseOperator(A).decomposition()
        z = rng.standard_normal(6)
        np.testing.assert_allclose(fractional_power_apply(dec, 1.0, z), A.T @ (A @ z),
                                   atol=1e-10)

    def test_power_zero_is_range_projection(self):
        # rank-deficient operator: s=0 must project onto the row space, not copy z
        A = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        dec = DenseOperator(A).decomposition()
        z = np.array([2.0, 3.0, -1.0])
        np.testing.assert_allclose(fractional_power_apply(dec, 0.0, z),
                                   [2.0, 0.0, 0.0], atol=1e-12)

    def test_negative_power_rejected(self):
        dec = DenseOperator(np.eye(2)).decomposition()
        with pytest.raises(ValueError):
            fractional_power_apply(dec, -0.5, np.ones(2))


class TestSecondDerivativeKernel:
    def test_zero_sum(self):
        # the kernel is mean-subtracted so constants are annihilated
        for d in (33, 64, 256):
            assert abs(gaussian_deriv2_kernel(d).sum()) <= 1e-12

    def test_symmetry_about_center(self):
        d = 33
        h = gaussian_deriv2_kernel(d)
        c = d // 2
        for j in range(1, 10):
            assert h[c + j] == pytest.approx(h[c - j], rel=1e-12)

    def test_center_is_minimum(self):
        h = gaussian_deriv2_kernel(65)
        assert np.argmin(h) == 65 // 2
