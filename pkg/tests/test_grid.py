import numpy as np
import pytest

from src import grid
from src.core.errors import GridError, ShapeMismatchError


class TestValidation:
    def test_rejects_non_2d(self):
        with pytest.raises(GridError):
            grid.as_grid(np.zeros((2, 2, 2)))

    def test_rejects_empty(self):
        with pytest.raises(GridError):
            grid.as_grid(np.zeros((0, 3)))

    def test_rejects_non_finite(self):
        g = np.zeros((2, 2))
        g[0, 1] = np.nan
        with pytest.raises(GridError):
            grid.as_grid(g)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            grid.check_same_shape(np.zeros((2, 2)), np.zeros((2, 3)))

    def test_kernels_are_read_only(self):
        with pytest.raises(ValueError):
            grid.SOBEL_X[0, 0] = 5.0

    def test_kernel_must_be_3x3(self):
        with pytest.raises(GridError):
            grid.make_kernel(np.ones((2, 2)))


class TestConv2dSame:
    def test_laplacian_annihilates_constants(self):
        out = grid.conv2d_same(np.full((5, 7), 0.3), grid.LAPLACIAN)
        assert out.shape == (5, 7)
        assert np.array_equal(out, np.zeros((5, 7)))

    def test_impulse_sobel_x(self, impulse):
        expected = np.array([[1.0, 0.0, -1.0], [2.0, 0.0, -2.0], [1.0, 0.0, -1.0]])
        assert np.array_equal(grid.conv2d_same(impulse, grid.SOBEL_X), expected)

    def test_vertical_step_sobel_x(self, step_image):
        out = grid.conv2d_same(step_image, grid.SOBEL_X)
        expected_row = np.array([0.0, 0.0, 4.0, 4.0, 0.0, 0.0])
        for row in out:
            assert np.array_equal(row, expected_row)

    def test_vertical_step_prewitt_x(self, step_image):
        out = grid.conv2d_same(step_image, grid.PREWITT_X)
        assert np.array_equal(out[0], np.array([0.0, 0.0, 3.0, 3.0, 0.0, 0.0]))

    def test_feature_maps_convolve_per_channel(self, rng):
        fmap = rng.random((3, 5, 4))
        out = grid.conv2d_same(fmap, grid.SOBEL_Y)
        for c in range(3):
            assert np.array_equal(out[c], grid.conv2d_same(fmap[c], grid.SOBEL_Y))

    def test_adjoint(self, rng):
        x = rng.standard_normal((5, 6))
        y = rng.standard_normal((5, 6))
        for kernel in (grid.SOBEL_X, grid.LAPLACIAN, grid.PREWITT_Y):
            lhs = np.sum(grid.conv2d_same(x, kernel) * y)
            rhs = np.sum(x * grid.conv2d_same_adjoint(y, kernel))
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)

    def test_adjoint_on_single_row(self, rng):
        x = rng.standard_normal((1, 4))
        y = rng.standard_normal((1, 4))
        lhs = np.sum(grid.conv2d_same(x, grid.SOBEL_X) * y)
        rhs = np.sum(x * grid.conv2d_same_adjoint(y, grid.SOBEL_X))
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


class TestAvgPool:
    def test_constant(self):
        out = grid.avg_pool_same(np.full((6, 5), 0.7), 3)
        assert np.allclose(out, 0.7, atol=1e-14)

    def test_single_cell_large_window(self):
        assert grid.avg_pool_same(np.array([[0.42]]), 31)[0, 0] == pytest.approx(0.42, abs=1e-14)

    def test_checkerboard_interior(self):
        board = np.indices((4, 4)).sum(axis=0) % 2
        out = grid.avg_pool_same(board.astype(float), 3)
        assert out[1, 1] == pytest.approx(4 / 9, abs=1e-14)
        assert out[1, 2] == pytest.approx(5 / 9, abs=1e-14)
        assert out[2, 2] == pytest.approx(4 / 9, abs=1e-14)

    def test_corner_divides_by_in_bounds_cells(self):
        g = np.zeros((3, 3))
        g[0, 0] = 1.0
        assert grid.avg_pool_same(g, 3)[0, 0] == pytest.approx(1 / 4, abs=1e-14)

    @pytest.mark.parametrize('k', [0, 2, 4, -3])
    def test_rejects_even_or_non_positive(self, k):
        with pytest.raises(GridError):
            grid.avg_pool_same(np.zeros((3, 3)), k)

    def test_adjoint(self, rng):
        x = rng.standard_normal((7, 5))
        y = rng.standard_normal((7, 5))
        lhs = np.sum(grid.avg_pool_same(x, 5) * y)
        rhs = np.sum(x * grid.avg_pool_same_adjoint(y, 5))
        assert lhs == pytest.approx(rhs, rel=1e-12)


class TestResize:
    def test_nearest_identity(self, rng):
        g = rng.random((4, 5))
        assert np.array_equal(grid.resize_nearest(g, 4, 5), g)

    def test_nearest_upscale_replicates_blocks(self):
        g = np.array([[1.0, 2.0], [3.0, 4.0]])
        expected = np.array([[1, 1, 2, 2], [1, 1, 2, 2], [3, 3, 4, 4], [3, 3, 4, 4]], dtype=float)
        assert np.array_equal(grid.resize_nearest(g, 4, 4), expected)

    def test_nearest_downscale_picks_even_cells(self):
        g = np.arange(16, dtype=float).reshape(4, 4)
        assert np.array_equal(grid.resize_nearest(g, 2, 2), g[[0, 2]][:, [0, 2]])

    @pytest.mark.parametrize('size', [(0, 2), (2, 0), (-1, 3)])
    def test_rejects_non_positive_targets(self, size):
        with pytest.raises(GridError):
            grid.resize_nearest(np.zeros((2, 2)), *size)
        with pytest.raises(GridError):
            grid.resize_bilinear(np.zeros((2, 2)), *size)

    def test_bilinear_identity(self, rng):
        g = rng.random((3, 6))
        assert np.array_equal(grid.resize_bilinear(g, 3, 6), g)

    def test_bilinear_constant(self):
        out = grid.resize_bilinear(np.full((3, 3), 0.25), 7, 5)
        assert out.shape == (7, 5)
        assert np.allclose(out, 0.25, atol=1e-15)

    def test_bilinear_monotone_ramp(self):
        out = grid.resize_bilinear(np.array([[0.0], [1.0]]), 4, 1)[:, 0]
        assert np.all(np.diff(out) >= 0)
        assert out.min() >= 0.0 and out.max() <= 1.0
        assert np.allclose(out, [0.0, 0.25, 0.75, 1.0])

    def test_bilinear_adjoint(self, rng):
        x = rng.standard_normal((6, 4))
        y = rng.standard_normal((3, 7))
        lhs = np.sum(grid.resize_bilinear(x, 3, 7) * y)
        rhs = np.sum(x * grid.resize_bilinear_adjoint(y, 6, 4))
        assert lhs == pytest.approx(rhs, rel=1e-12)

    @pytest.mark.parametrize('scale, expected', [(1.0, (8, 6)), (0.5, (4, 3)), (0.25, (2, 1)), (0.01, (1, 1))])
    def test_scaled_size(self, scale, expected):
        assert grid.scaled_size(8, 6, scale) == expected
