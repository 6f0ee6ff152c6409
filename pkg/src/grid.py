"""Dense 2-D/3-D fields and the fixed-kernel operations applied to them.

A Grid is a 2-D float64 ``ndarray`` (H x W) and a FeatureMap a 3-D one
(C x H x W). Every operation here works on the last two axes, so the same
function serves grids and feature maps. The ``*_adjoint`` functions are the
transposed linear maps used by the differentiation tape.
"""
import numpy as np
from scipy.ndimage import uniform_filter

from src.constants.constants_numeric import NUMERIC_ERRORS
from src.core.errors import GridError, ShapeMismatchError


def as_grid(data, name='grid'):
    """Validate and convert ``data`` to a finite, non-empty H x W float64 array."""
    grid = np.asarray(data, dtype=np.float64)
    if grid.ndim != 2:
        raise GridError(NUMERIC_ERRORS.NOT_2D.format(name=name, shape=grid.shape))
    _check_values(grid, name)
    return grid


def as_feature_map(data, name='feature map'):
    fmap = np.asarray(data, dtype=np.float64)
    if fmap.ndim != 3:
        raise GridError(NUMERIC_ERRORS.NOT_3D.format(name=name, shape=fmap.shape))
    _check_values(fmap, name)
    return fmap


def _check_values(array, name):
    if array.size == 0:
        raise GridError(NUMERIC_ERRORS.EMPTY.format(name=name, shape=array.shape))
    if not np.all(np.isfinite(array)):
        raise GridError(NUMERIC_ERRORS.NON_FINITE.format(name=name))


def check_same_shape(left, right):
    if np.shape(left) != np.shape(right):
        raise ShapeMismatchError(NUMERIC_ERRORS.SHAPE_MISMATCH.format(left=np.shape(left), right=np.shape(right)))


def make_kernel(values):
    """Build an immutable 3x3 kernel."""
    kernel = np.array(values, dtype=np.float64)
    if kernel.shape != (3, 3):
        raise GridError(NUMERIC_ERRORS.KERNEL_SHAPE.format(shape=kernel.shape))
    kernel.setflags(write=False)
    return kernel


SOBEL_X = make_kernel([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]])
SOBEL_Y = make_kernel([[-1, -2, -1], [0, 0, 0], [1, 2, 1]])
PREWITT_X = make_kernel([[-1, 0, 1], [-1, 0, 1], [-1, 0, 1]])
PREWITT_Y = make_kernel([[-1, -1, -1], [0, 0, 0], [1, 1, 1]])
LAPLACIAN = make_kernel([[0, 1, 0], [1, -4, 1], [0, 1, 0]])


def _spatial_pad(ndim, amount):
    return [(0, 0)] * (ndim - 2) + [(amount, amount), (amount, amount)]


def conv2d_same(g, kernel):
    """Cross-correlate the last two axes with a 3x3 kernel, unit stride.

    Borders replicate the outermost cell, so constant fields map to zero.
    """
    g = np.asarray(g, dtype=np.float64)
    h, w = g.shape[-2:]
    padded = np.pad(g, _spatial_pad(g.ndim, 1), mode='edge')
    out = np.zeros_like(g)
    for a in range(3):
        for b in range(3):
            if kernel[a, b] != 0:
                out += kernel[a, b] * padded[..., a:a + h, b:b + w]
    return out


def conv2d_same_adjoint(grad, kernel):
    h, w = grad.shape[-2:]
    padded = np.zeros(grad.shape[:-2] + (h + 2, w + 2))
    for a in range(3):
        for b in range(3):
            if kernel[a, b] != 0:
                padded[..., a:a + h, b:b + w] += kernel[a, b] * grad
    # fold the replicated border back onto the cells it copied
    out = padded[..., 1:-1, 1:-1].copy()
    out[..., 0, :] += padded[..., 0, 1:-1]
    out[..., -1, :] += padded[..., -1, 1:-1]
    out[..., :, 0] += padded[..., 1:-1, 0]
    out[..., :, -1] += padded[..., 1:-1, -1]
    out[..., 0, 0] += padded[..., 0, 0]
    out[..., 0, -1] += padded[..., 0, -1]
    out[..., -1, 0] += padded[..., -1, 0]
    out[..., -1, -1] += padded[..., -1, -1]
    return out


def check_pool_size(k):
    if not isinstance(k, (int, np.integer)) or k < 1 or k % 2 == 0:
        raise GridError(NUMERIC_ERRORS.EVEN_POOL.format(k=k))


def _window(ndim, k):
    return (1,) * (ndim - 2) + (k, k)


def _in_bounds_fraction(shape, k):
    return uniform_filter(np.ones(shape), size=_window(len(shape), k), mode='constant', cval=0.0)


def avg_pool_same(g, k):
    """Mean over the k x k window clipped to the image bounds."""
    check_pool_size(k)
    g = np.asarray(g, dtype=np.float64)
    sums = uniform_filter(g, size=_window(g.ndim, k), mode='constant', cval=0.0)
    return sums / _in_bounds_fraction(g.shape, k)


def avg_pool_same_adjoint(grad, k):
    scaled = grad / _in_bounds_fraction(grad.shape, k)
    return uniform_filter(scaled, size=_window(grad.ndim, k), mode='constant', cval=0.0)


def _check_target(height, width):
    if height < 1 or width < 1:
        raise GridError(NUMERIC_ERRORS.BAD_TARGET.format(height=height, width=width))


def resize_nearest(g, height, width):
    """Nearest-neighbour rescale; source index = floor(target index * source / target)."""
    _check_target(height, width)
    g = np.asarray(g, dtype=np.float64)
    src_h, src_w = g.shape[-2:]
    if (src_h, src_w) == (height, width):
        return g.copy()
    rows = (np.arange(height) * src_h) // height
    cols = (np.arange(width) * src_w) // width
    return g[..., rows[:, None], cols[None, :]]


def bilinear_matrix(n_in, n_out):
    """Interpolation weights (n_out x n_in), half-pixel centres, edge-clamped."""
    if n_in == n_out:
        return np.eye(n_in)
    src = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
    src = np.clip(src, 0.0, n_in - 1)
    lower = np.floor(src).astype(int)
    upper = np.minimum(lower + 1, n_in - 1)
    frac = src - lower
    matrix = np.zeros((n_out, n_in))
    rows = np.arange(n_out)
    np.add.at(matrix, (rows, lower), 1.0 - frac)
    np.add.at(matrix, (rows, upper), frac)
    return matrix


def resize_bilinear(g, height, width):
    _check_target(height, width)
    g = np.asarray(g, dtype=np.float64)
    src_h, src_w = g.shape[-2:]
    if (src_h, src_w) == (height, width):
        return g.copy()
    return bilinear_matrix(src_h, height) @ g @ bilinear_matrix(src_w, width).T


def resize_bilinear_adjoint(grad, src_h, src_w):
    height, width = grad.shape[-2:]
    if (src_h, src_w) == (height, width):
        return grad.copy()
    return bilinear_matrix(src_h, height).T @ grad @ bilinear_matrix(src_w, width)


def scaled_size(height, width, scale):
    """Size of a grid resampled by ``scale``: floor(s*H) x floor(s*W), at least 1x1."""
    return max(1, int(np.floor(scale * height))), max(1, int(np.floor(scale * width)))
