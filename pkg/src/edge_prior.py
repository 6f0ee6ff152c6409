"""RGB edge priors: grayscale projection, five extractors, target sanitising."""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import gaussian_filter, label

from src import grid
from src.autodiff import Value, as_value, clip, conv2d_same, sqrt
from src.constants.constants_edge import EDGE_ERRORS, EDGE_LOGS
from src.core import settings
from src.core.checks import is_real
from src.core.errors import ConfigError, GridError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ImageRGB:
    r: np.ndarray
    g: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        channels = {}
        for name in ('r', 'g', 'b'):
            channels[name] = grid.as_grid(getattr(self, name), name=f'channel {name.upper()}')
            object.__setattr__(self, name, channels[name])
        shapes = {name: c.shape for name, c in channels.items()}
        if len(set(shapes.values())) != 1:
            raise GridError(EDGE_ERRORS.CHANNEL_MISMATCH.format(**shapes))
        for name, c in channels.items():
            if c.min() < 0.0 or c.max() > 1.0:
                raise GridError(EDGE_ERRORS.OUT_OF_RANGE.format(channel=name.upper()))

    @classmethod
    def from_array(cls, array):
        """Build from a 3 x H x W (channels first) or H x W x 3 array."""
        array = np.asarray(array, dtype=np.float64)
        if array.ndim == 3 and array.shape[0] != 3 and array.shape[-1] == 3:
            array = np.moveaxis(array, -1, 0)
        return cls(array[0], array[1], array[2])

    @classmethod
    def from_gray(cls, gray):
        gray = np.asarray(gray, dtype=np.float64)
        return cls(gray, gray.copy(), gray.copy())

    @property
    def shape(self):
        return self.r.shape

    def as_array(self):
        return np.stack([self.r, self.g, self.b])


@dataclass(frozen=True)
class EdgeOperator:
    """One of the five extractors plus its parameters."""

    name: str = settings.SOBEL
    sigma: float = None
    low: float = settings.CANNY_LOW
    high: float = settings.CANNY_HIGH

    def __post_init__(self):
        if not isinstance(self.name, str):
            raise ConfigError(EDGE_ERRORS.OPERATOR_NAME.format(name=self.name))
        name = self.name.lower()
        if name not in settings.EDGE_OPERATORS:
            raise ConfigError(EDGE_ERRORS.UNKNOWN_OPERATOR.format(name=self.name, choices=', '.join(settings.EDGE_OPERATORS)))
        object.__setattr__(self, 'name', name)
        if self.sigma is None:
            object.__setattr__(self, 'sigma', settings.CANNY_SIGMA if name == settings.CANNY else settings.LOG_SIGMA)
        if not is_real(self.sigma) or self.sigma <= 0:
            raise ConfigError(EDGE_ERRORS.BAD_PARAMETER.format(name='sigma', value=self.sigma))
        if name == settings.CANNY and not 0 < self.low < self.high:
            raise ConfigError(EDGE_ERRORS.CANNY_THRESHOLDS.format(low=self.low, high=self.high))

    @property
    def tag(self):
        """Identifier including every parameter that changes the output."""
        if self.name == settings.LOG:
            return f'log_s{self.sigma:g}'
        if self.name == settings.CANNY:
            return f'canny_s{self.sigma:g}_l{self.low:g}_h{self.high:g}'
        return self.name


@dataclass(frozen=True)
class EdgePrior:
    values: np.ndarray
    operator: str = field(default=settings.SOBEL)

    def __post_init__(self):
        object.__setattr__(self, 'values', np.clip(grid.as_grid(self.values, name='edge prior'), 0.0, 1.0))

    @property
    def shape(self):
        return self.values.shape


def prior_values(e):
    return e.values if isinstance(e, EdgePrior) else np.asarray(e, dtype=np.float64)


def to_grayscale(img):
    wr, wg, wb = settings.LUMA_WEIGHTS
    return np.clip(wr * img.r + wg * img.g + wb * img.b, 0.0, 1.0)


def gradient_magnitude(g, kernel_x, kernel_y):
    """sqrt((Kx*g)^2 + (Ky*g)^2 + eps) clipped to [0, 1]; differentiable on Values."""
    v = as_value(g)
    gx = conv2d_same(v, kernel_x)
    gy = conv2d_same(v, kernel_y)
    magnitude = clip(sqrt(gx * gx + gy * gy + settings.EPSILON), 0.0, 1.0)
    return magnitude if isinstance(g, Value) else magnitude.data


def sobel_magnitude(g):
    return gradient_magnitude(g, grid.SOBEL_X, grid.SOBEL_Y)


def prewitt_magnitude(g):
    return gradient_magnitude(g, grid.PREWITT_X, grid.PREWITT_Y)


def laplacian_response(g):
    return np.clip(np.abs(grid.conv2d_same(g, grid.LAPLACIAN)), 0.0, 1.0)


def log_response(g, sigma):
    smoothed = gaussian_filter(g, sigma, mode='nearest')
    return np.clip(np.abs(grid.conv2d_same(smoothed, grid.LAPLACIAN)), 0.0, 1.0)


# gradient direction bins -> (negative-side, positive-side) neighbour offsets
_NMS_NEIGHBOURS = (
    ((0, -1), (0, 1)),     # ~0 deg
    ((-1, -1), (1, 1)),    # ~45 deg
    ((-1, 0), (1, 0)),     # ~90 deg
    ((-1, 1), (1, -1)),    # ~135 deg
)


def _shifted(a, dy, dx):
    """out[i, j] = a[i + dy, j + dx], zero outside."""
    h, w = a.shape
    out = np.zeros_like(a)
    out[max(0, -dy):h - max(0, dy), max(0, -dx):w - max(0, dx)] = \
        a[max(0, dy):h - max(0, -dy), max(0, dx):w - max(0, -dx)]
    return out


def _non_maximum_suppression(magnitude, gx, gy):
    angle = np.rad2deg(np.arctan2(gy, gx)) % 180.0
    direction = (np.floor((angle + 22.5) / 45.0).astype(int)) % 4
    keep = np.zeros(magnitude.shape, dtype=bool)
    for index, ((ny, nx), (py, px)) in enumerate(_NMS_NEIGHBOURS):
        # >= on one side and > on the other keeps one pixel of a symmetric ridge
        local_max = (magnitude >= _shifted(magnitude, ny, nx)) & (magnitude > _shifted(magnitude, py, px))
        keep |= (direction == index) & local_max
    return np.where(keep, magnitude, 0.0)


def _hysteresis(thin, low, high):
    weak = thin >= low
    labels, count = label(weak, structure=np.ones((3, 3)))
    if count == 0:
        return np.zeros_like(thin)
    strong_labels = np.unique(labels[(thin >= high) & weak])
    strong_labels = strong_labels[strong_labels > 0]
    return np.isin(labels, strong_labels).astype(np.float64)


def canny_edges(g, sigma=settings.CANNY_SIGMA, low=settings.CANNY_LOW, high=settings.CANNY_HIGH):
    """Binary Canny map: smoothing, Sobel gradient, thinning, double threshold."""
    smoothed = gaussian_filter(np.asarray(g, dtype=np.float64), sigma, mode='nearest')
    gx = grid.conv2d_same(smoothed, grid.SOBEL_X)
    gy = grid.conv2d_same(smoothed, grid.SOBEL_Y)
    magnitude = np.hypot(gx, gy)
    peak = magnitude.max()
    if peak <= 0.0:
        return np.zeros_like(magnitude)
    thin = _non_maximum_suppression(magnitude / peak, gx, gy)
    return _hysteresis(thin, low, high)


def extract_edge_prior(img, op=None):
    op = op or EdgeOperator()
    gray = to_grayscale(img)
    if op.name == settings.SOBEL:
        values = sobel_magnitude(gray)
    elif op.name == settings.PREWITT:
        values = prewitt_magnitude(gray)
    elif op.name == settings.LAPLACIAN:
        values = laplacian_response(gray)
    elif op.name == settings.LOG:
        values = log_response(gray, op.sigma)
    else:
        values = canny_edges(gray, op.sigma, op.low, op.high)
    prior = EdgePrior(values, op.tag)
    logger.debug(EDGE_LOGS.EXTRACTED.format(operator=op.tag, height=gray.shape[0], width=gray.shape[1], mean=values.mean()))
    return prior


def check_tau(tau):
    if not 0.0 <= tau < 1.0:
        raise GridError(EDGE_ERRORS.BAD_TAU.format(tau=tau))


def sanitize_edges(e, tau=settings.EDGE_TAU):
    """max(0, (AvgPool3(E) - tau) / (1 - tau))."""
    check_tau(tau)
    smoothed = grid.avg_pool_same(prior_values(e), 3)
    return np.maximum(0.0, (smoothed - tau) / (1.0 - tau))
