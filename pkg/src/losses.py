"""Multi-scale RGB-edge consistency loss and its four terms.

Every term takes logits ``z`` (a :class:`Value` or array) and returns a
scalar :class:`Value`. Masks, weight maps, Sobel targets and sanitised edge
targets are constants of the graph.
"""
from dataclasses import dataclass, field, replace

import numpy as np

from src import grid
from src.autodiff import (Value, absolute, as_value, clip, mean, mul, power,
                          resize_bilinear, sigmoid, softplus, total)
from src.constants.constants_loss import LOSS_ERRORS
from src.core import settings
from src.core.errors import ConfigError, GridError
from src.edge_prior import check_tau, prior_values, sanitize_edges, sobel_magnitude

TERMS = ('fbce', 'wiou', 'fs', 'gt_edge', 'ual', 'rgb', 'total')


@dataclass(frozen=True)
class LossCoefficients:
    lambda_gt_edge: float = settings.LAMBDA_GT_EDGE
    lambda_ual: float = settings.LAMBDA_UAL
    lambda_rgb: float = settings.LAMBDA_RGB
    gamma: float = settings.FOCAL_GAMMA
    alpha: float = settings.BOUNDARY_ALPHA
    pool_k: int = settings.BOUNDARY_POOL_K
    tau: float = settings.EDGE_TAU
    scales: tuple = settings.LOSS_SCALES
    weights: tuple = settings.LOSS_SCALE_WEIGHTS

    def __post_init__(self):
        object.__setattr__(self, 'scales', tuple(float(s) for s in self.scales))
        object.__setattr__(self, 'weights', tuple(float(w) for w in self.weights))
        if not self.scales:
            raise ConfigError(LOSS_ERRORS.EMPTY_SCALES)
        if len(self.scales) != len(self.weights):
            raise ConfigError(LOSS_ERRORS.SCALE_WEIGHT_COUNT.format(scales=len(self.scales), weights=len(self.weights)))
        for scale in self.scales:
            if not 0.0 < scale <= 1.0:
                raise ConfigError(LOSS_ERRORS.SCALE_RANGE.format(scale=scale))
        for weight in self.weights:
            if weight <= 0.0:
                raise ConfigError(LOSS_ERRORS.WEIGHT_RANGE.format(weight=weight))
        for name in ('lambda_gt_edge', 'lambda_ual', 'lambda_rgb'):
            if getattr(self, name) < 0:
                raise ConfigError(LOSS_ERRORS.NEGATIVE_LAMBDA.format(name=name, value=getattr(self, name)))
        if not isinstance(self.pool_k, int) or self.pool_k < 1 or self.pool_k % 2 == 0:
            raise ConfigError(LOSS_ERRORS.POOL_SIZE.format(k=self.pool_k))
        try:
            check_tau(self.tau)
        except GridError as exc:
            raise ConfigError(str(exc)) from exc

    def replace(self, **changes):
        return replace(self, **changes)


@dataclass
class LossBreakdown:
    """Per-scale, per-term values and the aggregate L_total."""

    scales: tuple
    weights: tuple
    lambdas: dict
    terms: dict            # scale -> {term: float}
    total: float
    value: Value = field(repr=False, compare=False, default=None)

    def reconstruct(self):
        """Recompute the aggregate from the recorded parts."""
        weighted = 0.0
        for scale, weight in zip(self.scales, self.weights):
            parts = self.terms[scale]
            scale_total = parts['fs'] + sum(self.lambdas[name] * parts[name] for name in ('gt_edge', 'ual', 'rgb'))
            weighted += weight * scale_total
        return weighted / sum(self.weights)

    def as_row(self):
        row = {}
        for scale in self.scales:
            for term in TERMS:
                row[f'{term}@{scale:g}'] = self.terms[scale][term]
        row['total'] = self.total
        return row


def _check_shapes(z, y):
    grid.check_same_shape(as_value(z).data, np.asarray(y))


def boundary_weight_map(y, alpha=settings.BOUNDARY_ALPHA, k=settings.BOUNDARY_POOL_K):
    """w = 1 + alpha * |AvgPool_k(y) - y| for a binary mask y."""
    y = grid.as_grid(y, name='mask')
    if not np.all((y == 0.0) | (y == 1.0)):
        raise GridError(LOSS_ERRORS.NON_BINARY.format())
    return 1.0 + alpha * np.abs(grid.avg_pool_same(y, k) - y)


def focal_bce(z, y, w, gamma=settings.FOCAL_GAMMA):
    """Boundary-weighted focal cross-entropy from logits."""
    _check_shapes(z, y)
    grid.check_same_shape(np.asarray(y), np.asarray(w))
    z = as_value(z)
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    y_hat = clip(sigmoid(z), settings.PROB_CLAMP, 1.0 - settings.PROB_CLAMP)
    p_t = y_hat * y + (1.0 - y_hat) * (1.0 - y)
    modulation = power(1.0 - p_t, gamma)
    bce = softplus(z) - z * y
    return total(w * modulation * bce) * (1.0 / (w.sum() + settings.EPSILON))


def weighted_iou(z, y, w):
    _check_shapes(z, y)
    grid.check_same_shape(np.asarray(y), np.asarray(w))
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    y_hat = sigmoid(z)
    intersection = total(w * y_hat * y)
    union = total(w * (y_hat + y)) - intersection
    return 1.0 - (intersection + 1.0) / (union + 1.0)


def focal_structure(z, y, alpha=settings.BOUNDARY_ALPHA, k=settings.BOUNDARY_POOL_K,
                    gamma=settings.FOCAL_GAMMA, w=None):
    """L_fs = L_fbce + L_wIoU sharing one boundary weight map."""
    if w is None:
        w = boundary_weight_map(y, alpha, k)
    return focal_bce(z, y, w, gamma) + weighted_iou(z, y, w)


def gt_edge_loss(z, y):
    """Mean |S(sigmoid(z)) - S(y)|."""
    _check_shapes(z, y)
    target = sobel_magnitude(np.asarray(y, dtype=np.float64))
    return mean(absolute(sobel_magnitude(sigmoid(z)) - target))


def uncertainty_loss(z):
    """Mean of u = 1 - |2 y_hat - 1|^2."""
    y_hat = sigmoid(z)
    return mean(1.0 - power(2.0 * y_hat - 1.0, 2))


def rgb_edge_loss(z, e, tau=settings.EDGE_TAU):
    """Mean |S(sigmoid(z)) - E~| with E~ the sanitised prior."""
    target = sanitize_edges(e, tau)
    _check_shapes(z, target)
    return mean(absolute(sobel_magnitude(sigmoid(z)) - target))


def _resample(z, y, e, height, width):
    if (height, width) == y.shape:
        return z, y, e
    z_s = resize_bilinear(z, height, width)
    y_s = (grid.resize_bilinear(y, height, width) >= 0.5).astype(np.float64)
    e_s = np.clip(grid.resize_bilinear(e, height, width), 0.0, 1.0)
    return z_s, y_s, e_s


def multiscale_total(z, y, e, coeffs=None):
    """Weighted mean over scales of L_fs + lambda-weighted edge and uncertainty terms.

    Terms whose lambda is zero are still evaluated and recorded, but do not
    enter the differentiable total.
    """
    coeffs = coeffs or LossCoefficients()
    z = as_value(z)
    y = grid.as_grid(y, name='mask')
    e = prior_values(e)
    _check_shapes(z, y)
    grid.check_same_shape(y, e)
    lambdas = {'gt_edge': coeffs.lambda_gt_edge, 'ual': coeffs.lambda_ual, 'rgb': coeffs.lambda_rgb}
    terms = {}
    aggregate = None
    for scale, weight in zip(coeffs.scales, coeffs.weights):
        height, width = grid.scaled_size(y.shape[0], y.shape[1], scale)
        z_s, y_s, e_s = _resample(z, y, e, height, width)
        w = boundary_weight_map(y_s, coeffs.alpha, coeffs.pool_k)
        parts = {
            'fbce': focal_bce(z_s, y_s, w, coeffs.gamma),
            'wiou': weighted_iou(z_s, y_s, w),
            'gt_edge': gt_edge_loss(z_s, y_s),
            'ual': uncertainty_loss(z_s),
            'rgb': rgb_edge_loss(z_s, e_s, coeffs.tau),
        }
        parts['fs'] = parts['fbce'] + parts['wiou']
        scale_total = parts['fs']
        for name, lam in lambdas.items():
            if lam != 0.0:
                scale_total = scale_total + lam * parts[name]
        parts['total'] = scale_total
        terms[scale] = {name: value.item() for name, value in parts.items()}
        weighted = mul(scale_total, weight)
        aggregate = weighted if aggregate is None else aggregate + weighted
    aggregate = aggregate * (1.0 / sum(coeffs.weights))
    return LossBreakdown(coeffs.scales, coeffs.weights, lambdas, terms, aggregate.item(), aggregate)
