"""S-measure, E-measure, weighted F-measure and MAE for probability maps.

Definitions follow the de-facto camouflaged/salient object evaluation
toolkits. Predictions are taken as-is in [0, 1]; ground truth is binary.
"""
import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import convolve

from src import grid
from src.constants.constants_eval import EVAL_ERRORS, EVAL_LOGS
from src.core import settings
from src.core.errors import GridError
from src.distance import distance_transform

logger = logging.getLogger(__name__)

EPS = np.spacing(1)
S_ALPHA = 0.5
WFM_BETA2 = 1.0
WFM_SIGMA = 5.0
WFM_KERNEL = 7


def prepare(pred, gt):
    """Validate a (prediction, mask) pair; returns float pred and boolean gt."""
    pred = grid.as_grid(pred, name='prediction')
    gt = grid.as_grid(gt, name='ground truth')
    grid.check_same_shape(pred, gt)
    if pred.min() < 0.0 or pred.max() > 1.0:
        raise GridError(EVAL_ERRORS.PRED_RANGE)
    if not np.all((gt == 0.0) | (gt == 1.0)):
        raise GridError(EVAL_ERRORS.NON_BINARY_GT)
    return pred, gt.astype(bool)


def mae(pred, gt):
    pred, gt = prepare(pred, gt)
    return float(np.mean(np.abs(pred - gt)))


# --- S-measure ------------------------------------------------------------------

def _s_object(pred, region):
    values = pred[region]
    if values.size == 0:
        return 0.0
    x = values.mean()
    sigma_x = values.std(ddof=1) if values.size > 1 else 0.0
    return 2.0 * x / (x * x + 1.0 + sigma_x + EPS)


def _object_score(pred, gt):
    fg = np.where(gt, pred, 0.0)
    bg = np.where(~gt, 1.0 - pred, 0.0)
    u = gt.mean()
    return u * _s_object(fg, gt) + (1.0 - u) * _s_object(bg, ~gt)


def centroid(gt):
    """1-based split point (x, y): the rounded foreground centroid, image centre when empty."""
    height, width = gt.shape
    if not gt.any():
        return int(np.round(width / 2)) + 1, int(np.round(height / 2)) + 1
    y, x = np.argwhere(gt).mean(axis=0).round()
    return int(x) + 1, int(y) + 1


def _ssim(pred, gt):
    n = pred.size
    if n == 0:
        return 0.0
    x, y = pred.mean(), gt.mean()
    if n > 1:
        sigma_x = np.sum((pred - x) ** 2) / (n - 1)
        sigma_y = np.sum((gt - y) ** 2) / (n - 1)
        sigma_xy = np.sum((pred - x) * (gt - y)) / (n - 1)
    else:
        sigma_x = sigma_y = sigma_xy = 0.0
    alpha = 4.0 * x * y * sigma_xy
    beta = (x * x + y * y) * (sigma_x + sigma_y)
    if alpha != 0:
        return alpha / (beta + EPS)
    return 1.0 if beta == 0 else 0.0


def _region_score(pred, gt):
    height, width = gt.shape
    area = height * width
    x, y = centroid(gt)
    gt = gt.astype(np.float64)
    w1 = x * y / area
    w2 = y * (width - x) / area
    w3 = (height - y) * x / area
    w4 = 1.0 - w1 - w2 - w3
    quadrants = ((slice(0, y), slice(0, x)), (slice(0, y), slice(x, width)),
                 (slice(y, height), slice(0, x)), (slice(y, height), slice(x, width)))
    scores = [_ssim(pred[q], gt[q]) for q in quadrants]
    return w1 * scores[0] + w2 * scores[1] + w3 * scores[2] + w4 * scores[3]


def s_measure(pred, gt):
    pred, gt = prepare(pred, gt)
    y = gt.mean()
    if y == 0:
        return float(1.0 - pred.mean())
    if y == 1:
        return float(pred.mean())
    score = S_ALPHA * _object_score(pred, gt) + (1.0 - S_ALPHA) * _region_score(pred, gt)
    return float(np.clip(score, 0.0, 1.0))


# --- E-measure ------------------------------------------------------------------

def _enhanced(a, b):
    align = 2.0 * a * b / (a * a + b * b + EPS)
    return (align + 1.0) ** 2 / 4.0


def e_measure(pred, gt):
    """Adaptive-threshold enhanced alignment, counted over the four (pred, gt) combinations."""
    pred, gt = prepare(pred, gt)
    n = gt.size
    binary = pred >= min(2.0 * pred.mean(), 1.0)
    gt_fg = int(gt.sum())
    fg_fg = int(np.count_nonzero(binary & gt))
    fg_bg = int(np.count_nonzero(binary & ~gt))
    pred_fg = fg_fg + fg_bg
    pred_bg = n - pred_fg
    if gt_fg == 0:
        total = pred_bg
    elif gt_fg == n:
        total = pred_fg
    else:
        bg_fg = gt_fg - fg_fg
        bg_bg = pred_bg - bg_fg
        mean_pred, mean_gt = pred_fg / n, gt_fg / n
        pred_values = (1.0 - mean_pred, -mean_pred)
        gt_values = (1.0 - mean_gt, -mean_gt)
        counts = ((fg_fg, fg_bg), (bg_fg, bg_bg))
        total = sum(_enhanced(pred_values[i], gt_values[j]) * counts[i][j]
                    for i in range(2) for j in range(2) if counts[i][j])
    return float(total / n)


# --- weighted F-measure ---------------------------------------------------------

def gaussian_kernel(size=WFM_KERNEL, sigma=WFM_SIGMA):
    """Normalised size x size Gaussian with negligible tails zeroed."""
    m = (size - 1) / 2.0
    y, x = np.ogrid[-m:m + 1, -m:m + 1]
    h = np.exp(-(x * x + y * y) / (2.0 * sigma * sigma))
    h[h < np.finfo(h.dtype).eps * h.max()] = 0
    return h / h.sum()


def background_weight(dist):
    return 2.0 - np.exp(np.log(0.5) / 5.0 * dist)


def weighted_fbeta(pred, gt):
    pred, gt = prepare(pred, gt)
    if not gt.any():
        return 0.0
    dist, rows, cols = distance_transform(gt)
    error = np.abs(pred - gt)
    spread = error.copy()
    spread[~gt] = error[rows[~gt], cols[~gt]]
    smoothed = convolve(spread, gaussian_kernel(), mode='constant', cval=0.0)
    min_error = np.where(gt & (smoothed < error), smoothed, error)
    weights = np.where(gt, 1.0, background_weight(dist))
    weighted = min_error * weights
    tp = gt.sum() - weighted[gt].sum()
    fp = weighted[~gt].sum()
    recall = 1.0 - weighted[gt].mean()
    precision = tp / (tp + fp + EPS)
    q = (1.0 + WFM_BETA2) * recall * precision / (recall + WFM_BETA2 * precision + EPS)
    return float(q)


# --- aggregation ----------------------------------------------------------------

@dataclass(frozen=True)
class MetricsReport:
    s_measure: float
    e_measure: float
    weighted_fbeta: float
    mae: float
    count: int

    def as_row(self, config):
        fmt = settings.CSV_FLOAT_FORMAT
        return [config] + [fmt.format(v) for v in (self.s_measure, self.e_measure, self.weighted_fbeta, self.mae)]


def image_metrics(pred, gt):
    return s_measure(pred, gt), e_measure(pred, gt), weighted_fbeta(pred, gt), mae(pred, gt)


def evaluate(preds, gts, workers=1, config=None):
    """Average the four metrics over aligned prediction and mask sets."""
    preds, gts = list(preds), list(gts)
    if len(preds) != len(gts):
        raise GridError(EVAL_ERRORS.LENGTH_MISMATCH.format(preds=len(preds), gts=len(gts)))
    if not preds:
        raise GridError(EVAL_ERRORS.EMPTY_SET)
    logger.debug(EVAL_LOGS.START.format(count=len(preds), workers=workers))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_image = list(pool.map(image_metrics, preds, gts))
    else:
        per_image = [image_metrics(p, g) for p, g in zip(preds, gts)]
    s, e, f, m = (float(np.mean(column)) for column in zip(*per_image))
    report = MetricsReport(s, e, f, m, len(preds))
    if config is not None:
        logger.info(EVAL_LOGS.REPORT.format(config=config, s=s, e=e, f=f, mae=m, count=len(preds)))
    return report


def write_metrics_csv(path, rows):
    """Write ``(config, MetricsReport)`` pairs under the standard header."""
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(settings.METRICS_HEADER)
        for config, report in rows:
            writer.writerow(report.as_row(config))
    logger.info(EVAL_LOGS.CSV_WRITTEN.format(path=path))
