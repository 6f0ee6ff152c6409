"""Samples, the synthetic camouflage generator and the Images/GT layout reader."""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.ndimage import label

from src import grid
from src.constants.constants_data import DATA_ERRORS, DATA_LOGS
from src.core import settings
from src.core.checks import is_integer, is_real
from src.core.errors import ConfigError, DatasetError
from src.edge_prior import EdgeOperator, ImageRGB, extract_edge_prior
from src.png_io import cached_prior, read_gray, read_image

logger = logging.getLogger(__name__)

MIXED = 'mixed'
MAX_SHAPE_ATTEMPTS = 50
TEXTURE_RANGE = (0.25, 0.75)
CHANNEL_TINT = 0.05


@dataclass
class Sample:
    image: ImageRGB
    mask: np.ndarray
    identifier: str
    priors: dict = field(default_factory=dict, repr=False)
    cache_dir: str = None

    def __post_init__(self):
        self.mask = grid.as_grid(self.mask, name='mask')
        if self.mask.shape != self.image.shape:
            raise DatasetError(DATA_ERRORS.SIZE_MISMATCH.format(
                stem=self.identifier, image_size=self.image.shape, mask_size=self.mask.shape))
        if not np.all((self.mask == 0.0) | (self.mask == 1.0)):
            raise DatasetError(DATA_ERRORS.NON_BINARY_MASK.format(stem=self.identifier))

    def ensure_prior(self, op=None):
        """Edge prior for ``op``, computed once per operator setting."""
        op = op or EdgeOperator()
        if op.tag not in self.priors:
            if self.cache_dir is not None:
                self.priors[op.tag] = cached_prior(self.image, op, self.cache_dir, self.identifier)
            else:
                self.priors[op.tag] = extract_edge_prior(self.image, op)
        return self.priors[op.tag]


@dataclass(frozen=True)
class SyntheticConfig:
    count: int = settings.SYNTH_COUNT
    height: int = settings.SYNTH_SIZE
    width: int = settings.SYNTH_SIZE
    seed: int = 0
    delta: float = settings.SYNTH_DELTA
    octaves: int = settings.SYNTH_OCTAVES
    family: str = settings.SHAPE_FAMILIES[0]

    def __post_init__(self):
        for name in ('count', 'height', 'width', 'octaves'):
            if not is_integer(getattr(self, name)) or getattr(self, name) < 1:
                raise ConfigError(DATA_ERRORS.BAD_SYNTHETIC.format(name=name, value=getattr(self, name)))
        if not is_real(self.delta) or not 0.0 < self.delta <= 0.2:
            raise ConfigError(DATA_ERRORS.BAD_SYNTHETIC.format(name='delta', value=self.delta))
        if self.family not in settings.SHAPE_FAMILIES + (MIXED,):
            raise ConfigError(DATA_ERRORS.UNKNOWN_FAMILY.format(
                family=self.family, choices=', '.join(settings.SHAPE_FAMILIES + (MIXED,))))


def value_noise(rng, height, width, octaves):
    """Multi-octave value noise normalised to [0, 1]."""
    field_ = np.zeros((height, width))
    amplitude = 1.0
    for octave in range(octaves):
        cells = 2 ** (octave + 2)
        field_ += amplitude * grid.resize_bilinear(rng.random((cells, cells)), height, width)
        amplitude *= 0.5
    low, high = field_.min(), field_.max()
    if high - low <= 0.0:
        return np.full((height, width), 0.5)
    return (field_ - low) / (high - low)


def _texture(rng, height, width, octaves):
    low, high = TEXTURE_RANGE
    return low + (high - low) * value_noise(rng, height, width, octaves)


def _segment_distance(ys, xs, p0, p1):
    d = p1 - p0
    t = np.clip(((ys - p0[0]) * d[0] + (xs - p0[1]) * d[1]) / max(d @ d, 1e-12), 0.0, 1.0)
    return np.hypot(ys - (p0[0] + t * d[0]), xs - (p0[1] + t * d[1]))


def _blob(rng, ys, xs, size):
    center = rng.uniform(0.35, 0.65, 2) * size
    radius = rng.uniform(0.15, 0.35) * min(size)
    theta = np.arctan2(ys - center[0], xs - center[1])
    r = np.ones_like(theta)
    for k in range(2, 5):
        r += rng.uniform(0.0, 0.15) * np.cos(k * theta + rng.uniform(0, 2 * np.pi))
    return np.hypot(ys - center[0], xs - center[1]) < radius * r


def _elongated(rng, ys, xs, size):
    center = rng.uniform(0.4, 0.6, 2) * size
    angle = rng.uniform(0, np.pi)
    half_length = rng.uniform(0.25, 0.4) * min(size)
    direction = np.array([np.sin(angle), np.cos(angle)])
    thickness = max(1.0, rng.uniform(0.04, 0.08) * min(size))
    distance = _segment_distance(ys, xs, center - half_length * direction, center + half_length * direction)
    return distance < thickness


def _multi_pronged(rng, ys, xs, size):
    center = rng.uniform(0.4, 0.6, 2) * size
    core = rng.uniform(0.1, 0.16) * min(size)
    mask = np.hypot(ys - center[0], xs - center[1]) < core
    prongs = rng.integers(3, 6)
    offset = rng.uniform(0, 2 * np.pi)
    for k in range(prongs):
        angle = offset + 2 * np.pi * k / prongs + rng.uniform(-0.3, 0.3)
        tip = center + rng.uniform(0.25, 0.4) * min(size) * np.array([np.sin(angle), np.cos(angle)])
        thickness = max(1.0, rng.uniform(0.03, 0.05) * min(size))
        mask |= _segment_distance(ys, xs, center, tip) < thickness
    return mask


SHAPES = {'blob': _blob, 'elongated': _elongated, 'multi-pronged': _multi_pronged}


def largest_component(mask):
    labels, count = label(mask)
    if count <= 1:
        return mask
    sizes = np.bincount(labels.ravel())[1:]
    return labels == (np.argmax(sizes) + 1)


def random_mask(rng, height, width, family, index=0):
    """A connected shape mask whose area fraction lies inside MASK_AREA_BAND."""
    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64) + 0.5
    size = np.array([height, width], dtype=np.float64)
    low, high = settings.MASK_AREA_BAND
    for _ in range(MAX_SHAPE_ATTEMPTS):
        mask = largest_component(SHAPES[family](rng, ys, xs, size))
        area = mask.mean()
        if low <= area <= high:
            return mask.astype(np.float64)
        logger.debug(DATA_LOGS.AREA_RETRY.format(index=index, area=area))
    raise DatasetError(DATA_ERRORS.AREA_BAND.format(band=settings.MASK_AREA_BAND, index=index))


def synthetic_sample(cfg, index):
    rng = np.random.default_rng([cfg.seed, index])
    family = cfg.family
    if family == MIXED:
        family = settings.SHAPE_FAMILIES[index % len(settings.SHAPE_FAMILIES)]
    mask = random_mask(rng, cfg.height, cfg.width, family, index)
    background = _texture(rng, cfg.height, cfg.width, cfg.octaves)
    foreground = _texture(rng, cfg.height, cfg.width, cfg.octaves) + cfg.delta
    gray = np.where(mask == 1.0, foreground, background)
    tint = rng.uniform(-CHANNEL_TINT, CHANNEL_TINT, 3)
    channels = [np.clip(gray + t, 0.0, 1.0) for t in tint]
    return Sample(ImageRGB(*channels), mask, f'synth_{cfg.seed}_{index:05d}')


def generate_synthetic(cfg=None):
    """Low-contrast textured scenes with exact masks; deterministic per seed."""
    cfg = cfg or SyntheticConfig()
    samples = [synthetic_sample(cfg, index) for index in range(cfg.count)]
    logger.info(DATA_LOGS.SYNTHETIC.format(count=cfg.count, height=cfg.height, width=cfg.width,
                                           family=cfg.family, delta=cfg.delta, seed=cfg.seed))
    return samples


def _load_pair(image_path, gt_dir, cache_dir):
    stem = image_path.stem
    gt_path = gt_dir / f'{stem}.png'
    if not gt_path.exists():
        raise DatasetError(DATA_ERRORS.MISSING_GT.format(stem=stem, gt_dir=gt_dir))
    image = read_image(image_path)
    mask = read_gray(gt_path)
    if mask.shape != image.shape:
        raise DatasetError(DATA_ERRORS.SIZE_MISMATCH.format(stem=stem, image_size=image.shape, mask_size=mask.shape))
    binary = (mask >= settings.GT_THRESHOLD / 255.0).astype(np.float64)
    return Sample(image, binary, stem, cache_dir=cache_dir)


def list_images(images_dir):
    images_dir = Path(images_dir)
    if not images_dir.is_dir():
        return []
    files = [p for p in images_dir.iterdir() if p.is_file() and p.suffix.lower() in settings.IMAGE_SUFFIXES]
    return sorted(files, key=lambda p: (p.stem, p.suffix))


def load_dataset(root, workers=1, cache_dir=None):
    """Pair ``<root>/Images/*`` with ``<root>/GT/<stem>.png``, sorted by stem."""
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(DATA_ERRORS.MISSING_ROOT.format(root=root))
    images = list_images(root / settings.IMAGES_DIR)
    if not images:
        logger.info(DATA_LOGS.NO_IMAGES.format(path=root / settings.IMAGES_DIR))
        return []
    gt_dir = root / settings.GT_DIR
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(lambda p: _load_pair(p, gt_dir, cache_dir), images))
    else:
        samples = [_load_pair(p, gt_dir, cache_dir) for p in images]
    logger.info(DATA_LOGS.LOADED.format(count=len(samples), root=root))
    return samples


def split_holdout(samples, holdout):
    """First N - holdout samples train, the rest are held out."""
    total = len(samples)
    if not 0 < holdout < total:
        raise DatasetError(DATA_ERRORS.BAD_HOLDOUT.format(holdout=holdout, total=total))
    logger.info(DATA_LOGS.SPLIT.format(total=total, train=total - holdout, test=holdout))
    return samples[:total - holdout], samples[total - holdout:]
