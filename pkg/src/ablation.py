"""Train/sample/evaluate experiments and the two ablation grids."""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from tqdm import tqdm

from src.constants.constants_cli import ABLATE_LOGS
from src.core import settings
from src.core.config import EdgeConfig
from src.data import generate_synthetic, load_dataset, split_holdout
from src.denoiser import Denoiser
from src.diffusion import make_schedule, sample
from src.edge_prior import sobel_magnitude
from src.metrics import evaluate
from src.trainer import train

logger = logging.getLogger(__name__)

LOSS_ROWS = (
    ('fs-single', ()),
    ('fs-multi', ()),
    ('fs-multi+gt_edge', ('lambda_gt_edge',)),
    ('fs-multi+ual', ('lambda_ual',)),
    ('fs-multi+gt_edge+ual', ('lambda_gt_edge', 'lambda_ual')),
    ('full', ('lambda_gt_edge', 'lambda_ual', 'lambda_rgb')),
)
LAMBDAS = ('lambda_gt_edge', 'lambda_ual', 'lambda_rgb')


@dataclass
class ExperimentResult:
    tag: str
    report: object
    edge_error: float
    run: object
    denoiser: Denoiser


def load_samples(cfg):
    """Samples named by the data section: an Images/GT root or synthetic scenes."""
    data = cfg.data
    if data.root is not None:
        return load_dataset(data.root, workers=data.workers, cache_dir=data.cache_dir)
    samples = generate_synthetic(data.synthetic(cfg.seed))
    for s in samples:
        s.cache_dir = data.cache_dir
    return samples


def edge_error(pred, mask):
    """Mean |S(pred) - S(mask)|, the ground-truth edge loss of a probability map."""
    return float(np.mean(np.abs(sobel_magnitude(pred) - sobel_magnitude(np.asarray(mask, dtype=np.float64)))))


def predict(denoiser, samples, schedule, cfg, workers=1, progress=False):
    """Run the sampler once per sample; sample i is seeded with (seed, i)."""
    op = cfg.edge.to_operator()
    injection = cfg.injection_or_none

    def run(item):
        index, s = item
        return sample(denoiser, s.image, s.ensure_prior(op), schedule, cfg.diffusion.sampling_steps,
                      seed=[cfg.seed, index], injection=injection)

    # priors are computed up front so worker threads only read samples
    for s in samples:
        s.ensure_prior(op)
    items = list(enumerate(samples))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(tqdm(pool.map(run, items), total=len(items), desc='sample', disable=not progress))
    return [run(item) for item in tqdm(items, desc='sample', disable=not progress)]


def run_experiment(cfg, samples, tag, progress=False):
    """Train on the first N - holdout samples, then sample and score the rest."""
    train_set, test_set = split_holdout(samples, cfg.data.holdout)
    schedule = make_schedule(cfg.diffusion.timesteps)
    denoiser = Denoiser(cfg.denoiser, seed=cfg.seed)
    run = train(denoiser, train_set, cfg.loss, cfg.trainer, schedule=schedule, injection=cfg.injection_or_none,
                edge_operator=cfg.edge.to_operator(), seed=cfg.seed, progress=progress)
    preds = predict(denoiser, test_set, schedule, cfg, cfg.data.workers, progress)
    masks = [s.mask for s in test_set]
    report = evaluate(preds, masks, workers=cfg.data.workers, config=tag)
    error = float(np.mean([edge_error(p, m) for p, m in zip(preds, masks)]))
    return ExperimentResult(tag, report, error, run, denoiser)


def edge_configs(cfg):
    """One configuration per operator, in table order; the configured operator keeps its sigma."""
    configured = cfg.edge.to_operator().name
    return [(name, cfg.replace(edge=EdgeConfig(name, cfg.edge.sigma if name == configured else None,
                                               cfg.edge.low, cfg.edge.high)))
            for name in settings.EDGE_OPERATORS]


def loss_lattice(coeffs):
    """The six loss configurations, each enabling the named lambdas at their configured values."""
    rows = []
    for tag, enabled in LOSS_ROWS:
        changes = {name: (getattr(coeffs, name) if name in enabled else 0.0) for name in LAMBDAS}
        if tag == 'fs-single':
            changes.update(scales=(1.0,), weights=(1.0,))
        rows.append((tag, coeffs.replace(**changes)))
    return rows


def loss_configs(cfg):
    return [(tag, cfg.replace(loss=coeffs)) for tag, coeffs in loss_lattice(cfg.loss)]


def run_grid(configs, samples, progress=False):
    results = []
    for index, (tag, cfg) in enumerate(configs, start=1):
        logger.info(ABLATE_LOGS.ROW_START.format(tag=tag, index=index, total=len(configs)))
        result = run_experiment(cfg, samples, tag, progress)
        r = result.report
        logger.info(ABLATE_LOGS.ROW_DONE.format(tag=tag, s=r.s_measure, e=r.e_measure, f=r.weighted_fbeta,
                                                mae=r.mae, edge=result.edge_error))
        results.append(result)
    return results


def ablate_edge(cfg, samples=None, progress=False):
    samples = samples if samples is not None else load_samples(cfg)
    return run_grid(edge_configs(cfg), samples, progress)


def ablate_loss(cfg, samples=None, progress=False):
    samples = samples if samples is not None else load_samples(cfg)
    return run_grid(loss_configs(cfg), samples, progress)
