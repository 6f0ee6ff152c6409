"""Command-line entry point: ``python3 -m src.cli <command> ...``."""
import argparse
import csv
import logging
import sys
from dataclasses import replace
from pathlib import Path

from src.ablation import ablate_edge, ablate_loss, load_samples
from src.checkpoint import load_checkpoint, restore_denoiser, save_checkpoint
from src.constants.constants_cli import CLI_ERRORS, CLI_LOGS
from src.constants.constants_eval import EVAL_ERRORS
from src.core import settings
from src.core.config import config_from_dict, config_to_dict, load_config, write_config
from src.core.errors import DatasetError, EdgeCamoError
from src.core.log import configure_logging
from src.data import list_images, split_holdout
from src.denoiser import Denoiser
from src.diffusion import NoiseSchedule, make_schedule, sample
from src.edge_prior import EdgeOperator, extract_edge_prior
from src.metrics import evaluate, write_metrics_csv
from src.png_io import cached_prior, read_gray, read_image, write_png
from src.trainer import train, write_training_log

logger = logging.getLogger('src.cli')

CHECKPOINT_NAME = 'checkpoint.ecdf'
TRAINING_LOG_NAME = 'training_log.csv'
CONFIG_NAME = 'config.json'


def _progress(args):
    return not args.quiet and sys.stderr.isatty()


def _apply_overrides(cfg, args):
    """Command-line seed and injection flags win over the config file."""
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    changes = {}
    if args.lambda_inj is not None:
        changes['lambda_inj'] = args.lambda_inj
    if args.laplacian_prefilter is not None:
        changes['laplacian_prefilter'] = args.laplacian_prefilter
    if changes:
        cfg = cfg.replace(injection=replace(cfg.injection, **changes))
    return cfg


def _experiment_config(args):
    return _apply_overrides(load_config(args.config), args)


def cmd_edge(args):
    op = EdgeOperator(args.operator, args.sigma, args.low, args.high)
    image = read_image(args.image)
    if args.cache_dir:
        prior = cached_prior(image, op, args.cache_dir, Path(args.image).stem)
    else:
        prior = extract_edge_prior(image, op)
    write_png(args.out, prior.values)
    logger.info(CLI_LOGS.EDGE_DONE.format(operator=op.tag, image=args.image, out=args.out))


def cmd_train(args):
    cfg = _experiment_config(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    samples = load_samples(cfg)
    if 0 < cfg.data.holdout < len(samples):
        samples, _ = split_holdout(samples, cfg.data.holdout)
    schedule = make_schedule(cfg.diffusion.timesteps)
    denoiser = Denoiser(cfg.denoiser, seed=cfg.seed)
    run = train(denoiser, samples, cfg.loss, cfg.trainer, schedule=schedule, injection=cfg.injection_or_none,
                edge_operator=cfg.edge.to_operator(), seed=cfg.seed, progress=_progress(args))
    checkpoint = out_dir / CHECKPOINT_NAME
    log_path = out_dir / TRAINING_LOG_NAME
    save_checkpoint(checkpoint, denoiser, run.optimizer, schedule, {'config': config_to_dict(cfg)})
    write_training_log(log_path, run, cfg.loss)
    write_config(out_dir / CONFIG_NAME, cfg)
    logger.info(CLI_LOGS.TRAIN_DONE.format(checkpoint=checkpoint, log=log_path))


def cmd_sample(args):
    ckpt = load_checkpoint(args.checkpoint)
    cfg = config_from_dict(ckpt.meta['config']) if 'config' in ckpt.meta else load_config(args.config)
    cfg = _apply_overrides(cfg, args)
    steps = args.steps or cfg.diffusion.sampling_steps
    schedule = NoiseSchedule(ckpt.alpha_bar) if ckpt.alpha_bar is not None else make_schedule(cfg.diffusion.timesteps)
    denoiser = restore_denoiser(ckpt)
    op = cfg.edge.to_operator()
    if not Path(args.images).is_dir():
        raise DatasetError(CLI_ERRORS.NOT_A_DIRECTORY.format(path=args.images))
    images = list_images(args.images)
    if not images:
        raise DatasetError(CLI_ERRORS.NO_IMAGES.format(path=args.images))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for index, path in enumerate(images):
        image = read_image(path)
        prior = extract_edge_prior(image, op)
        probabilities = sample(denoiser, image, prior, schedule, steps, seed=[cfg.seed, index],
                               injection=cfg.injection_or_none)
        write_png(out_dir / f'{path.stem}.png', probabilities)
    logger.info(CLI_LOGS.SAMPLE_DONE.format(count=len(images), out=out_dir))


def cmd_eval(args):
    gt_paths = sorted(Path(args.gt).glob('*.png'))
    if not gt_paths:
        raise DatasetError(CLI_ERRORS.NO_IMAGES.format(path=args.gt))
    preds, gts = [], []
    for gt_path in gt_paths:
        pred_path = Path(args.pred) / gt_path.name
        if not pred_path.exists():
            raise DatasetError(EVAL_ERRORS.MISSING_PREDICTION.format(stem=gt_path.stem))
        preds.append(read_gray(pred_path))
        gts.append((read_gray(gt_path) >= settings.GT_THRESHOLD / 255.0).astype(float))
    report = evaluate(preds, gts, workers=args.workers, config=args.name)
    if args.out:
        write_metrics_csv(args.out, [(args.name, report)])
    else:
        writer = csv.writer(sys.stdout, lineterminator='\n')
        writer.writerow(settings.METRICS_HEADER)
        writer.writerow(report.as_row(args.name))
    logger.info(CLI_LOGS.EVAL_DONE.format(count=report.count))


def _ablate(args, grid):
    cfg = _experiment_config(args)
    results = grid(cfg, progress=_progress(args))
    write_metrics_csv(args.out, [(r.tag, r.report) for r in results])
    logger.info(CLI_LOGS.CSV_WRITTEN.format(path=args.out))


def cmd_ablate_edge(args):
    _ablate(args, ablate_edge)


def cmd_ablate_loss(args):
    _ablate(args, ablate_loss)


def _add_injection_flags(parser):
    parser.add_argument('--lambda-inj', type=float, default=None, help='Boundary injection strength (0 disables)')
    parser.add_argument('--laplacian-prefilter', action=argparse.BooleanOptionalAction, default=None,
                        help='Sharpen the prior with |Laplacian| before injection')


def build_parser():
    parser = argparse.ArgumentParser(prog='python3 -m src.cli',
                                     description='Edge-prior diffusion segmentation of camouflaged objects')
    parser.add_argument('--verbose', action='store_true', help='Debug logging')
    parser.add_argument('--quiet', action='store_true', help='Warnings only, no progress bars')
    commands = parser.add_subparsers(dest='command', required=True)

    edge = commands.add_parser('edge', help='Extract an edge prior from one image')
    edge.add_argument('--image', required=True, help='Input PNG or JPEG')
    edge.add_argument('--operator', choices=settings.EDGE_OPERATORS, default=settings.SOBEL)
    edge.add_argument('--sigma', type=float, default=None, help='LoG/Canny smoothing')
    edge.add_argument('--low', type=float, default=settings.CANNY_LOW, help='Canny low threshold')
    edge.add_argument('--high', type=float, default=settings.CANNY_HIGH, help='Canny high threshold')
    edge.add_argument('--out', required=True, help='Output PNG')
    edge.add_argument('--cache-dir', default=None, help='Prior cache directory')
    edge.set_defaults(handler=cmd_edge)

    for name, handler, text in (('train', cmd_train, 'Train a denoiser from a config'),
                                ('ablate-edge', cmd_ablate_edge, 'Edge-operator ablation grid'),
                                ('ablate-loss', cmd_ablate_loss, 'Loss-combination ablation grid')):
        sub = commands.add_parser(name, help=text)
        sub.add_argument('--config', default=None, help='Experiment JSON (defaults when omitted)')
        sub.add_argument('--seed', type=int, default=None, help='Overrides the config seed')
        _add_injection_flags(sub)
        if name == 'train':
            sub.add_argument('--out-dir', required=True, help='Directory for checkpoint, log and config')
        else:
            sub.add_argument('--out', required=True, help='Output CSV')
        sub.set_defaults(handler=handler)

    smp = commands.add_parser('sample', help='Predict masks for a directory of images')
    smp.add_argument('--checkpoint', required=True)
    smp.add_argument('--images', required=True, help='Directory of input images')
    smp.add_argument('--out', required=True, help='Directory for predicted mask PNGs')
    smp.add_argument('--steps', type=int, default=None, help='Sampling steps (config default 30)')
    smp.add_argument('--seed', type=int, default=None)
    smp.add_argument('--config', default=None, help='Used only when the checkpoint carries no config')
    _add_injection_flags(smp)
    smp.set_defaults(handler=cmd_sample)

    ev = commands.add_parser('eval', help='Score prediction PNGs against GT PNGs')
    ev.add_argument('--pred', required=True, help='Prediction directory')
    ev.add_argument('--gt', required=True, help='Ground-truth directory')
    ev.add_argument('--name', default='eval', help='Config tag for the CSV row')
    ev.add_argument('--out', default=None, help='Output CSV (stdout when omitted)')
    ev.add_argument('--workers', type=int, default=1)
    ev.set_defaults(handler=cmd_eval)
    return parser


def cli_run(argv=None):
    """Run one command; returns 0 on success, 1 on a domain error, 2 on a usage error."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    configure_logging(level)
    try:
        args.handler(args)
    except EdgeCamoError as exc:
        logger.error(CLI_ERRORS.FAILED.format(command=args.command, error=exc))
        return 1
    except OSError as exc:
        logger.error(CLI_ERRORS.FAILED.format(command=args.command, error=exc))
        return 1
    return 0


if __name__ == '__main__':
    sys.exit(cli_run())
