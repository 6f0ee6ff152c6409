"""AdamW training loop with cosine-annealed learning rate."""
import csv
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from tqdm import tqdm

from src.autodiff import backward
from src.constants.constants_train import TRAIN_ERRORS, TRAIN_LOGS
from src.core import settings
from src.core.checks import is_integer, is_real
from src.core.errors import ConfigError, TrainingError
from src.diffusion import forward_corrupt, make_schedule
from src.edge_prior import EdgeOperator
from src.losses import TERMS, LossCoefficients, multiscale_total

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainerConfig:
    learning_rate: float = settings.LEARNING_RATE
    epochs: int = settings.EPOCHS
    batch_size: int = settings.BATCH_SIZE
    betas: tuple = settings.ADAM_BETAS
    eps: float = settings.ADAM_EPS
    weight_decay: float = settings.WEIGHT_DECAY
    lr_floor: float = settings.LR_FLOOR
    max_steps: int = None

    def __post_init__(self):
        object.__setattr__(self, 'betas', tuple(float(b) for b in self.betas))
        checks = (('learning_rate', is_real), ('eps', is_real), ('epochs', is_integer), ('batch_size', is_integer))
        for name, check in checks:
            value = getattr(self, name)
            if not check(value) or value <= 0:
                raise ConfigError(TRAIN_ERRORS.BAD_VALUE.format(name=name, value=value))
        if self.max_steps is not None and (not is_integer(self.max_steps) or self.max_steps <= 0):
            raise ConfigError(TRAIN_ERRORS.BAD_VALUE.format(name='max_steps', value=self.max_steps))
        if not is_real(self.weight_decay) or self.weight_decay < 0:
            raise ConfigError(TRAIN_ERRORS.BAD_VALUE.format(name='weight_decay', value=self.weight_decay))
        if len(self.betas) != 2 or not all(0.0 <= b < 1.0 for b in self.betas):
            raise ConfigError(TRAIN_ERRORS.BAD_BETAS.format(betas=self.betas))
        if not 0.0 <= self.lr_floor <= self.learning_rate:
            raise ConfigError(TRAIN_ERRORS.BAD_FLOOR.format(floor=self.lr_floor, lr=self.learning_rate))


def cosine_lr(step, total_steps, lr0, floor=0.0):
    """lr0 at step 0, floor at the last step."""
    if total_steps <= 1:
        return lr0
    progress = step / (total_steps - 1)
    return floor + (lr0 - floor) * (1.0 + math.cos(math.pi * progress)) / 2.0


class AdamW:
    """Adaptive moments with decoupled weight decay."""

    def __init__(self, named_params, betas=settings.ADAM_BETAS, eps=settings.ADAM_EPS,
                 weight_decay=settings.WEIGHT_DECAY):
        self.params = list(named_params)
        self.betas = betas
        self.eps = eps
        self.weight_decay = weight_decay
        self.step_count = 0
        self.m = {name: np.zeros_like(p.data) for name, p in self.params}
        self.v = {name: np.zeros_like(p.data) for name, p in self.params}

    def step(self, grads, lr):
        b1, b2 = self.betas
        self.step_count += 1
        for name, p in self.params:
            g = grads.get(p)
            if g is None:
                g = np.zeros_like(p.data)
            self.m[name] = b1 * self.m[name] + (1.0 - b1) * g
            self.v[name] = b2 * self.v[name] + (1.0 - b2) * g * g
            m_hat = self.m[name] / (1.0 - b1 ** self.step_count)
            v_hat = self.v[name] / (1.0 - b2 ** self.step_count)
            p.data = p.data - lr * (m_hat / (np.sqrt(v_hat) + self.eps) + self.weight_decay * p.data)

    def state_dict(self):
        return {'step': self.step_count,
                'm': {k: v.copy() for k, v in self.m.items()},
                'v': {k: v.copy() for k, v in self.v.items()}}

    def load_state_dict(self, state):
        for name, p in self.params:
            for key in ('m', 'v'):
                if name not in state[key] or np.shape(state[key][name]) != p.data.shape:
                    raise TrainingError(TRAIN_ERRORS.STATE_MISMATCH.format(name=name))
        self.step_count = int(state['step'])
        self.m = {name: np.array(state['m'][name], dtype=np.float64) for name, _ in self.params}
        self.v = {name: np.array(state['v'][name], dtype=np.float64) for name, _ in self.params}


@dataclass
class StepLog:
    step: int
    epoch: int
    t: float
    lr: float
    terms: dict
    total: float

    def as_row(self):
        row = {'step': self.step, 'epoch': self.epoch, 't': self.t, 'lr': self.lr}
        row.update(self.terms)
        row['total'] = self.total
        return row


@dataclass
class TrainingRun:
    steps: list = field(default_factory=list)
    optimizer: AdamW = None

    @property
    def losses(self):
        return [s.total for s in self.steps]


def plan_steps(samples, tc):
    batches = math.ceil(samples / tc.batch_size)
    total = tc.epochs * batches
    return batches, total if tc.max_steps is None else min(total, tc.max_steps)


def sample_loss(denoiser, sample, t, schedule, coeffs, injection, edge_operator, rng):
    """Corrupt one mask at step t and score the denoiser's logits with the multi-scale loss."""
    prior = sample.ensure_prior(edge_operator)
    state = forward_corrupt(sample.mask, t, schedule, rng)
    z = denoiser.forward(state.x_t, sample.image, prior, t, injection)
    return multiscale_total(z, sample.mask, prior, coeffs)


def train(denoiser, dataset, coeffs=None, tc=None, *, schedule=None, injection=None,
          edge_operator=None, seed=0, optimizer=None, progress=False):
    """Optimise ``denoiser`` in place; returns the per-step log and the optimizer."""
    dataset = list(dataset)
    if not dataset:
        raise TrainingError(TRAIN_ERRORS.EMPTY_DATASET)
    coeffs = coeffs or LossCoefficients()
    tc = tc or TrainerConfig()
    schedule = schedule or make_schedule()
    edge_operator = edge_operator or EdgeOperator()
    optimizer = optimizer or AdamW(denoiser.named_parameters(), tc.betas, tc.eps, tc.weight_decay)
    rng = np.random.default_rng(seed)
    batches, total_steps = plan_steps(len(dataset), tc)
    logger.info(TRAIN_LOGS.START.format(samples=len(dataset), epochs=tc.epochs, batches=batches,
                                        steps=total_steps, seed=seed))
    run = TrainingRun(optimizer=optimizer)
    bar = tqdm(total=total_steps, desc='train', disable=not progress)
    step = 0
    for epoch in range(tc.epochs):
        if step >= total_steps:
            break
        order = rng.permutation(len(dataset))
        epoch_losses = []
        for start in range(0, len(dataset), tc.batch_size):
            if step >= total_steps:
                break
            batch = [dataset[i] for i in order[start:start + tc.batch_size]]
            timesteps = rng.integers(1, schedule.T + 1, size=len(batch))
            breakdowns = [sample_loss(denoiser, s, int(t), schedule, coeffs, injection, edge_operator, rng)
                          for s, t in zip(batch, timesteps)]
            loss = breakdowns[0].value
            for breakdown in breakdowns[1:]:
                loss = loss + breakdown.value
            loss = loss * (1.0 / len(breakdowns))
            terms = {key: float(np.mean([b.as_row()[key] for b in breakdowns]))
                     for key in breakdowns[0].as_row() if key != 'total'}
            if not np.isfinite(loss.item()):
                raise TrainingError(TRAIN_ERRORS.NON_FINITE.format(step=step, epoch=epoch, t=timesteps.tolist(), terms=terms))
            lr = cosine_lr(step, total_steps, tc.learning_rate, tc.lr_floor)
            optimizer.step(backward(loss), lr)
            entry = StepLog(step, epoch, float(np.mean(timesteps)), lr, terms, loss.item())
            run.steps.append(entry)
            epoch_losses.append(entry.total)
            logger.debug(TRAIN_LOGS.STEP.format(step=step, epoch=epoch, t=entry.t, lr=lr, loss=entry.total))
            bar.update(1)
            step += 1
        logger.info(TRAIN_LOGS.EPOCH.format(epoch=epoch, loss=float(np.mean(epoch_losses))))
    bar.close()
    logger.info(TRAIN_LOGS.DONE.format(steps=len(run.steps), loss=run.steps[-1].total))
    return run


def log_columns(coeffs):
    columns = ['step', 'epoch', 't', 'lr']
    columns += [f'{term}@{scale:g}' for scale in coeffs.scales for term in TERMS]
    return columns + ['total']


def write_training_log(path, run, coeffs):
    columns = log_columns(coeffs)
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(columns)
        for entry in run.steps:
            row = entry.as_row()
            writer.writerow([row[c] if c in ('step', 'epoch') else settings.CSV_FLOAT_FORMAT.format(row[c])
                             for c in columns])
    logger.info(TRAIN_LOGS.LOG_WRITTEN.format(path=path))
