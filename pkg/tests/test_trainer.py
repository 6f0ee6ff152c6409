import csv
from collections import OrderedDict

import numpy as np
import pytest

from src.autodiff import backward, parameter
from src.core import settings
from src.core.errors import ConfigError, TrainingError
from src.data import SyntheticConfig, generate_synthetic
from src.denoiser import Denoiser, DenoiserConfig
from src.diffusion import make_schedule
from src.edge_prior import to_grayscale
from src.injection import InjectionConfig
from src.losses import LossCoefficients
from src.trainer import (AdamW, TrainerConfig, cosine_lr, log_columns, plan_steps, sample_loss, train,
                         write_training_log)


class MicroDenoiser:
    """Two learnable scalars: logits = a * x_t + b * (gray - 0.5)."""

    def __init__(self, a=0.7, b=-1.3):
        self.params = OrderedDict(a=parameter(np.array(a)), b=parameter(np.array(b)))

    def forward(self, x_t, image, prior, t, injection=None):
        return self.params['a'] * x_t + self.params['b'] * (to_grayscale(image) - 0.5)

    def named_parameters(self):
        return list(self.params.items())


class NaNDenoiser(MicroDenoiser):
    def forward(self, x_t, image, prior, t, injection=None):
        return self.params['a'] * np.full(x_t.shape, np.nan)


@pytest.fixture
def samples():
    return generate_synthetic(SyntheticConfig(count=3, height=12, width=12, seed=1))


@pytest.fixture
def coeffs():
    return LossCoefficients(pool_k=5)


class TestLearningRate:
    def test_endpoints(self):
        assert cosine_lr(0, 100, settings.LEARNING_RATE) == 5e-5
        assert cosine_lr(99, 100, 5e-5) == pytest.approx(0.0, abs=1e-20)
        assert cosine_lr(99, 100, 5e-5, floor=1e-6) == pytest.approx(1e-6, rel=1e-12)

    def test_midpoint_and_single_step(self):
        assert cosine_lr(50, 101, 2.0) == pytest.approx(1.0)
        assert cosine_lr(0, 1, 3e-4) == 3e-4

    def test_monotone(self):
        rates = [cosine_lr(s, 20, 1e-3) for s in range(20)]
        assert all(a >= b for a, b in zip(rates, rates[1:]))


class TestTrainerConfig:
    @pytest.mark.parametrize('changes', [
        {'learning_rate': 0.0}, {'epochs': 0}, {'batch_size': -1}, {'betas': (0.9, 1.0)},
        {'lr_floor': 1.0}, {'weight_decay': -0.1}, {'max_steps': 0}, {'epochs': 1.5}, {'batch_size': 2.0},
    ])
    def test_rejects(self, changes):
        with pytest.raises(ConfigError):
            TrainerConfig(**changes)

    def test_plan_steps(self):
        assert plan_steps(5, TrainerConfig(epochs=3, batch_size=2)) == (3, 9)
        assert plan_steps(5, TrainerConfig(epochs=3, batch_size=2, max_steps=4)) == (3, 4)


class TestAdamW:
    def test_first_step_moves_by_learning_rate(self):
        p = parameter(np.array([1.0, -2.0]))
        optimizer = AdamW([('p', p)], weight_decay=0.0)
        optimizer.step({p: np.array([3.0, -0.5])}, lr=0.1)
        assert np.allclose(p.data, [0.9, -1.9], atol=1e-8)

    def test_decoupled_weight_decay(self):
        p = parameter(np.array([2.0]))
        optimizer = AdamW([('p', p)], weight_decay=0.5)
        optimizer.step({}, lr=0.1)
        assert np.allclose(p.data, [2.0 - 0.1 * 0.5 * 2.0])

    def test_state_round_trip(self):
        p = parameter(np.ones(3))
        optimizer = AdamW([('p', p)])
        optimizer.step({p: np.arange(3.0)}, lr=0.01)
        other = AdamW([('p', parameter(np.ones(3)))])
        other.load_state_dict(optimizer.state_dict())
        assert other.step_count == 1
        assert np.array_equal(other.m['p'], optimizer.m['p'])

    def test_state_mismatch(self):
        optimizer = AdamW([('p', parameter(np.ones(3)))])
        with pytest.raises(TrainingError):
            optimizer.load_state_dict({'step': 1, 'm': {'p': np.ones(2)}, 'v': {'p': np.ones(2)}})


class TestTrainingStepGradient:
    def test_matches_finite_differences(self, samples, coeffs, relative_error):
        micro = MicroDenoiser()
        schedule = make_schedule(100)
        sample = samples[0]

        def loss_at(values):
            for (_, p), v in zip(micro.named_parameters(), values):
                p.data = np.array(v)
            return sample_loss(micro, sample, 40, schedule, coeffs, None, None, 17)

        start = np.array([0.7, -1.3])
        grads = backward(loss_at(start).value)
        analytic = np.array([grads[p] for _, p in micro.named_parameters()])
        h = 1e-5
        numeric = np.zeros(2)
        for i in range(2):
            plus, minus = start.copy(), start.copy()
            plus[i] += h
            minus[i] -= h
            numeric[i] = (loss_at(plus).total - loss_at(minus).total) / (2 * h)
        assert relative_error(analytic, numeric) < 1e-3


class TestTrain:
    def run(self, samples, coeffs, seed=0, **kwargs):
        denoiser = Denoiser(DenoiserConfig(widths=(2, 3), time_dim=4), seed=seed)
        tc = TrainerConfig(learning_rate=1e-3, epochs=2, batch_size=2)
        run = train(denoiser, samples, coeffs, tc, schedule=make_schedule(50), seed=seed,
                    injection=InjectionConfig(), **kwargs)
        return denoiser, run

    def test_log_shape(self, samples, coeffs):
        _, run = self.run(samples, coeffs)
        assert len(run.steps) == 4
        assert [s.step for s in run.steps] == [0, 1, 2, 3]
        assert [s.epoch for s in run.steps] == [0, 0, 1, 1]
        assert run.steps[0].lr == 1e-3
        assert run.steps[-1].lr == pytest.approx(0.0, abs=1e-18)
        assert all(1 <= s.t <= 50 for s in run.steps)
        assert all(np.isfinite(run.losses))

    def test_same_seed_is_bit_identical(self, samples, coeffs):
        first_model, first = self.run(samples, coeffs, seed=3)
        second_model, second = self.run(samples, coeffs, seed=3)
        assert [s.as_row() for s in first.steps] == [s.as_row() for s in second.steps]
        for key, value in first_model.state_dict().items():
            assert np.array_equal(value, second_model.state_dict()[key])

    def test_parameters_change(self, samples, coeffs):
        before = Denoiser(DenoiserConfig(widths=(2, 3), time_dim=4), seed=0).state_dict()
        after, _ = self.run(samples, coeffs)
        assert not np.array_equal(before['head.weight'], after.state_dict()['head.weight'])

    def test_empty_dataset(self, coeffs):
        with pytest.raises(TrainingError):
            train(Denoiser(DenoiserConfig(widths=(2, 3), time_dim=4)), [], coeffs)

    def test_non_finite_loss_aborts(self, samples, coeffs):
        with pytest.raises(TrainingError, match='Non-finite'):
            train(NaNDenoiser(), samples, coeffs, TrainerConfig(epochs=1, batch_size=1), schedule=make_schedule(20))

    def test_max_steps(self, samples, coeffs):
        denoiser = Denoiser(DenoiserConfig(widths=(2, 3), time_dim=4))
        run = train(denoiser, samples, coeffs, TrainerConfig(epochs=5, batch_size=1, max_steps=2),
                    schedule=make_schedule(20))
        assert len(run.steps) == 2

    def test_write_log(self, samples, coeffs, tmp_path):
        _, run = self.run(samples, coeffs)
        path = tmp_path / 'training_log.csv'
        write_training_log(path, run, coeffs)
        with open(path, newline='') as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == log_columns(coeffs)
        assert len(rows) == 1 + len(run.steps)
        assert rows[1][0] == '0'
        assert float(rows[-1][-1]) == pytest.approx(run.steps[-1].total, abs=1e-6)


@pytest.mark.slow
def test_single_batch_overfit_halves_loss():
    ratios = []
    for seed in range(3):
        samples = generate_synthetic(SyntheticConfig(count=1, height=32, width=32, seed=seed))
        denoiser = Denoiser(DenoiserConfig(widths=(8, 16), time_dim=8), seed=seed)
        tc = TrainerConfig(learning_rate=1e-2, epochs=300, batch_size=1)
        run = train(denoiser, samples, LossCoefficients(), tc, schedule=make_schedule(100), seed=seed,
                    injection=InjectionConfig())
        losses = run.losses
        ratios.append(np.mean(losses[-10:]) / np.mean(losses[:10]))
    assert np.median(ratios) < 0.5
