import numpy as np
import pytest

from src.core.errors import ConfigError, GridError
from src.denoiser import Denoiser
from src.diffusion import DiffusionConfig, forward_corrupt, make_schedule, sample, sampling_timesteps
from src.edge_prior import ImageRGB
from src.injection import InjectionConfig


class OracleDenoiser:
    """Always predicts confident logits of a known mask."""

    def __init__(self, mask):
        self.mask = mask
        self.calls = []

    def forward(self, x_t, image, prior, t, injection=None):
        self.calls.append(t)
        return np.where(self.mask == 1.0, 50.0, -50.0)


@pytest.fixture
def schedule():
    return make_schedule(1000)


@pytest.fixture
def disc_mask():
    ys, xs = np.mgrid[:12, :12]
    return ((ys - 6) ** 2 + (xs - 5) ** 2 <= 12).astype(float)


class TestSchedule:
    def test_strictly_decreasing(self, schedule):
        assert np.all(np.diff(schedule.alpha_bar) < 0)

    def test_endpoints(self, schedule):
        assert schedule.at(1) > 0.99
        assert schedule.at(1000) < 0.01
        assert 0.0 < schedule.alpha_bar.min() and schedule.alpha_bar.max() < 1.0

    def test_read_only(self, schedule):
        with pytest.raises(ValueError):
            schedule.alpha_bar[0] = 0.5

    def test_single_step(self):
        assert make_schedule(1).T == 1

    def test_rejects_empty(self):
        with pytest.raises(ConfigError):
            make_schedule(0)

    @pytest.mark.parametrize('t', [0, 1001])
    def test_timestep_range(self, schedule, t):
        with pytest.raises(GridError):
            schedule.at(t)


class TestForwardCorrupt:
    @pytest.mark.parametrize('t', [250, 500, 1000])
    def test_noise_variance(self, schedule, t):
        y = np.zeros((100, 100))
        a = schedule.at(t)
        state = forward_corrupt(y, t, schedule, 7)
        residual = state.x_t - np.sqrt(a) * (2.0 * y - 1.0)
        assert residual.var() == pytest.approx(1.0 - a, rel=0.05)

    def test_mean_within_three_sigma(self, schedule):
        t = 500
        a = schedule.at(t)
        x_t = forward_corrupt(np.ones((100, 100)), t, schedule, 11).x_t
        assert abs(x_t.mean() - np.sqrt(a)) < 3 * np.sqrt((1.0 - a) / x_t.size)

    def test_first_step_is_close_to_signal(self, schedule, disc_mask):
        state = forward_corrupt(disc_mask, 1, schedule, 0)
        assert np.all(np.sign(state.x_t) == 2.0 * disc_mask - 1.0)
        assert state.t == 1

    def test_seeded(self, schedule, disc_mask):
        a = forward_corrupt(disc_mask, 300, schedule, 5).x_t
        b = forward_corrupt(disc_mask, 300, schedule, 5).x_t
        assert np.array_equal(a, b)

    def test_rejects_non_binary(self, schedule):
        with pytest.raises(GridError):
            forward_corrupt(np.full((4, 4), 0.5), 10, schedule, 0)

    def test_rejects_bad_timestep(self, schedule, disc_mask):
        with pytest.raises(GridError):
            forward_corrupt(disc_mask, 0, schedule, 0)


class TestSamplingTimesteps:
    def test_default_grid(self):
        ts = sampling_timesteps(1000, 30)
        assert ts[0] == 1000 and ts[-1] == 1
        assert len(ts) == 30
        assert all(a > b for a, b in zip(ts, ts[1:]))

    def test_deduplicates(self):
        assert sampling_timesteps(3, 3) == [3, 2, 1]
        assert sampling_timesteps(1, 1) == [1]

    def test_rejects_too_many_steps(self):
        with pytest.raises(GridError):
            sampling_timesteps(10, 11)

    def test_config_rejects_too_many_steps(self):
        with pytest.raises(ConfigError):
            DiffusionConfig(timesteps=10, sampling_steps=20)


class TestSample:
    def test_oracle_one_step(self, schedule, disc_mask):
        oracle = OracleDenoiser(disc_mask)
        out = sample(oracle, ImageRGB.from_gray(np.full((12, 12), 0.5)), None, schedule, steps=1, seed=0)
        assert np.allclose(out, disc_mask, atol=1e-12)
        assert oracle.calls == [1000]

    def test_oracle_many_steps(self, schedule, disc_mask):
        oracle = OracleDenoiser(disc_mask)
        out = sample(oracle, ImageRGB.from_gray(np.full((12, 12), 0.5)), None, schedule, steps=30, seed=0)
        assert np.allclose(out, disc_mask, atol=1e-12)
        assert len(oracle.calls) == 30

    def test_deterministic_and_bounded(self, rng, tiny_denoiser_config):
        denoiser = Denoiser(tiny_denoiser_config, seed=4)
        image = ImageRGB.from_array(rng.random((3, 10, 10)))
        prior = rng.random((10, 10))
        schedule = make_schedule(50)
        first = sample(denoiser, image, prior, schedule, steps=5, seed=9, injection=InjectionConfig())
        second = sample(denoiser, image, prior, schedule, steps=5, seed=9, injection=InjectionConfig())
        assert np.array_equal(first, second)
        assert first.shape == (10, 10)
        assert first.min() >= 0.0 and first.max() <= 1.0
