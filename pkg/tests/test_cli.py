import csv
import json

import numpy as np
import pytest

from src.cli import cli_run
from src.core.config import config_to_dict
from src.edge_prior import ImageRGB
from src.png_io import read_png, write_png


@pytest.fixture
def tiny_config(tmp_path, tiny_experiment):
    path = tmp_path / 'tiny.json'
    path.write_text(json.dumps(config_to_dict(tiny_experiment)))
    return path


@pytest.fixture
def mask_dirs(tmp_path):
    pred, gt = tmp_path / 'pred', tmp_path / 'gt'
    pred.mkdir()
    gt.mkdir()
    for index in range(2):
        mask = np.zeros((16, 16))
        mask[4 + index:11, 5:12 - index] = 1.0
        write_png(pred / f'img{index}.png', mask)
        write_png(gt / f'img{index}.png', mask)
    return pred, gt


def read_rows(path):
    with open(path, newline='') as handle:
        return list(csv.reader(handle))


class TestUsage:
    def test_unknown_command(self):
        assert cli_run(['bogus']) == 2

    def test_missing_command(self):
        assert cli_run([]) == 2

    def test_unknown_flag(self, tmp_path):
        assert cli_run(['eval', '--pred', str(tmp_path), '--gt', str(tmp_path), '--frobnicate']) == 2


class TestEval:
    def test_perfect_predictions(self, mask_dirs, tmp_path):
        pred, gt = mask_dirs
        out = tmp_path / 'metrics.csv'
        assert cli_run(['--quiet', 'eval', '--pred', str(pred), '--gt', str(gt), '--name', 'perfect',
                        '--out', str(out)]) == 0
        assert read_rows(out) == [['config', 'S_m', 'E_m', 'F_w', 'MAE'],
                                  ['perfect', '1.000000', '1.000000', '1.000000', '0.000000']]

    def test_stdout(self, mask_dirs, capsys):
        pred, gt = mask_dirs
        assert cli_run(['--quiet', 'eval', '--pred', str(pred), '--gt', str(gt)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == 'config,S_m,E_m,F_w,MAE'
        assert lines[1].startswith('eval,1.000000')

    def test_missing_prediction(self, mask_dirs):
        pred, gt = mask_dirs
        (pred / 'img1.png').unlink()
        assert cli_run(['--quiet', 'eval', '--pred', str(pred), '--gt', str(gt)]) == 1

    def test_empty_gt_directory(self, tmp_path):
        assert cli_run(['--quiet', 'eval', '--pred', str(tmp_path), '--gt', str(tmp_path)]) == 1


class TestEdge:
    def test_writes_prior(self, tmp_path, rng):
        image = tmp_path / 'in.png'
        write_png(image, ImageRGB.from_array(rng.random((3, 9, 9))))
        out = tmp_path / 'prior.png'
        assert cli_run(['--quiet', 'edge', '--image', str(image), '--operator', 'canny', '--out', str(out),
                        '--cache-dir', str(tmp_path / 'cache')]) == 0
        prior = read_png(out)
        assert prior.shape == (9, 9)
        assert set(np.unique(prior)) <= {0.0, 1.0}
        assert (tmp_path / 'cache' / 'in__canny_s1_l0.1_h0.2.png').exists()

    def test_missing_image(self, tmp_path):
        assert cli_run(['--quiet', 'edge', '--image', str(tmp_path / 'none.png'), '--out', str(tmp_path / 'o.png')]) == 1


class TestTrainSampleEval:
    def test_pipeline(self, tmp_path, tiny_config, rng):
        out_dir = tmp_path / 'run'
        assert cli_run(['--quiet', 'train', '--config', str(tiny_config), '--out-dir', str(out_dir)]) == 0
        for name in ('checkpoint.ecdf', 'training_log.csv', 'config.json'):
            assert (out_dir / name).exists()
        assert len(read_rows(out_dir / 'training_log.csv')) == 3

        images = tmp_path / 'images'
        images.mkdir()
        for stem in ('b', 'a'):
            write_png(images / f'{stem}.png', ImageRGB.from_array(rng.random((3, 12, 12))))
        preds = tmp_path / 'preds'
        assert cli_run(['--quiet', 'sample', '--checkpoint', str(out_dir / 'checkpoint.ecdf'),
                        '--images', str(images), '--out', str(preds), '--steps', '2']) == 0
        assert sorted(p.name for p in preds.iterdir()) == ['a.png', 'b.png']
        assert read_png(preds / 'a.png').shape == (12, 12)

    def test_injection_flags(self, tmp_path, tiny_config):
        out_dir = tmp_path / 'run'
        assert cli_run(['--quiet', 'train', '--config', str(tiny_config), '--out-dir', str(out_dir),
                        '--lambda-inj', '0.2', '--no-laplacian-prefilter']) == 0
        saved = json.loads((out_dir / 'config.json').read_text())
        assert saved['injection'] == {'enabled': True, 'lambda_inj': 0.2, 'laplacian_prefilter': False}

    def test_negative_injection_rejected(self, tmp_path, tiny_config):
        assert cli_run(['--quiet', 'train', '--config', str(tiny_config), '--out-dir', str(tmp_path / 'r'),
                        '--lambda-inj', '-1']) == 1

    def test_malformed_config(self, tmp_path):
        bad = tmp_path / 'bad.json'
        bad.write_text('{"seed": }')
        assert cli_run(['--quiet', 'train', '--config', str(bad), '--out-dir', str(tmp_path / 'r')]) == 1

    @pytest.mark.parametrize('raw', [
        {'trainer': {'epochs': 1.5}},
        {'denoiser': {'widths': ['a', 'b']}},
        {'loss': {'scales': [1.0, 'x'], 'weights': [1.0, 0.5]}},
        {'data': {'height': 12.5}},
    ])
    def test_mistyped_config_exits_one(self, tmp_path, raw):
        path = tmp_path / 'typed.json'
        path.write_text(json.dumps(raw))
        assert cli_run(['--quiet', 'train', '--config', str(path), '--out-dir', str(tmp_path / 'r')]) == 1

    def test_corrupt_checkpoint(self, tmp_path):
        ckpt = tmp_path / 'x.ecdf'
        ckpt.write_bytes(b'garbage' * 10)
        assert cli_run(['--quiet', 'sample', '--checkpoint', str(ckpt), '--images', str(tmp_path),
                        '--out', str(tmp_path / 'o')]) == 1


class TestAblation:
    def test_edge_grid_is_reproducible(self, tmp_path, tiny_config):
        first, second = tmp_path / 'a.csv', tmp_path / 'b.csv'
        for out in (first, second):
            assert cli_run(['--quiet', 'ablate-edge', '--config', str(tiny_config), '--out', str(out)]) == 0
        rows = read_rows(first)
        assert rows[0] == ['config', 'S_m', 'E_m', 'F_w', 'MAE']
        assert [r[0] for r in rows[1:]] == ['prewitt', 'laplacian', 'canny', 'log', 'sobel']
        assert all(len(r) == 5 for r in rows)
        assert first.read_bytes() == second.read_bytes()

    def test_loss_grid_is_reproducible(self, tmp_path, tiny_config):
        first, second = tmp_path / 'a.csv', tmp_path / 'b.csv'
        for out in (first, second):
            assert cli_run(['--quiet', 'ablate-loss', '--config', str(tiny_config), '--out', str(out)]) == 0
        rows = read_rows(first)
        assert len(rows) == 7
        assert [r[0] for r in rows[1:]] == ['fs-single', 'fs-multi', 'fs-multi+gt_edge', 'fs-multi+ual',
                                            'fs-multi+gt_edge+ual', 'full']
        assert first.read_bytes() == second.read_bytes()
