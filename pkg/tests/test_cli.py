import csv
import os
import subprocess
import sys

import numpy as np
import pytest

from vstdeconv.harness.cli import main
from vstdeconv.harness.imageio import read_image


def test_simulate_then_deconv(tmp_path, capsys):
    sim = tmp_path / "sim"
    assert main(["simulate", "--phantom", "dendrite", "--size", "32", "--max-intensity", "30",
                 "--psf", "gaussian:1", "--seed", "4", "--out", str(sim)]) == 0
    truth = read_image(sim / "truth.f32")
    counts = read_image(sim / "counts.pgm")
    assert truth.max() == pytest.approx(30.0) and counts.shape == (32, 32)
    assert np.all(counts == np.round(counts))
    for method in ("ours", "rl", "naive-gauss", "ans-gauss"):
        out = tmp_path / method
        assert main(["deconv", "--counts", str(sim / "counts.pgm"), "--psf", "gaussian:1", "--method", method,
                     "--dict", "haar", "--lambda", "0.3", "--iters", "12", "--truth", str(sim / "truth.f32"),
                     "--out", str(out)]) == 0
        restored = read_image(out / "restored.f32")
        assert restored.shape == (32, 32) and restored.min() >= 0
        with open(out / "trace.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0][:4] == ["iter", "f1", "penalty", "objective"]
        assert len(rows) == 14
    assert "mean l1" in capsys.readouterr().out


def test_simulate_is_deterministic(tmp_path):
    for d in ("a", "b"):
        main(["simulate", "--size", "16", "--max-intensity", "100", "--seed", "9", "--out", str(tmp_path / d)])
    assert (tmp_path / "a" / "counts.pgm").read_bytes() == (tmp_path / "b" / "counts.pgm").read_bytes()


def test_bench_subcommand(tmp_path, capsys):
    spec = tmp_path / "tiny.spec"
    spec.write_text("size = 16\nmax_intensity = 30\nmethods = ours rl\nlambda.ours = 0.2\niters = 5\noutput = res\n")
    assert main(["bench", "--spec", str(spec)]) == 0
    out = capsys.readouterr().out
    assert "ours" in out and "rl" in out
    assert (tmp_path / "res" / "metrics.csv").exists()


def test_bad_input_reports_error(tmp_path, capsys):
    spec = tmp_path / "bad.spec"
    spec.write_text("methods = magic\n")
    assert main(["bench", "--spec", str(spec)]) == 2
    assert "error" in capsys.readouterr().err


def test_missing_subcommand():
    with pytest.raises(SystemExit):
        main([])


def _run(args, env_extra=None):
    env = dict(os.environ)
    env.update(env_extra or {})
    return subprocess.run([sys.executable, *args], capture_output=True, text=True, env=env, check=True)


def test_module_entry_point(tmp_path):
    res = _run(["-m", "vstdeconv", "simulate", "--size", "16", "--max-intensity", "5", "--out", str(tmp_path)])
    assert "counts.pgm" in res.stdout


@pytest.mark.parametrize("flag,expected", [("1", "False"), ("0", None)])
def test_backend_selection(flag, expected):
    from vstdeconv import _backend

    res = _run(["-c", "import vstdeconv; print(vstdeconv.COMPILED)"], {"VSTDECONV_PURE_PYTHON": flag})
    want = expected if expected is not None else str(_backend.COMPILED)
    assert res.stdout.strip() == want
