import json

import numpy as np

from playcast.cli import main
from playcast.data import load_tracking, read_manifest


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_synth_is_deterministic_and_splits(tmp_path, capsys):
    for sub in ("a", "b"):
        code, out, _ = run_cli(capsys, "synth", "--seed", "7", "--count", "10",
                               "--out-dir", str(tmp_path / sub), "--frames", "60")
        assert code == 0
        assert json.loads(out)["plays"] == 10
    a = sorted((tmp_path / "a").glob("*.csv"))
    b = sorted((tmp_path / "b").glob("*.csv"))
    for fa, fb in zip(a, b):
        assert fa.read_bytes() == fb.read_bytes()
    entries = read_manifest(tmp_path / "a" / "manifest.txt")
    assert {s for _, s in entries} == {"train", "val", "test"}
    assert load_tracking(a[0]).n_frames == 60


def test_train_then_eval_round_trip(tmp_path, capsys):
    code, _, _ = run_cli(capsys, "synth", "--seed", "3", "--count", "10",
                         "--out-dir", str(tmp_path / "ds"))
    assert code == 0
    code, out, _ = run_cli(
        capsys, "train", "--manifest", str(tmp_path / "ds" / "manifest.txt"),
        "--out-dir", str(tmp_path / "run"), "--kind", "granma", "--sparsity-s", "2.0",
        "--embedding", "8", "--heads", "2", "--epochs", "1", "--batch-size", "8",
        "--seeds", "0", "--quiet")
    assert code == 0
    ckpt = json.loads(out)["seeds"]["0"]["checkpoint"]
    code, out, _ = run_cli(
        capsys, "eval", "--manifest", str(tmp_path / "ds" / "manifest.txt"),
        "--checkpoint", ckpt, "--eval-sparsity-s", "4.0",
        "--curves", str(tmp_path / "curve.csv"))
    assert code == 0
    report = json.loads(out)
    assert report["eval_stride_steps"] == 40
    assert report["overall_l2_cm"] > 0
    header = (tmp_path / "curve.csv").read_text().splitlines()[0]
    assert header == "t_s,cumulative_l2_cm"


def test_sparsify_reports_l2_delta(tmp_path, capsys):
    rng = np.random.default_rng(0)
    agents = []
    for _ in range(3):
        start = rng.uniform(-20, 20, size=2)
        v = rng.uniform(-0.3, 0.3, size=2)
        t = np.arange(50.0)[:, None]
        track = start + v * t
        # front-loaded error profile, like a dense model that is weakest on
        # the early steps: interpolating through sparse controls anchored at
        # the true past must then reduce the overall error
        fade = (1.0 - np.arange(40.0) / 40.0)[:, None]
        bias = rng.normal(scale=1.0, size=(1, 2))
        agents.append({
            "past": track[:10].tolist(),
            "dense": (track[10:] + fade * bias).tolist(),
            "future": track[10:].tolist(),
        })
    src = tmp_path / "preds.json"
    src.write_text(json.dumps({"units": "m", "frame_rate_hz": 10.0, "agents": agents}))
    code, out, _ = run_cli(capsys, "sparsify", "--input", str(src),
                           "--out", str(tmp_path / "sparse.json"), "--stride", "10")
    assert code == 0
    report = json.loads(out)
    # noisy dense outputs on a linear truth: interpolation must help
    assert report["l2_after_cm"] < report["l2_before_cm"]
    blob = json.loads((tmp_path / "sparse.json").read_text())
    assert [c["offset"] for c in blob["agents"][0]["controls"]] == [10, 20, 30, 40]


def test_unknown_input_fails_with_machine_readable_error(tmp_path, capsys):
    code, out, err = run_cli(capsys, "eval", "--manifest", str(tmp_path / "nope.txt"),
                             "--checkpoint", str(tmp_path / "nope.ckpt"))
    assert code == 1
    assert json.loads(err)["error"]["type"]


def test_sweep_cli_smoke(tmp_path, capsys):
    code, _, _ = run_cli(capsys, "synth", "--seed", "9", "--count", "10",
                         "--out-dir", str(tmp_path / "ds"))
    assert code == 0
    code, out, _ = run_cli(
        capsys, "sweep", "--manifest", str(tmp_path / "ds" / "manifest.txt"),
        "--out-dir", str(tmp_path / "sweep"), "--experiment", "eval_sparsity",
        "--kinds", "lin_ext", "--epochs", "1", "--batch-size", "8", "--seeds", "0")
    assert code == 0
    assert (tmp_path / "sweep" / "results.csv").exists()
    assert json.loads(out)["failures"] == []
