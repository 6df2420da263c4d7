import numpy as np
import pytest

from playcast.data import (
    N_AGENTS,
    SynthParams,
    TrackedExample,
    TrackingFormatError,
    assign_splits,
    augment_flip,
    canonical_agents,
    load_tracking,
    make_windows,
    read_manifest,
    synth_plays,
    windows_to_arrays,
    write_manifest,
    write_tracking,
)


def _example(n_frames, in_play=None, seed=0):
    rng = np.random.default_rng(seed)
    agents = canonical_agents()
    return TrackedExample(
        match_id="m0",
        frame_rate_hz=10.0,
        positions=rng.uniform(-30, 30, size=(n_frames, N_AGENTS, 2)),
        in_play=np.ones(n_frames, dtype=bool) if in_play is None else np.asarray(in_play),
        teams=tuple(t for t, _ in agents),
        roles=tuple(r for _, r in agents),
    )


def test_round_trip_preserves_values(tmp_path):
    ex = _example(4)
    path = tmp_path / "m0.csv"
    write_tracking(path, ex)
    loaded = load_tracking(path)
    np.testing.assert_array_equal(loaded.positions, ex.positions)
    np.testing.assert_array_equal(loaded.in_play, ex.in_play)
    assert loaded.teams == ex.teams and loaded.roles == ex.roles


def test_minimal_two_frame_file(tmp_path):
    ex = _example(2)
    path = tmp_path / "tiny.csv"
    write_tracking(path, ex)
    assert load_tracking(path).n_frames == 2


def test_missing_defender_reports_frame(tmp_path):
    ex = _example(3)
    path = tmp_path / "broken.csv"
    write_tracking(path, ex)
    lines = path.read_text().splitlines()
    # drop away role 5 from frame 1
    kept = [l for l in lines if not l.startswith("1,away5,")]
    assert len(kept) == len(lines) - 1
    path.write_text("\n".join(kept) + "\n")
    with pytest.raises(TrackingFormatError, match="frame 1"):
        load_tracking(path)


def test_nan_coordinates_rejected(tmp_path):
    ex = _example(2)
    path = tmp_path / "nan.csv"
    write_tracking(path, ex)
    text = path.read_text().replace(repr(float(ex.positions[0, 0, 0])), "nan", 1)
    path.write_text(text)
    with pytest.raises(TrackingFormatError, match="non-finite"):
        load_tracking(path)


def test_non_contiguous_frames_rejected(tmp_path):
    ex = _example(3)
    path = tmp_path / "gap.csv"
    write_tracking(path, ex)
    kept = [l for l in path.read_text().splitlines() if not l.startswith("1,")]
    path.write_text("\n".join(kept) + "\n")
    with pytest.raises(TrackingFormatError, match="contiguous"):
        load_tracking(path)


# -- windows ------------------------------------------------------------------


def test_window_starts_match_brute_force_enumeration():
    ex = _example(120)
    windows = make_windows(ex, window_len=50, n_past=10)
    starts = [w.start_frame for w in windows]
    # oracle: every start on the stride-25 grid whose window fits in the span
    brute = [s for s in range(0, 120, 25) if s + 50 <= 120]
    assert starts == brute == [0, 25, 50]


def test_span_shorter_than_window_yields_nothing():
    assert make_windows(_example(49), 50, 10) == []


def test_exact_length_span_yields_one_window():
    windows = make_windows(_example(50), 50, 10)
    assert len(windows) == 1
    w = windows[0]
    assert w.past.shape == (N_AGENTS, 10, 2)
    assert w.future.shape == (N_AGENTS, 40, 2)


def test_windows_never_cross_out_of_play():
    in_play = np.ones(145, dtype=bool)
    in_play[60:65] = False  # spans [0,60) and [65,145)
    windows = make_windows(_example(145, in_play=in_play), 50, 10)
    for w in windows:
        assert np.all(in_play[w.start_frame:w.start_frame + 50])
    assert [w.start_frame for w in windows] == [0, 65, 90]


def test_double_flip_is_identity():
    w = make_windows(_example(50), 50, 10)[0]
    twice = augment_flip(augment_flip(w, True, True), True, True)
    np.testing.assert_array_equal(twice.positions, w.positions)


def test_flip_x_negates_mean_velocity():
    w = make_windows(_example(50), 50, 10)[0]
    flipped = augment_flip(w, flip_x=True, flip_y=False)
    v = np.diff(w.past, axis=1).mean(axis=(0, 1))
    fv = np.diff(flipped.past, axis=1).mean(axis=(0, 1))
    assert fv[0] == pytest.approx(-v[0]) and fv[1] == pytest.approx(v[1])


def test_l2_error_invariant_under_consistent_flip():
    w = make_windows(_example(50), 50, 10)[0]
    rng = np.random.default_rng(1)
    pred = w.future + rng.normal(size=w.future.shape)
    flipped = augment_flip(w, True, True)
    flipped_pred = -pred
    err = np.linalg.norm(w.future - pred, axis=-1)
    err_f = np.linalg.norm(flipped.future - flipped_pred, axis=-1)
    np.testing.assert_allclose(err, err_f)


def test_flip_preserves_metadata():
    w = make_windows(_example(50), 50, 10)[0]
    f = augment_flip(w, True, False)
    assert (f.match_id, f.start_frame, f.n_past) == (w.match_id, w.start_frame, w.n_past)


# -- synthetic generator --------------------------------------------------------


@pytest.fixture(scope="module")
def plays():
    return synth_plays(seed=7, count=8)


def test_synth_respects_speed_cap(plays):
    p = SynthParams()
    for play in plays:
        v = np.diff(play.positions, axis=0) * play.frame_rate_hz
        assert np.linalg.norm(v, axis=-1).max() <= p.speed_cap + 1e-9


def test_synth_respects_acceleration_cap(plays):
    p = SynthParams()
    for play in plays:
        v = np.diff(play.positions, axis=0) * play.frame_rate_hz
        a = np.diff(v, axis=0) * play.frame_rate_hz
        assert np.linalg.norm(a, axis=-1).max() <= p.accel_cap + 1e-6


def test_synth_deterministic_per_seed(plays):
    again = synth_plays(seed=7, count=8)
    for a, b in zip(plays, again):
        np.testing.assert_array_equal(a.positions, b.positions)
    other = synth_plays(seed=8, count=1)
    assert not np.array_equal(other[0].positions, plays[0].positions)


def test_synth_mean_speed_in_sanity_band(plays):
    speeds = []
    for play in plays:
        v = np.diff(play.positions[:, 1:], axis=0) * play.frame_rate_hz  # players only
        speeds.append(np.linalg.norm(v, axis=-1).mean())
    assert 1.0 <= np.mean(speeds) <= 6.0


def test_windows_deterministic_and_stackable(plays):
    w1 = make_windows(plays[0], 50, 10)
    w2 = make_windows(plays[0], 50, 10)
    assert [w.start_frame for w in w1] == [w.start_frame for w in w2]
    past, future = windows_to_arrays(w1)
    assert past.shape[1:] == (N_AGENTS, 10, 2)
    assert future.shape[1:] == (N_AGENTS, 40, 2)


# -- manifest -----------------------------------------------------------------------


def test_split_ratios_and_determinism():
    ids = [f"match_{i:03d}" for i in range(50)]
    splits = assign_splits(ids)
    counts = {s: sum(1 for v in splits.values() if v == s) for s in ("train", "val", "test")}
    assert counts == {"train": 40, "val": 5, "test": 5}
    assert splits == assign_splits(list(reversed(ids)))  # order-independent


def test_manifest_round_trip(tmp_path):
    entries = [("a.csv", "train"), ("b.csv", "val"), ("c.csv", "test")]
    path = tmp_path / "manifest.txt"
    write_manifest(path, entries)
    loaded = read_manifest(path)
    assert [(p.name, s) for p, s in loaded] == entries
    assert all(p.parent == tmp_path for p, _ in loaded)
