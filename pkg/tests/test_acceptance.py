"""Acceptance suite. Run with ``pytest tests/test_acceptance.py -s`` to see one line per criterion."""

import os
import time

import numpy as np
import pytest

from foa_augment.cli import run
from foa_augment.core import Direction, LabelEntry, LabelTrack
from foa_augment.io import read_labels_csv, write_foa_wav, write_labels_csv
from foa_augment.patterns import ALL_PATTERNS, pattern_label_map
from foa_augment.scene import encode_scene
from foa_augment import verification as v

SEED = 20240601


def report(number, result):
    print(f"\n[criterion {number}] {result.line()}")
    assert result.passed, result.line()


def test_1_patterns_oracle():
    start = time.perf_counter()
    result = v.check_patterns_oracle(np.random.default_rng(SEED), n_single=50, n_multi=20)
    elapsed = time.perf_counter() - start
    timing = v.CheckResult("runtime of criterion 1 (s)", elapsed <= 60.0, elapsed, 60.0, 1)
    print(f"\n[criterion 1] {timing.line()}")
    report(1, result)
    assert timing.passed


def test_2_labels_first_oracle():
    oracle, in_range = v.check_labels_first_oracle(np.random.default_rng(SEED + 2), n_scenes=100, limit_deg=40.0)
    report(2, oracle)
    report(2, in_range)


def test_3_channels_first_oracle():
    oracle, ortho = v.check_channels_first_oracle(np.random.default_rng(SEED + 3), n_scenes=50)
    report(3, oracle)
    report(3, ortho)


def test_4_group_closure():
    result = v.check_group_closure()
    assert result.cases == 256
    report(4, result)


def test_5_estimator_equivariance():
    per_frame, gap = v.check_estimator_equivariance(np.random.default_rng(SEED + 5), n_scenes=100)
    report(5, per_frame)
    report(5, gap)


def test_6_domain_preservation(tmp_path):
    report(6, v.check_domain_preservation(np.random.default_rng(SEED + 6), n_tracks=50))
    # the serialized form is exactly on the grid
    rng = np.random.default_rng(SEED + 60)
    frames = []
    for _ in range(200):
        az = 10.0 * rng.integers(-18, 18)
        el = 10.0 * rng.integers(-4, 5)
        frames.append((LabelEntry(1, Direction.from_degrees(az, el)),))
    labels = LabelTrack(v.FRAME_HOP, tuple(frames))
    bad = 0
    for p in ALL_PATTERNS:
        path = tmp_path / f"{p}.csv"
        write_labels_csv(labels.map_directions(lambda d: pattern_label_map(p, d)), path)
        for line in path.read_text().splitlines()[2:]:
            _, _, az, el = line.split(",")
            ok = az.endswith("0.000000") and el.endswith("0.000000")
            ok &= -180 <= float(az) < 180 and -40 <= float(el) <= 40
            bad += not ok
    text = v.CheckResult("serialized pattern outputs on the 10-degree grid", bad == 0, float(bad), 0.0, 16 * 200)
    report(6, text)


def test_7_wrap_formula():
    report(7, v.check_wrap_formula(n_points=10000))


def fixture_tree(path, n_files=20):
    rng = np.random.default_rng(SEED + 8)
    path.mkdir()
    n = int(v.SCENE_SECONDS * v.SAMPLE_RATE)
    for i in range(n_files):
        sources = v.random_scene(rng, 1, max_elevation_deg=40.0)
        sig, labels = encode_scene(sources, v.SAMPLE_RATE, n, v.FRAME_HOP)
        write_foa_wav(sig, path / f"fixture{i:02d}.wav")
        write_labels_csv(labels, path / f"fixture{i:02d}.csv", v.SAMPLE_RATE)
    return path


@pytest.mark.parametrize("method", ["patterns16", "labels_first", "channels_first"])
def test_8_cli_determinism(tmp_path, method):
    src = fixture_tree(tmp_path / "in")
    outs = []
    for name in ("run1", "run2"):
        code = run(["augment", "--method", method, "--probability", "0.5", "--seed", "99",
                    "--in", str(src), "--out", str(tmp_path / name)])
        assert code == 0
        d = tmp_path / name
        outs.append({f: (d / f).read_bytes() for f in sorted(os.listdir(d))})
    identical = outs[0] == outs[1]
    augmented = sum(f.endswith("_aug1.wav") for f in outs[0])
    assert augmented > 0
    for f in outs[0]:
        if f.endswith(".csv"):
            read_labels_csv(tmp_path / "run1" / f)
    result = v.CheckResult(f"CLI determinism, {method}, 20 files", identical, 0.0 if identical else 1.0, 0.0, len(outs[0]))
    report(8, result)


def test_9_not_reproducible():
    print("\n[criterion 9] SKIP  network training results are out of scope and not reproduced")
    pytest.skip("requires training neural networks on an external dataset")
