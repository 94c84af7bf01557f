"""Oracle-equivalence checks on synthetic scenes.

Every augmentation is compared with the scene encoder run again at the
augmented directions. Used by ``foa-augment verify`` and by the test suite.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .channels_first import apply_channels_first, rotate_direction
from .core import (
    Direction,
    FoaSignal,
    LabelEntry,
    LabelTrack,
    angular_distance,
    frame_bounds,
    wrap_azimuth,
)
from .doa import doa_error, estimate_doa
from .labels_first import ElevationRangePolicy, apply_labels_first
from .patterns import ALL_PATTERNS, apply_pattern, pattern_channel_matrix, pattern_label_map, random_pattern
from .scene import SourceTrack, encode_scene, gen_test_source

SAMPLE_RATE = 32000
FRAME_HOP = 0.02
SCENE_SECONDS = 2.0
ORACLE_TOL = 1e-6


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    cases: int

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: worst={self.worst:.3g} tol={self.tolerance:.3g} cases={self.cases}"


def _random_direction(rng, max_elevation_deg=90.0, grid_deg=None) -> Direction:
    if grid_deg:
        az = grid_deg * int(rng.integers(-180 // grid_deg, 180 // grid_deg))
        steps = int(max_elevation_deg // grid_deg)
        el = grid_deg * int(rng.integers(-steps, steps + 1))
        return Direction.from_degrees(az, el)
    az = rng.uniform(-180.0, 180.0)
    el = rng.uniform(-max_elevation_deg, max_elevation_deg)
    return Direction.from_degrees(az, el)


def random_trajectory(rng, count: int, moving: bool, max_elevation_deg=90.0) -> list[Direction]:
    """Per-frame directions; a moving source holds 2-4 random positions in turn."""
    if not moving or count < 2:
        return [_random_direction(rng, max_elevation_deg)] * count
    n_cuts = min(int(rng.integers(1, 4)), count - 1)
    cuts = sorted(rng.choice(np.arange(1, count), size=n_cuts, replace=False))
    out = []
    start = 0
    for stop in list(cuts) + [count]:
        out.extend([_random_direction(rng, max_elevation_deg)] * (stop - start))
        start = stop
    return out


def random_scene(
    rng: np.random.Generator,
    n_sources: int,
    *,
    seconds: float = SCENE_SECONDS,
    sample_rate: int = SAMPLE_RATE,
    frame_hop: float = FRAME_HOP,
    max_elevation_deg: float = 90.0,
    moving: bool | None = None,
    full_length: bool = False,
) -> list[SourceTrack]:
    """White-noise sources with random onsets, durations and trajectories."""
    length = int(round(seconds * sample_rate))
    count = int(math.ceil(seconds / frame_hop - 1e-9))
    sources = []
    for sid in range(1, n_sources + 1):
        if full_length:
            onset, dur = 0, length
        else:
            onset = int(rng.integers(0, length // 4))
            dur = int(rng.integers(length // 4, length - onset + 1))
        samples = gen_test_source("white_noise", dur, sample_rate, rng)
        is_moving = bool(rng.integers(2)) if moving is None else moving
        traj = random_trajectory(rng, count, is_moving, max_elevation_deg)
        sources.append(SourceTrack(sid, samples, traj, onset))
    return sources


def frame_relative_errors(actual: FoaSignal, expected: FoaSignal, labels: LabelTrack) -> np.ndarray:
    """Per-frame RMS of the difference over RMS of ``expected`` (absolute where silent)."""
    bounds = frame_bounds(labels.num_frames, labels.frame_hop, actual.sample_rate, actual.length)
    out = np.zeros(labels.num_frames)
    for k in range(labels.num_frames):
        a, b = bounds[k], bounds[k + 1]
        if b <= a:
            continue
        diff = np.sqrt(np.mean((actual.data[:, a:b] - expected.data[:, a:b]) ** 2))
        ref = np.sqrt(np.mean(expected.data[:, a:b] ** 2))
        out[k] = diff / ref if ref > 0 else diff
    return out


def map_sources(sources: Sequence[SourceTrack], fn: Callable[[Direction], Direction]) -> list[SourceTrack]:
    """Sources with every trajectory direction passed through ``fn``."""
    out = []
    for s in sources:
        if isinstance(s.trajectory, Direction):
            out.append(s.with_trajectory(fn(s.trajectory)))
        else:
            out.append(s.with_trajectory([None if d is None else fn(d) for d in s.trajectory]))
    return out


def _encode(sources, seconds=SCENE_SECONDS):
    return encode_scene(sources, SAMPLE_RATE, int(round(seconds * SAMPLE_RATE)), FRAME_HOP)


def check_patterns_oracle(rng, n_single=50, n_multi=20) -> CheckResult:
    worst = 0.0
    cases = 0
    for n_src in [1] * n_single + [3] * n_multi:
        sources = random_scene(rng, n_src)
        sig, labels = _encode(sources)
        for p in ALL_PATTERNS:
            out, _ = apply_pattern(sig, labels, p)
            ref, _ = _encode(map_sources(sources, lambda d: pattern_label_map(p, d)))
            worst = max(worst, float(frame_relative_errors(out, ref, labels).max()))
            cases += 1
    return CheckResult("oracle equivalence, 16 patterns", worst <= ORACLE_TOL, worst, ORACLE_TOL, cases)


def labels_first_reference(sources, labels_in, labels_out, alpha) -> list[SourceTrack]:
    """Single-source reference: augmented label where one exists, azimuth-only shift elsewhere."""
    (src,) = sources
    traj = []
    for k in range(labels_in.num_frames):
        d = src.direction_at(k)
        if labels_out.frames[k]:
            traj.append(labels_out.frames[k][0].direction)
        elif d is not None:
            traj.append(Direction(wrap_azimuth(d.azimuth + alpha), d.elevation))
        else:
            traj.append(None)
    return [src.with_trajectory(traj)]


def check_labels_first_oracle(rng, n_scenes=100, limit_deg=40.0) -> tuple[CheckResult, CheckResult]:
    policy = ElevationRangePolicy.label_range(-limit_deg, limit_deg)
    worst = 0.0
    in_range = True
    for _ in range(n_scenes):
        sources = random_scene(rng, 1, max_elevation_deg=limit_deg)
        sig, labels = _encode(sources)
        out, new_labels, draw = apply_labels_first(sig, labels, policy, rng)
        ref, _ = _encode(labels_first_reference(sources, labels, new_labels, draw.alpha))
        errs = frame_relative_errors(out, ref, labels)
        active = [k for k in range(labels.num_frames) if labels.frames[k]]
        worst = max(worst, float(errs[active].max()))
        for d in new_labels.directions():
            if not (policy.range_min <= d.elevation <= policy.range_max):
                in_range = False
    return (
        CheckResult("oracle equivalence, Labels First", worst <= ORACLE_TOL, worst, ORACLE_TOL, n_scenes),
        CheckResult("Labels First elevations within limits", in_range, 0.0 if in_range else 1.0, 0.0, n_scenes),
    )


def check_channels_first_oracle(rng, n_scenes=50) -> tuple[CheckResult, CheckResult]:
    worst = 0.0
    worst_ortho = 0.0
    for _ in range(n_scenes):
        sources = random_scene(rng, int(rng.integers(1, 4)))
        sig, labels = _encode(sources)
        out, _, r = apply_channels_first(sig, labels, rng)
        worst_ortho = max(
            worst_ortho,
            float(np.max(np.abs(r @ r.T - np.eye(3)))),
            abs(abs(float(np.linalg.det(r))) - 1.0),
        )
        ref, _ = _encode(map_sources(sources, lambda d: rotate_direction(r, d)))
        worst = max(worst, float(frame_relative_errors(out, ref, labels).max()))
    return (
        CheckResult("oracle equivalence, Channels First", worst <= ORACLE_TOL, worst, ORACLE_TOL, n_scenes),
        CheckResult("Channels First matrices orthonormal", worst_ortho <= 1e-10, worst_ortho, 1e-10, n_scenes),
    )


def _entry(d):
    return LabelEntry(0, d)


def check_group_closure() -> CheckResult:
    mats = [pattern_channel_matrix(p) for p in ALL_PATTERNS]
    keys = {m.tobytes() for m in mats}
    identity = np.eye(3, dtype=np.int64)
    ok = len(keys) == 16 and identity.tobytes() in keys
    products = 0
    for a, b in itertools.product(mats, mats):
        products += 1
        ok &= (a @ b).tobytes() in keys
    for a in mats:
        ok &= any(np.array_equal(a @ b, identity) for b in mats)
    return CheckResult("16 patterns form a group", bool(ok), 0.0 if ok else 1.0, 0.0, products)


def _augment_any(method, sig, labels, rng):
    if method == "patterns16":
        return apply_pattern(sig, labels, random_pattern(rng))
    if method == "labels_first":
        out, new, _ = apply_labels_first(sig, labels, ElevationRangePolicy.label_range(), rng)
        return out, new
    out, new, _ = apply_channels_first(sig, labels, rng)
    return out, new


def check_estimator_equivariance(rng, n_scenes=100) -> tuple[CheckResult, CheckResult]:
    worst_frame = 0.0
    worst_gap = 0.0
    cases = 0
    for i in range(n_scenes):
        sources = random_scene(rng, 1, max_elevation_deg=40.0)
        sig, labels = _encode(sources)
        base = doa_error(estimate_doa(sig, FRAME_HOP), labels)
        for method in ("patterns16", "labels_first", "channels_first"):
            out, new = _augment_any(method, sig, labels, rng)
            est = estimate_doa(out, FRAME_HOP)
            for e in est:
                if e.active and new.frames[e.frame_index]:
                    err = math.degrees(angular_distance(e.direction, new.frames[e.frame_index][0].direction))
                    worst_frame = max(worst_frame, err)
            worst_gap = max(worst_gap, abs(doa_error(est, new) - base))
            cases += 1
    return (
        CheckResult("estimator follows augmented labels (deg)", worst_frame <= 0.5, worst_frame, 0.5, cases),
        CheckResult("DOA error unchanged by augmentation (deg)", worst_gap <= 0.2, worst_gap, 0.2, cases),
    )


def check_domain_preservation(rng, n_tracks=50) -> CheckResult:
    worst = 0.0
    ok = True
    for _ in range(n_tracks):
        frames = tuple((_entry(_random_direction(rng, 40.0, grid_deg=10)),) for _ in range(20))
        labels = LabelTrack(FRAME_HOP, frames)
        for p in ALL_PATTERNS:
            for d in labels.map_directions(lambda d: pattern_label_map(p, d)).directions():
                az, el = d.degrees()
                off = max(abs(az - 10 * round(az / 10)), abs(el - 10 * round(el / 10)))
                worst = max(worst, off)
                ok &= -40.0 <= el <= 40.0 and -180.0 <= az < 180.0
    return CheckResult("16 patterns keep the 10-degree grid", ok and worst <= 1e-9, worst, 1e-9, n_tracks * 16)


def check_wrap_formula(n_points=10000) -> CheckResult:
    angles = np.linspace(-6 * math.pi, 6 * math.pi, n_points)
    worst = 0.0
    ok = True
    for a in angles:
        got = wrap_azimuth(float(a))
        expected = (a + math.pi) % (2 * math.pi) - math.pi
        worst = max(worst, abs(got - expected))
        ok &= -math.pi <= got < math.pi
    return CheckResult("wrap-around formula", ok and worst <= 1e-12, worst, 1e-12, n_points)


def run_all(seed: int = 0, n_scenes: int = 100) -> list[CheckResult]:
    """Run the whole suite; ``n_scenes`` scales every randomized check."""
    rng = np.random.default_rng(seed)
    scale = n_scenes / 100.0
    results = [check_patterns_oracle(rng, max(1, round(50 * scale)), max(1, round(20 * scale)))]
    results.extend(check_labels_first_oracle(rng, max(1, round(100 * scale))))
    results.extend(check_channels_first_oracle(rng, max(1, round(50 * scale))))
    results.append(check_group_closure())
    results.extend(check_estimator_equivariance(rng, max(1, round(100 * scale))))
    results.append(check_domain_preservation(rng))
    results.append(check_wrap_formula())
    return results
