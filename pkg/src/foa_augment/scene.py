"""Synthetic FOA scene encoder and test-signal generators.

A scene is the source-sum model: every channel is ``1/N`` times the sum over
the N sources of the source signal weighted by that channel's steering gain.
Gains are piecewise constant per label frame, so a moving source has stepped
gains. This encoder is the ground truth that the augmentation methods are
checked against.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    Direction,
    FoaSignal,
    LabelEntry,
    LabelTrack,
    frame_bounds,
    num_frames,
    steering_vector,
)
from .errors import ScenarioError

ACTIVITY_RATIO = 1e-6
SOURCE_KINDS = ("white_noise", "sine", "pulse_train")


@dataclass(frozen=True)
class SourceTrack:
    """One mono source placed in a scene.

    ``trajectory`` is either a single Direction (static source) or a sequence
    indexed by scene frame; entries may be None for frames where the source is
    silent. ``onset`` is the sample offset of ``samples[0]`` within the scene.
    """

    source_id: int
    samples: np.ndarray
    trajectory: Direction | Sequence[Direction | None]
    onset: int = 0

    def direction_at(self, frame: int) -> Direction | None:
        if isinstance(self.trajectory, Direction):
            return self.trajectory
        if frame < len(self.trajectory):
            return self.trajectory[frame]
        return None

    def with_trajectory(self, trajectory) -> SourceTrack:
        return SourceTrack(self.source_id, self.samples, trajectory, self.onset)


def _place(src: SourceTrack, length: int) -> np.ndarray:
    out = np.zeros(length)
    samples = np.asarray(src.samples, dtype=np.float64)
    start = max(src.onset, 0)
    skip = start - src.onset
    stop = min(length, src.onset + len(samples))
    if stop > start:
        out[start:stop] = samples[skip : skip + stop - start]
    return out


def encode_scene(
    sources: Sequence[SourceTrack], sample_rate: int, length: int, frame_hop: float
) -> tuple[FoaSignal, LabelTrack]:
    """Encode sources into FOA and emit the matching label track.

    The normalization uses the total source count of the scene. A source is
    listed in a frame when its RMS there exceeds ``ACTIVITY_RATIO`` times its
    peak. An empty scene is silence with all frames inactive.
    """
    count = num_frames(length, frame_hop, sample_rate)
    bounds = frame_bounds(count, frame_hop, sample_rate, length)
    data = np.zeros((4, length))
    frames: list[list[LabelEntry]] = [[] for _ in range(count)]
    n = len(sources)
    for src in sources:
        placed = _place(src, length)
        peak = float(np.max(np.abs(src.samples))) if len(src.samples) else 0.0
        for k in range(count):
            seg = placed[bounds[k] : bounds[k + 1]]
            if not np.any(seg):
                continue
            direction = src.direction_at(k)
            if direction is None:
                raise ValueError(f"source {src.source_id} sounds in frame {k} but has no direction there")
            gains = steering_vector(direction).as_array()
            data[:, bounds[k] : bounds[k + 1]] += gains[:, None] * seg
            if math.sqrt(np.mean(seg * seg)) > ACTIVITY_RATIO * peak:
                frames[k].append(LabelEntry(src.source_id, direction))
    if n:
        data /= n
    return FoaSignal(sample_rate, data), LabelTrack(frame_hop, tuple(tuple(f) for f in frames))


def gen_test_source(
    kind: str,
    length: int,
    sample_rate: int,
    rng: np.random.Generator | None = None,
    *,
    frequency: float = 440.0,
    period: int | None = None,
) -> np.ndarray:
    """Mono fixture signal with peak amplitude at most 1.

    white_noise: uniform in [-1, 1). sine: unit sine at ``frequency``.
    pulse_train: unit impulses every ``period`` samples (default 10 per second).
    """
    if length <= 0:
        raise ValueError("length must be positive")
    if kind == "white_noise":
        if rng is None:
            raise ValueError("white_noise needs an rng")
        return rng.uniform(-1.0, 1.0, length)
    if kind == "sine":
        t = np.arange(length) / sample_rate
        return np.sin(2 * np.pi * frequency * t)
    if kind == "pulse_train":
        period = period or max(1, sample_rate // 10)
        out = np.zeros(length)
        out[::period] = 1.0
        return out
    raise ValueError(f"unknown source kind {kind!r}, expected one of {SOURCE_KINDS}")


@dataclass(frozen=True)
class ScenarioSource:
    source_id: int
    kind: str
    onset: float
    duration: float
    waypoints: tuple[tuple[float, float, float], ...]  # (time s, azimuth deg, elevation deg)
    frequency: float = 440.0

    def direction_at(self, t: float) -> Direction:
        """Direction of the latest waypoint at or before ``t`` (the first one before it)."""
        current = self.waypoints[0]
        for wp in self.waypoints:
            if wp[0] <= t + 1e-12:
                current = wp
        return Direction.from_degrees(current[1], current[2])


def parse_scenario(text: str) -> list[ScenarioSource]:
    """Parse a scenario description.

    One source per line::

        <id> <kind> <onset_s> <duration_s> <t:az_deg:el_deg> [<t:az_deg:el_deg> ...]

    ``kind`` is ``white_noise``, ``pulse_train``, ``sine`` or ``sine=<hz>``.
    Waypoint times are seconds from the scene start; the direction jumps at
    each waypoint. Blank lines and ``#`` comments are ignored.
    """
    out = []
    ids = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) < 5:
            raise ScenarioError("expected: id kind onset duration waypoint...", lineno)
        try:
            sid = int(parts[0])
            onset, duration = float(parts[2]), float(parts[3])
            waypoints = []
            for token in parts[4:]:
                t, az, el = (float(v) for v in token.split(":"))
                waypoints.append((t, az, el))
            kind, _, freq = parts[1].partition("=")
            frequency = float(freq) if freq else 440.0
        except ValueError as exc:
            raise ScenarioError(f"bad number ({exc})", lineno) from None
        if kind not in SOURCE_KINDS or (freq and kind != "sine"):
            raise ScenarioError(f"unknown source kind {parts[1]!r}", lineno)
        if sid in ids:
            raise ScenarioError(f"duplicate source id {sid}", lineno)
        if onset < 0 or duration <= 0:
            raise ScenarioError("onset must be >= 0 and duration > 0", lineno)
        for _, _, el in waypoints:
            if not -90.0 <= el <= 90.0:
                raise ScenarioError(f"elevation {el} outside [-90, 90]", lineno)
        ids.add(sid)
        waypoints.sort(key=lambda wp: wp[0])
        out.append(
            ScenarioSource(sid, kind, onset, duration, tuple(waypoints), frequency)
        )
    return out


def scenario_length(scenario: Sequence[ScenarioSource], sample_rate: int) -> int:
    end = max((s.onset + s.duration for s in scenario), default=0.0)
    return int(round(end * sample_rate))


def build_scene(
    scenario: Sequence[ScenarioSource],
    sample_rate: int,
    length: int,
    frame_hop: float,
    rng: np.random.Generator,
) -> tuple[FoaSignal, LabelTrack]:
    count = num_frames(length, frame_hop, sample_rate)
    sources = []
    for s in scenario:
        n = int(round(s.duration * sample_rate))
        samples = gen_test_source(s.kind, n, sample_rate, rng, frequency=s.frequency)
        trajectory = [s.direction_at(k * frame_hop) for k in range(count)]
        sources.append(SourceTrack(s.source_id, samples, trajectory, int(round(s.onset * sample_rate))))
    return encode_scene(sources, sample_rate, length, frame_hop)
