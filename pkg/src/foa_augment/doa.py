"""Intensity-vector DOA estimation and the DOA error / frame recall metrics.

The estimator works in the time domain: per frame, the cross moments of the
omnidirectional channel W with X, Y and Z point toward a single source.
Multi-source frames yield the intensity centroid, which is not a localizer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    W,
    X,
    Y,
    Z,
    Direction,
    FoaSignal,
    LabelEntry,
    LabelTrack,
    angular_distance,
    frame_bounds,
    num_frames,
    to_spherical,
)
from .errors import NoCoactiveFramesError

DEFAULT_FRAME_HOP = 0.02
DEFAULT_ACTIVITY_THRESHOLD = 1e-4
MIN_INTENSITY = 1e-12


@dataclass(frozen=True)
class FrameEstimate:
    frame_index: int
    active: bool
    direction: Direction | None = None


def estimate_doa(
    sig: FoaSignal,
    frame_hop: float = DEFAULT_FRAME_HOP,
    activity_threshold: float = DEFAULT_ACTIVITY_THRESHOLD,
) -> list[FrameEstimate]:
    """One estimate per frame.

    A frame is active when its W energy exceeds ``activity_threshold`` times the
    energy of the loudest frame and its intensity vector is not vanishing.
    """
    if not frame_hop > 0:
        raise ValueError("frame_hop must be positive")
    count = num_frames(sig.length, frame_hop, sig.sample_rate)
    bounds = frame_bounds(count, frame_hop, sig.sample_rate, sig.length)
    d = sig.data
    energy = np.zeros(count)
    moments = np.zeros((count, 3))
    for k in range(count):
        a, b = bounds[k], bounds[k + 1]
        if b <= a:
            continue
        w = d[W, a:b]
        energy[k] = np.mean(w * w)
        moments[k] = (np.mean(w * d[X, a:b]), np.mean(w * d[Y, a:b]), np.mean(w * d[Z, a:b]))

    loudest = energy.max(initial=0.0)
    out = []
    for k in range(count):
        active = loudest > 0 and energy[k] > activity_threshold * loudest
        direction = None
        if active:
            norm = float(np.linalg.norm(moments[k]))
            if norm < MIN_INTENSITY:
                active = False
            else:
                direction = to_spherical(moments[k] / norm)
        out.append(FrameEstimate(k, active, direction))
    return out


def estimates_from_labels(labels: LabelTrack) -> list[FrameEstimate]:
    """Read a (single-source) label track as a list of estimates."""
    return [
        FrameEstimate(k, bool(f), f[0].direction if f else None) for k, f in enumerate(labels.frames)
    ]


def estimates_to_labels(est: Sequence[FrameEstimate], frame_hop: float, source_id: int = 0) -> LabelTrack:
    frames = [(LabelEntry(source_id, e.direction),) if e.active else () for e in est]
    return LabelTrack(frame_hop, tuple(frames))


def doa_error(est: Sequence[FrameEstimate], ref: LabelTrack) -> float:
    """Mean angular distance in degrees over frames active in both.

    When a reference frame lists several sources the nearest one counts.
    """
    errors = []
    for e in est:
        if not e.active or e.frame_index >= ref.num_frames:
            continue
        entries = ref.frames[e.frame_index]
        if not entries:
            continue
        errors.append(min(angular_distance(e.direction, r.direction) for r in entries))
    if not errors:
        raise NoCoactiveFramesError("no frame is active in both estimate and reference")
    return math.degrees(sum(errors) / len(errors))


def frame_recall(est: Sequence[FrameEstimate], ref: LabelTrack) -> float:
    """Fraction of frames where the estimated and reference source counts agree."""
    counts = {e.frame_index: int(e.active) for e in est}
    total = max(ref.num_frames, max(counts, default=-1) + 1)
    if total == 0:
        return 1.0
    hits = 0
    for k in range(total):
        ref_count = len(ref.frames[k]) if k < ref.num_frames else 0
        hits += counts.get(k, 0) == ref_count
    return hits / total
