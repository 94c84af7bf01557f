"""Labels First augmentation.

The target labels are decided first: azimuths are shifted by a random ``alpha``
(with wrap-around) and elevations by a random ``beta``. The channels are then
rotated to match, by ``Rz(alpha)`` for every sample followed, per label frame,
by a Rodrigues rotation of ``beta`` about the horizontal axis perpendicular to
the frame's new azimuth.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    TWO_PI,
    CartesianDir,
    Direction,
    FoaSignal,
    LabelEntry,
    LabelTrack,
    check_span,
    frame_bounds,
    wrap_azimuth,
)
from .errors import NoActiveFramesError, OverlapUnsupportedError


class ElevationMode(enum.Enum):
    LABEL_RANGE = "label-range"
    FIXED_RANGE = "fixed-range"


@dataclass(frozen=True)
class ElevationRangePolicy:
    """How the elevation shift is drawn.

    In ``LABEL_RANGE`` mode ``range_min``/``range_max`` are the dataset's
    elevation limits and the shift is chosen so that every label stays inside
    them. In ``FIXED_RANGE`` mode they bound the shift itself.
    """

    mode: ElevationMode
    range_min: float
    range_max: float

    def __post_init__(self):
        object.__setattr__(self, "mode", ElevationMode(self.mode))
        if self.range_min > self.range_max:
            raise ValueError(f"range_min {self.range_min!r} > range_max {self.range_max!r}")

    @classmethod
    def label_range(cls, min_deg: float = -40.0, max_deg: float = 40.0) -> ElevationRangePolicy:
        return cls(ElevationMode.LABEL_RANGE, math.radians(min_deg), math.radians(max_deg))

    @classmethod
    def fixed_range(cls, min_deg: float = -20.0, max_deg: float = 20.0) -> ElevationRangePolicy:
        return cls(ElevationMode.FIXED_RANGE, math.radians(min_deg), math.radians(max_deg))


@dataclass(frozen=True)
class LabelsFirstDraw:
    alpha: float
    beta: float


def azimuth_rotation_matrix(alpha: float) -> np.ndarray:
    c, s = math.cos(alpha), math.sin(alpha)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def elevation_axis(phi_prime: float) -> CartesianDir:
    """Horizontal unit axis about which a positive rotation raises elevation at ``phi_prime``."""
    return CartesianDir(math.sin(phi_prime), -math.cos(phi_prime), 0.0)


def rodrigues_rotate(v, u: CartesianDir, beta: float) -> np.ndarray:
    """Rotate ``v`` by ``beta`` about the unit axis ``u``.

    ``v`` may be a single 3-vector or a (3, n) block of channel samples.
    """
    v = np.asarray(v, dtype=np.float64)
    axis = u.as_array()
    column = axis.reshape((3,) + (1,) * (v.ndim - 1))
    cos_b, sin_b = math.cos(beta), math.sin(beta)
    cross = np.cross(axis, v, axis=0) if v.ndim > 1 else np.cross(axis, v)
    dot = np.tensordot(axis, v, axes=(0, 0))
    return v * cos_b + cross * sin_b + column * dot * (1.0 - cos_b)


def _elevation_extent(labels: LabelTrack) -> tuple[float, float]:
    elevations = [d.elevation for d in labels.directions()]
    if not elevations:
        raise NoActiveFramesError("label track has no active frame")
    return min(elevations), max(elevations)


def select_beta(labels: LabelTrack, policy: ElevationRangePolicy, rng: np.random.Generator) -> float:
    if policy.mode is ElevationMode.FIXED_RANGE:
        return float(rng.uniform(policy.range_min, policy.range_max))
    lowest, highest = _elevation_extent(labels)
    low = policy.range_min - lowest
    high = policy.range_max - highest
    if not high > low:
        return 0.0
    return float(rng.uniform(low, high))


def _shift_label(d: Direction, alpha: float, beta: float, clamp: tuple[float, float] | None) -> Direction:
    azimuth = wrap_azimuth(d.azimuth + alpha)
    elevation = d.elevation + beta
    # only absorbs rounding: labels that start outside the limits are left as they are
    if clamp is not None and clamp[0] <= d.elevation <= clamp[1]:
        elevation = min(max(elevation, clamp[0]), clamp[1])
    return Direction.from_angles(azimuth, elevation)


def apply_labels_first(
    sig: FoaSignal,
    labels: LabelTrack,
    policy: ElevationRangePolicy,
    rng: np.random.Generator | None = None,
    *,
    alpha: float | None = None,
    beta: float | None = None,
) -> tuple[FoaSignal, LabelTrack, LabelsFirstDraw]:
    """Augment a single-source recording with the Labels First method.

    ``alpha`` and ``beta`` override the random draws when given; ``rng`` is only
    consulted for the ones left unset.
    """
    check_span(sig, labels)
    if labels.max_overlap() > 1:
        raise OverlapUnsupportedError("Labels First needs at most one active source per frame")
    if (alpha is None or beta is None) and rng is None:
        raise ValueError("an rng is required unless both alpha and beta are given")

    if alpha is None:
        alpha = float(rng.uniform(0.0, TWO_PI))
    if beta is None:
        beta = select_beta(labels, policy, rng)

    clamp = None
    if policy.mode is ElevationMode.LABEL_RANGE:
        clamp = (policy.range_min, policy.range_max)
    new_frames = []
    for frame in labels.frames:
        new_frames.append(tuple(LabelEntry(e.source_id, _shift_label(e.direction, alpha, beta, clamp)) for e in frame))
    new_labels = LabelTrack(labels.frame_hop, tuple(new_frames))

    xyz = azimuth_rotation_matrix(alpha) @ sig.xyz
    if beta != 0.0:
        bounds = frame_bounds(labels.num_frames, labels.frame_hop, sig.sample_rate, sig.length)
        for k, frame in enumerate(labels.frames):
            start, stop = bounds[k], bounds[k + 1]
            # silent frames have no label to define the axis
            if not frame or stop <= start:
                continue
            phi_prime = wrap_azimuth(frame[0].direction.azimuth + alpha)
            xyz[:, start:stop] = rodrigues_rotate(xyz[:, start:stop], elevation_axis(phi_prime), beta)
    return sig.with_xyz(xyz), new_labels, LabelsFirstDraw(alpha, beta)
