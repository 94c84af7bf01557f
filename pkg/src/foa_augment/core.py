"""Angles, unit-sphere geometry, FOA steering vectors and the shared value types.

Angles are radians everywhere in memory. Azimuth lives in [-pi, pi), elevation
in [-pi/2, pi/2]. FOA channels are stored in ACN order (W, Y, Z, X); the
directional triple is handled as the Cartesian column (X, Y, Z).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import SpanMismatchError

SQRT3 = math.sqrt(3.0)
TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi

# channel index of each named FOA channel (ACN order)
W, Y, Z, X = 0, 1, 2, 3
# rows of the (4, n) data array that make up the Cartesian (X, Y, Z) column
XYZ_ROWS = (X, Y, Z)


def wrap_azimuth(angle: float) -> float:
    """Wrap an angle onto [-pi, pi) as ``(angle + pi) mod 2pi - pi``.

    Angles already inside the interval come back untouched, so the function is
    exactly idempotent.
    """
    if -math.pi <= angle < math.pi:
        return float(angle)
    wrapped = (angle + math.pi) % TWO_PI - math.pi
    # float modulo can round up to exactly 2pi
    if wrapped >= math.pi:
        wrapped -= TWO_PI
    return wrapped


@dataclass(frozen=True)
class Direction:
    """Direction of arrival on the unit sphere."""

    azimuth: float
    elevation: float

    def __post_init__(self):
        if not (-math.pi <= self.azimuth < math.pi):
            raise ValueError(f"azimuth {self.azimuth!r} outside [-pi, pi)")
        if not (-HALF_PI <= self.elevation <= HALF_PI):
            raise ValueError(f"elevation {self.elevation!r} outside [-pi/2, pi/2]")

    @classmethod
    def from_degrees(cls, azimuth: float, elevation: float) -> Direction:
        return cls(wrap_azimuth(math.radians(azimuth)), math.radians(elevation))

    @classmethod
    def from_angles(cls, azimuth: float, elevation: float) -> Direction:
        """Build a Direction from unconstrained angles.

        Elevations past a pole are folded over it (the azimuth flips by pi);
        the azimuth is then wrapped.
        """
        elevation = wrap_azimuth(elevation)
        if elevation > HALF_PI:
            elevation = math.pi - elevation
            azimuth += math.pi
        elif elevation < -HALF_PI:
            elevation = -math.pi - elevation
            azimuth += math.pi
        if abs(elevation) == HALF_PI:
            azimuth = 0.0
        return cls(wrap_azimuth(azimuth), elevation)

    def degrees(self) -> tuple[float, float]:
        return math.degrees(self.azimuth), math.degrees(self.elevation)


@dataclass(frozen=True)
class CartesianDir:
    x: float
    y: float
    z: float

    def __post_init__(self):
        norm2 = self.x * self.x + self.y * self.y + self.z * self.z
        if abs(norm2 - 1.0) > 1e-9:
            raise ValueError(f"not a unit vector (squared norm {norm2!r})")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class SteeringVector:
    w: float
    y: float
    z: float
    x: float

    def as_array(self) -> np.ndarray:
        """Gains in channel (ACN) order."""
        return np.array([self.w, self.y, self.z, self.x])


def to_cartesian(d: Direction) -> CartesianDir:
    ce = math.cos(d.elevation)
    return CartesianDir(ce * math.cos(d.azimuth), ce * math.sin(d.azimuth), math.sin(d.elevation))


def to_spherical(v: CartesianDir | Sequence[float]) -> Direction:
    """Inverse of :func:`to_cartesian`. The azimuth is 0 at either pole."""
    if isinstance(v, CartesianDir):
        x, y, z = v.x, v.y, v.z
    else:
        x, y, z = (float(c) for c in v)
    norm = math.sqrt(x * x + y * y + z * z)
    if abs(norm - 1.0) > 1e-6:
        raise ValueError(f"expected a unit vector, got norm {norm!r}")
    x, y, z = x / norm, y / norm, z / norm
    horizontal = math.hypot(x, y)
    elevation = math.atan2(z, horizontal)
    if horizontal == 0.0:
        return Direction(0.0, math.copysign(HALF_PI, z))
    return Direction(wrap_azimuth(math.atan2(y, x)), elevation)


def steering_vector(d: Direction) -> SteeringVector:
    ce = math.cos(d.elevation)
    return SteeringVector(
        w=1.0,
        y=SQRT3 * math.sin(d.azimuth) * ce,
        z=SQRT3 * math.sin(d.elevation),
        x=SQRT3 * math.cos(d.azimuth) * ce,
    )


def angular_distance(a: Direction, b: Direction) -> float:
    """Great-circle distance in radians, in [0, pi]."""
    ca, cb = to_cartesian(a), to_cartesian(b)
    dot = ca.x * cb.x + ca.y * cb.y + ca.z * cb.z
    return math.acos(min(1.0, max(-1.0, dot)))


@dataclass(frozen=True)
class FoaSignal:
    """Four-channel FOA buffer, shape (4, n), channels in (W, Y, Z, X) order."""

    sample_rate: int
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2 or data.shape[0] != 4:
            raise ValueError(f"FOA data must have shape (4, n), got {data.shape}")
        if int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise ValueError(f"sample rate must be a positive integer, got {self.sample_rate!r}")
        if data is self.data and data.flags.writeable:
            data = data.copy()
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    @property
    def length(self) -> int:
        return self.data.shape[1]

    @property
    def duration(self) -> float:
        return self.length / self.sample_rate

    @property
    def w(self) -> np.ndarray:
        return self.data[W]

    @property
    def xyz(self) -> np.ndarray:
        """The directional channels stacked as Cartesian rows (X, Y, Z)."""
        return self.data[list(XYZ_ROWS)]

    def with_xyz(self, xyz: np.ndarray) -> FoaSignal:
        """New signal with W copied from this one and the given (X, Y, Z) rows."""
        out = np.empty_like(self.data)
        out[W] = self.data[W]
        out[list(XYZ_ROWS)] = xyz
        return FoaSignal(self.sample_rate, out)


@dataclass(frozen=True)
class LabelEntry:
    source_id: int
    direction: Direction


@dataclass(frozen=True)
class LabelTrack:
    """Per-frame lists of active sources on a fixed frame hop (seconds)."""

    frame_hop: float
    frames: tuple[tuple[LabelEntry, ...], ...]

    def __post_init__(self):
        if not self.frame_hop > 0:
            raise ValueError(f"frame_hop must be positive, got {self.frame_hop!r}")
        frames = tuple(tuple(f) for f in self.frames)
        for k, frame in enumerate(frames):
            ids = [e.source_id for e in frame]
            if len(set(ids)) != len(ids):
                raise ValueError(f"frame {k} repeats a source id: {ids}")
        object.__setattr__(self, "frames", frames)

    @classmethod
    def empty(cls, frame_hop: float, num_frames: int) -> LabelTrack:
        return cls(frame_hop, ((),) * num_frames)

    @property
    def num_frames(self) -> int:
        return len(self.frames)

    @property
    def duration(self) -> float:
        return self.num_frames * self.frame_hop

    def active_frames(self) -> list[int]:
        return [k for k, f in enumerate(self.frames) if f]

    def max_overlap(self) -> int:
        return max((len(f) for f in self.frames), default=0)

    def map_directions(self, fn: Callable[[Direction], Direction]) -> LabelTrack:
        return LabelTrack(
            self.frame_hop,
            tuple(tuple(LabelEntry(e.source_id, fn(e.direction)) for e in f) for f in self.frames),
        )

    def directions(self) -> Iterable[Direction]:
        for frame in self.frames:
            for e in frame:
                yield e.direction


def samples_per_frame(frame_hop: float, sample_rate: int) -> float:
    return frame_hop * sample_rate


def num_frames(length: int, frame_hop: float, sample_rate: int) -> int:
    """Number of label frames needed to cover ``length`` samples."""
    spf = samples_per_frame(frame_hop, sample_rate)
    return max(0, math.ceil(length / spf - 1e-9))


def frame_bounds(count: int, frame_hop: float, sample_rate: int, length: int) -> np.ndarray:
    """Sample boundaries of ``count`` frames, clipped to ``length``; shape (count + 1,)."""
    spf = samples_per_frame(frame_hop, sample_rate)
    bounds = np.round(np.arange(count + 1) * spf).astype(np.int64)
    return np.minimum(bounds, length)


def check_span(sig: FoaSignal, labels: LabelTrack) -> None:
    gap = abs(sig.duration - labels.duration)
    if gap > labels.frame_hop * (1 + 1e-9):
        raise SpanMismatchError(
            f"signal lasts {sig.duration:.6f} s but labels cover {labels.duration:.6f} s "
            f"(frame hop {labels.frame_hop:.6f} s)"
        )


def apply_matrix(sig: FoaSignal, m: np.ndarray) -> FoaSignal:
    """Multiply every sample's (X, Y, Z) column by the 3x3 matrix ``m``; W untouched."""
    return sig.with_xyz(np.asarray(m, dtype=np.float64) @ sig.xyz)
