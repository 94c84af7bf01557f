"""The sixteen discrete channel swap / sign-inversion patterns.

Each pattern maps a label ``(phi, theta)`` to ``(s*phi + offset, e*theta)`` with
``s, e`` in {+1, -1} and ``offset`` in {-pi/2, 0, pi/2, pi}. The matching channel
transform is a signed permutation of (X, Y, Z) obtained from the steering
vectors: a planar rotation by ``offset`` composed with an optional mirror of Y,
times an optional flip of Z.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .core import Direction, FoaSignal, LabelTrack, apply_matrix, check_span, wrap_azimuth

# azimuth offsets in quarter turns, indexed by ``azimuth_code % 4``
_QUARTER_TURNS = (0, 1, 2, -1)
_OFFSET_TEXT = {0: "0", 1: "+90", 2: "+180", -1: "-90"}

# (cos, sin) of the offset, exact for quarter turns
_COS_SIN = {0: (1, 0), 1: (0, 1), 2: (-1, 0), -1: (0, -1)}


@dataclass(frozen=True, order=True)
class PatternId:
    """One of the 16 patterns.

    ``azimuth_code`` 0-3 keep the azimuth sign and add 0, +90, +180, -90 degrees;
    4-7 negate the azimuth first and then add the same offsets. ``elevation_flip``
    negates the elevation.
    """

    azimuth_code: int = 0
    elevation_flip: bool = False

    def __post_init__(self):
        if self.azimuth_code not in range(8):
            raise ValueError(f"azimuth_code must be in 0..7, got {self.azimuth_code!r}")
        object.__setattr__(self, "elevation_flip", bool(self.elevation_flip))

    @property
    def azimuth_sign(self) -> int:
        return 1 if self.azimuth_code < 4 else -1

    @property
    def quarter_turns(self) -> int:
        return _QUARTER_TURNS[self.azimuth_code % 4]

    @property
    def offset(self) -> float:
        return self.quarter_turns * math.pi / 2

    @property
    def elevation_sign(self) -> int:
        return -1 if self.elevation_flip else 1

    @property
    def is_identity(self) -> bool:
        return self.azimuth_code == 0 and not self.elevation_flip

    def __str__(self) -> str:
        return "s{}d{}e{}".format(
            "+" if self.azimuth_sign > 0 else "-",
            _OFFSET_TEXT[self.quarter_turns],
            "-" if self.elevation_flip else "+",
        )

    @classmethod
    def parse(cls, text: str) -> PatternId:
        m = re.fullmatch(r"s([+-])d(-90|0|\+90|\+180)e([+-])", text.strip())
        if m is None:
            raise ValueError(f"not a pattern id: {text!r}")
        sign, offset, elev = m.groups()
        turns = {v: k for k, v in _OFFSET_TEXT.items()}[offset]
        code = _QUARTER_TURNS.index(turns) + (0 if sign == "+" else 4)
        return cls(code, elev == "-")


IDENTITY = PatternId(0, False)
ALL_PATTERNS = tuple(PatternId(code, flip) for flip in (False, True) for code in range(8))


def pattern_label_map(p: PatternId, d: Direction) -> Direction:
    azimuth = wrap_azimuth(p.azimuth_sign * d.azimuth + p.offset)
    return Direction(azimuth, p.elevation_sign * d.elevation)


def pattern_channel_matrix(p: PatternId) -> np.ndarray:
    """Signed permutation acting on the column (X, Y, Z); integer entries."""
    c, s = _COS_SIN[p.quarter_turns]
    rotation = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]], dtype=np.int64)
    mirror = np.diag([1, p.azimuth_sign, p.elevation_sign]).astype(np.int64)
    m = rotation @ mirror
    m.setflags(write=False)
    return m


def random_pattern(rng: np.random.Generator) -> PatternId:
    """Uniform draw over all 16 patterns, identity included."""
    return ALL_PATTERNS[int(rng.integers(len(ALL_PATTERNS)))]


def apply_pattern(sig: FoaSignal, labels: LabelTrack, p: PatternId) -> tuple[FoaSignal, LabelTrack]:
    check_span(sig, labels)
    if p.is_identity:
        return sig, labels
    out = apply_matrix(sig, pattern_channel_matrix(p))
    return out, labels.map_directions(lambda d: pattern_label_map(p, d))
