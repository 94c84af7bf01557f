import numpy as np
import pytest

from foa_augment.core import Direction, LabelEntry, LabelTrack
from foa_augment.scene import SourceTrack, encode_scene, gen_test_source

SR = 32000
HOP = 0.02


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def deg(az, el):
    return Direction.from_degrees(az, el)


def noise_scene(rng, directions, seconds=0.5, onset=0):
    """Encode static white-noise sources, one per direction."""
    length = int(seconds * SR)
    sources = [
        SourceTrack(i + 1, gen_test_source("white_noise", length - onset, SR, rng), d, onset)
        for i, d in enumerate(directions)
    ]
    sig, labels = encode_scene(sources, SR, length, HOP)
    return sources, sig, labels


def track(*frames, hop=HOP):
    """Label track from per-frame lists of (source_id, az_deg, el_deg)."""
    return LabelTrack(hop, tuple(tuple(LabelEntry(s, deg(a, e)) for s, a, e in f) for f in frames))
