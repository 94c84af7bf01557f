import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from foa_augment.channels_first import (
    DegenerateMatrixError,
    apply_channels_first,
    gram_schmidt,
    is_orthonormal,
    random_orthonormal,
    rotate_direction,
    transform_labels,
)
from foa_augment.core import FoaSignal, LabelTrack
from foa_augment.errors import RngFailureError, SpanMismatchError
from foa_augment.labels_first import azimuth_rotation_matrix
from foa_augment.patterns import PatternId, apply_pattern, pattern_channel_matrix
from foa_augment.scene import encode_scene
from foa_augment.verification import frame_relative_errors, map_sources, random_scene

from conftest import HOP, SR, deg, noise_scene, track

seeds = st.integers(0, 2**63 - 1)


def qr_reference(m):
    """Orthonormal factor with a positive-diagonal R: what Gram-Schmidt must produce."""
    q, r = np.linalg.qr(m)
    return q * np.sign(np.diag(r))


def test_gram_schmidt_of_identity():
    assert np.array_equal(gram_schmidt(np.eye(3)), np.eye(3))


@given(seeds)
def test_gram_schmidt_matches_qr(seed):
    m = np.random.default_rng(seed).standard_normal((3, 3))
    assert np.allclose(gram_schmidt(m), qr_reference(m), atol=1e-9)


def test_gram_schmidt_rejects_dependent_columns():
    with pytest.raises(DegenerateMatrixError):
        gram_schmidt(np.array([[1.0, 2.0, 0.0], [0.0, 0.0, 1.0], [1.0, 2.0, 0.0]]))


def test_gram_schmidt_ill_conditioned_stays_orthonormal():
    m = np.array([[1.0, 1.0, 1.0], [1e-7, 0.0, 0.0], [0.0, 1e-7, 0.0]])
    assert is_orthonormal(gram_schmidt(m))


def test_random_orthonormal_statistics():
    dets = []
    for seed in range(1000):
        r = random_orthonormal(np.random.default_rng(seed))
        assert np.max(np.abs(r @ r.T - np.eye(3))) <= 1e-10
        det = np.linalg.det(r)
        assert abs(abs(det) - 1.0) <= 1e-10
        dets.append(det)
    assert min(dets) < 0 < max(dets)


@given(seeds)
def test_random_orthonormal_is_deterministic(seed):
    a = random_orthonormal(np.random.default_rng(seed))
    b = random_orthonormal(np.random.default_rng(seed))
    assert a.tobytes() == b.tobytes()


class DegenerateRng:
    def standard_normal(self, shape):
        return np.ones(shape)


class FlakyRng:
    """Degenerate for the first few draws, then normal."""

    def __init__(self, bad):
        self.bad = bad
        self.inner = np.random.default_rng(0)

    def standard_normal(self, shape):
        if self.bad:
            self.bad -= 1
            return np.zeros(shape)
        return self.inner.standard_normal(shape)


def test_random_orthonormal_redraws_then_fails():
    assert is_orthonormal(random_orthonormal(FlakyRng(5)))
    with pytest.raises(RngFailureError):
        random_orthonormal(DegenerateRng())


def test_transform_labels_examples():
    labels = track([(1, 30, 20)], [], [(1, 30, 20), (2, -100, 0)])
    assert transform_labels(np.eye(3), labels) == labels
    flipped = transform_labels(np.diag([1.0, 1.0, -1.0]), labels)
    assert flipped.frames[0][0].direction.degrees() == pytest.approx((30.0, -20.0))
    turned = transform_labels(azimuth_rotation_matrix(math.pi / 2), labels)
    assert turned.frames[0][0].direction.degrees() == pytest.approx((120.0, 20.0))
    assert turned.frames[2][1].direction.degrees() == pytest.approx((-10.0, 0.0))
    assert [len(f) for f in turned.frames] == [1, 0, 2]


@given(seeds)
def test_transform_labels_composes(seed):
    rng = np.random.default_rng(seed)
    r1, r2 = random_orthonormal(rng), random_orthonormal(rng)
    d = deg(rng.uniform(-180, 180), rng.uniform(-85, 85))
    a = rotate_direction(r1, rotate_direction(r2, d))
    b = rotate_direction(r1 @ r2, d)
    gap = abs((a.azimuth - b.azimuth + math.pi) % (2 * math.pi) - math.pi)
    if abs(b.elevation) < math.pi / 2 - 1e-6:
        assert gap <= 1e-9
    assert a.elevation == pytest.approx(b.elevation, abs=1e-9)


def test_identity_injection_leaves_input(rng):
    _, sig, labels = noise_scene(rng, [deg(20, 5), deg(-60, 30)])
    out, new, r = apply_channels_first(sig, labels, rotation=np.eye(3))
    assert np.array_equal(out.data, sig.data)
    assert new == labels
    assert np.array_equal(r, np.eye(3))


def test_pattern_injection_matches_apply_pattern(rng):
    _, sig, labels = noise_scene(rng, [deg(20, 5)])
    p = PatternId.parse("s+d+90e+")
    out, new, _ = apply_channels_first(sig, labels, rotation=pattern_channel_matrix(p))
    ref, ref_labels = apply_pattern(sig, labels, p)
    assert np.max(np.abs(out.data - ref.data)) <= 1e-12
    for a, b in zip(new.directions(), ref_labels.directions()):
        assert a.azimuth == pytest.approx(b.azimuth, abs=1e-9)
        assert a.elevation == pytest.approx(b.elevation, abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_three_sources_oracle(seed):
    rng = np.random.default_rng(seed)
    sources = random_scene(rng, 3, seconds=0.3)
    sig, labels = encode_scene(sources, SR, int(0.3 * SR), HOP)
    out, new, r = apply_channels_first(sig, labels, rng)
    ref, ref_labels = encode_scene(map_sources(sources, lambda d: rotate_direction(r, d)), SR, sig.length, HOP)
    assert np.max(frame_relative_errors(out, ref, labels)) <= 1e-6
    assert new == ref_labels
    assert np.array_equal(out.w, sig.w)
    assert np.allclose(np.sum(out.xyz**2, axis=0), np.sum(sig.xyz**2, axis=0), rtol=1e-9, atol=0)


def test_injected_matrix_must_be_orthonormal(rng):
    _, sig, labels = noise_scene(rng, [deg(0, 0)])
    with pytest.raises(ValueError):
        apply_channels_first(sig, labels, rotation=2 * np.eye(3))
    with pytest.raises(ValueError):
        apply_channels_first(sig, labels)


def test_span_mismatch():
    with pytest.raises(SpanMismatchError):
        apply_channels_first(FoaSignal(SR, np.zeros((4, 100))), LabelTrack.empty(HOP, 5), rotation=np.eye(3))
