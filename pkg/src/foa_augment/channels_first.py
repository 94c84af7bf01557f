"""Channels First augmentation: a random orthonormal matrix on (X, Y, Z).

The labels follow through Cartesian coordinates on the unit sphere. Reflections
(det = -1) are part of the method and are not filtered out.
"""
from __future__ import annotations

import numpy as np

from .core import Direction, FoaSignal, LabelTrack, apply_matrix, check_span, to_cartesian, to_spherical
from .errors import RngFailureError

MAX_ATTEMPTS = 100
MIN_COLUMN_NORM = 1e-8
ORTHO_TOL = 1e-10


class DegenerateMatrixError(ValueError):
    pass


def gram_schmidt(m: np.ndarray) -> np.ndarray:
    """Orthonormalize the columns of a square matrix (modified Gram-Schmidt).

    Each new column is projected off the already-finished ones one at a time
    and then re-orthogonalized once more. Raises DegenerateMatrixError when a
    column collapses below ``MIN_COLUMN_NORM`` after projection.
    """
    q = np.array(m, dtype=np.float64)
    n = q.shape[1]
    for j in range(n):
        v = q[:, j].copy()
        for _ in range(2):
            for i in range(j):
                v -= (q[:, i] @ v) * q[:, i]
        norm = np.linalg.norm(v)
        if norm < MIN_COLUMN_NORM:
            raise DegenerateMatrixError(f"column {j} is (nearly) dependent on the previous ones")
        q[:, j] = v / norm
    return q


def is_orthonormal(m: np.ndarray, tol: float = ORTHO_TOL) -> bool:
    m = np.asarray(m, dtype=np.float64)
    gram_err = np.max(np.abs(m @ m.T - np.eye(m.shape[0])))
    return bool(gram_err <= tol and abs(abs(np.linalg.det(m)) - 1.0) <= tol)


def random_orthonormal(rng: np.random.Generator) -> np.ndarray:
    """Random 3x3 orthonormal matrix from a Gaussian draw.

    Not Haar-uniform: plain Gram-Schmidt of a Gaussian matrix has no sign
    correction. Either determinant sign can occur.
    """
    for _ in range(MAX_ATTEMPTS):
        try:
            r = gram_schmidt(rng.standard_normal((3, 3)))
        except DegenerateMatrixError:
            continue
        if is_orthonormal(r):
            return r
    raise RngFailureError(f"no usable matrix in {MAX_ATTEMPTS} draws")


def rotate_direction(r: np.ndarray, d: Direction) -> Direction:
    return to_spherical(np.asarray(r, dtype=np.float64) @ to_cartesian(d).as_array())


def transform_labels(r: np.ndarray, labels: LabelTrack) -> LabelTrack:
    r = np.asarray(r, dtype=np.float64)
    if np.array_equal(r, np.eye(3)):
        return labels
    return labels.map_directions(lambda d: rotate_direction(r, d))


def apply_channels_first(
    sig: FoaSignal,
    labels: LabelTrack,
    rng: np.random.Generator | None = None,
    *,
    rotation: np.ndarray | None = None,
) -> tuple[FoaSignal, LabelTrack, np.ndarray]:
    """Rotate/reflect the sound field by a random (or injected) orthonormal matrix.

    Returns the new signal, the transformed labels and the matrix used.
    """
    check_span(sig, labels)
    if rotation is None:
        if rng is None:
            raise ValueError("either rng or rotation is required")
        r = random_orthonormal(rng)
    else:
        r = np.array(rotation, dtype=np.float64)
        if r.shape != (3, 3) or not is_orthonormal(r):
            raise ValueError("injected rotation must be a 3x3 orthonormal matrix")
    return apply_matrix(sig, r), transform_labels(r, labels), r
