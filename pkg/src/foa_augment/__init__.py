"""FOA-domain spatial augmentation: joint rotations/reflections of First-Order
Ambisonics channels and their direction-of-arrival labels."""
from .channels_first import apply_channels_first, gram_schmidt, random_orthonormal, transform_labels
from .core import (
    CartesianDir,
    Direction,
    FoaSignal,
    LabelEntry,
    LabelTrack,
    SteeringVector,
    angular_distance,
    steering_vector,
    to_cartesian,
    to_spherical,
    wrap_azimuth,
)
from .doa import FrameEstimate, doa_error, estimate_doa, frame_recall
from .labels_first import (
    ElevationMode,
    ElevationRangePolicy,
    LabelsFirstDraw,
    apply_labels_first,
    azimuth_rotation_matrix,
    elevation_axis,
    rodrigues_rotate,
    select_beta,
)
from .patterns import ALL_PATTERNS, PatternId, apply_pattern, pattern_channel_matrix, pattern_label_map
from .scene import SourceTrack, encode_scene, gen_test_source

__version__ = "0.1.0"
