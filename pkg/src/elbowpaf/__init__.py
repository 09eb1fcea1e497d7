"""Elbow-angle estimation from confidence maps and part affinity fields.

Post-network pipeline: render or load confidence maps and limb fields,
decode one person's shoulder/elbow/wrist, compute the elbow angle, then
synchronize against a second angle stream and score the disagreement.
"""
__version__ = "0.1.0"

from .core import (
    ARM,
    DegenerateJointError,
    DegenerateLimbError,
    DomainError,
    ElbowPafError,
    Joint,
    LimbTopology,
    MaskGrid,
    ParameterError,
    Point2,
    ScalarGrid,
    Skeleton,
    VectorGrid,
    sample_bilinear,
)
from .decode import (
    PartCandidate,
    assemble_person,
    association_score,
    decode_frame,
    find_peaks,
    refine_subpixel,
    select_person_candidates,
)
from .kernels import BACKEND
from .kinematics import AngleStream, TimedSample, angles_from_skeletons, elbow_angle
from .mapgen import (
    RenderParams,
    confidence_loss,
    paf_loss,
    render_confidence_map,
    render_paf,
    render_skeleton,
    total_loss,
)
from .syncmetrics import ErrorReport, SyncRow, error_histogram, median_rmse, rmse, synchronize
