"""Reorder and interpolate unordered samples of curves on S^2, SE(2), SE(3)
and scaled planar motions."""
from .errors import (
    AntipodalRotation,
    AreaOutOfRange,
    BranchingTree,
    DegeneratePolygon,
    DuplicatePoints,
    EmptySample,
    GeoordError,
    MissingMask,
    NoConvergence,
    NonManifoldOutput,
    RadiusMismatch,
    StartRequired,
    TooFewNodes,
)
from .liegroup import (
    MetricWeights,
    PlanarMotion,
    RigidMotion3,
    ScaledPlanarMotion,
    Twist,
    dist_scaled_se2,
    dist_se2,
    dist_se3,
    exp_se3,
    exp_so3,
    geodesic_se2,
    geodesic_se3,
    log_se3,
    log_so3,
)
from .manifold import SpherePoint, SurfaceParamPoint, bilinear_geodesic_bvp, sphere_dist
from .sampling import SampleSet, check_uniform_sample, epsilon_bound
from .reconstruct import build_graph, extract_path, mst, order_mst, order_nn, order_nncrust_r3
from .interpolate import (
    BoundaryData,
    MotionCurve,
    interpolate_decasteljau,
    interpolate_geodesic,
    interpolate_partial_geodesic,
)
from .frames import FrameRecord, Mask, order_frames

__version__ = "0.1.0"
