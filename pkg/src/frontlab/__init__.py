"""Online subspace tracking on flag manifolds (FRONT) and Hankel-based prediction."""
from .errors import (
    DegenerateState,
    FrontError,
    InsufficientData,
    InvalidConfig,
    InvalidIndex,
    InvalidInput,
    InvalidSignature,
    NumericalFailure,
)
from .flag import (
    FlagPoint,
    FlagTangent,
    Signature,
    SubspaceBasis,
    canonical_point,
    chordal_distance,
    exp,
    prefix_basis,
    project_tangent,
    random_point,
    random_tangent,
)
from .linalg import RngStream
from .objective import cost, euclidean_gradient, riemannian_gradient
from .tracker import ArmijoParams, FrontTracker, GreatOracle, TrackerConfig

__version__ = "0.1.0"
