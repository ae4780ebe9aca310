"""Lift expectations of random convex bodies."""

from .bodies import (
    Ball,
    Ellipsoid,
    Interval,
    MinkowskiCombo,
    Polytope,
    ScaledL1Ball,
    Segment,
    Singleton,
    support,
    support_point,
)
from .errors import AlgorithmError, LiftError, ReconstructionError, ValidationError
from .identify import (
    FiniteSupportDist,
    MarginalOracle,
    ReconstructionResult,
    is_comonotonic_endpoints,
    marginal_oracle,
    reconstruct_comonotonic,
    reconstruct_continuation,
    reconstruct_distinct_probs,
)
from .lift import (
    BodySample,
    Polygon2D,
    StopLossCurve,
    avar_interval,
    expectation_support,
    gini_area,
    hoeffding_support,
    is_outlier,
    lift_support,
    polygon_1d,
    slice_support,
    stop_loss_curve,
    trimmed_region_support,
)
from .order import (
    DirectionGrid,
    convexity_gap,
    icx_dominates,
    lift_included,
    mix_samples,
    same_lift,
)
from .tuples import (
    CoupledTupleSample,
    VectorSample,
    cascos_projections,
    lift_zonoid_support,
    self_tuple_distinguishes,
    tuple_lift_support,
    zonoid_support,
)

__version__ = "0.1.0"
