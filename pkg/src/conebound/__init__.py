"""Smooth-cone geometry and global error-bound certification."""

__version__ = "0.1.0"

from .cones import (
    ConeSpec,
    Kind,
    Membership,
    NormalRay,
    PointClass,
    PolarCone,
    circular,
    classify_point,
    cone_from_json,
    cone_to_json,
    distance,
    margin,
    margin_gradient,
    moreau_decompose,
    normal_ray,
    orthant2,
    p_cone,
    polar,
    project,
    second_order,
    strict_convexity_probe,
)
from .subspaces import (
    AffineInclusion,
    SubspaceBasis,
    contains_vector,
    image_basis,
    kernel_adjoint_basis,
    span_shift_invariance_check,
)
from .classify import (
    Acq,
    Case,
    Classification,
    ClassifyOpts,
    Geb,
    Trichotomy,
    TrichotomyClass,
    affine_interior_test,
    ball_concave_max,
    classify_geb,
    trichotomy,
)
from .certify import (
    AllSamplesFeasible,
    CertifyReport,
    InfeasibleProblem,
    ProjectionResult,
    SolveOpts,
    TauEstimate,
    VerdictHint,
    convex_lower_bound_distance,
    modulus_estimate,
    project_onto_solution_set,
    residual,
    tau_estimate,
)
from .example51 import Example51Report, example51_suite
