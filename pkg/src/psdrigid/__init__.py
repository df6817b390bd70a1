"""Rigidity and uniqueness analysis of size-2 psd factorizations."""

from .classify import (
    BoundaryReport,
    PreconditionError,
    RigidityReport,
    boundary_report,
    classify,
    triple_search,
    uniqueness,
)
from .factorization import (
    PsdFactorization,
    RankOneProfile,
    factorization_from_dict,
    factorization_to_dict,
    from_vectors,
    generate_rank_one,
    gl_act,
    rank_one_profile,
    reconstruct,
    validate,
)
from .motions import MotionMatrix, MotionSpace, is_s_inf_motion
from .oracle import OracleVerdict, kernel_crosscheck, sample_motion_oracle, \
    verify_trivial_only
from .symcore import EPS_DEFAULT, SymMat

__version__ = "0.1.0"

__all__ = [
    "BoundaryReport",
    "EPS_DEFAULT",
    "MotionMatrix",
    "MotionSpace",
    "OracleVerdict",
    "PreconditionError",
    "PsdFactorization",
    "RankOneProfile",
    "RigidityReport",
    "SymMat",
    "boundary_report",
    "classify",
    "factorization_from_dict",
    "factorization_to_dict",
    "from_vectors",
    "generate_rank_one",
    "gl_act",
    "is_s_inf_motion",
    "kernel_crosscheck",
    "rank_one_profile",
    "reconstruct",
    "sample_motion_oracle",
    "triple_search",
    "uniqueness",
    "validate",
    "verify_trivial_only",
]
