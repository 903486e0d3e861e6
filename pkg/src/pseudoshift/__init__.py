"""Bilateral weighted pseudo-shifts on the integer lattice, exactly.

The package computes with finitely supported vectors, so every operator
application, norm, and residual is exact up to float rounding: no
truncation of an infinite lattice ever happens.  On top of the operator
algebra sit a witness search for simultaneous approximation by several
shifts at one common time, closed-form decay thresholds for translation
families with two-level weights, a greedy builder of vectors realizing a
whole visitation schedule, and orbit/return-set/density statistics.
Certificates produced anywhere in the package serialize to canonical JSON
and re-verify from scratch.
"""

from .core import (
    InconsistentMapError,
    InducingMap,
    PseudoShift,
    PseudoShiftError,
    SignedLogScalar,
    SupportedVector,
    WeightRule,
    backward_coefficient_log,
    forward_product_log,
    lp_norm_log,
)
from .criterion import (
    CONDITIONS,
    Check,
    CorrectionBounds,
    IndexSets,
    NoWitness,
    TargetFamily,
    VerificationReport,
    WitnessCertificate,
    build_correction,
    correction_bounds,
    find_witness,
    max_cross_ratio,
    verify_certificate,
)
from .family import (
    FamilyParams,
    derived_constants,
    inverse_family,
    make_family,
    threshold_k,
)
from .construct import (
    ScheduleCertificate,
    ScheduleFailure,
    ScheduleStep,
    build_dhc_vector,
    enumerate_targets,
    verify_schedule,
)
from .dynamics import (
    DensityEstimate,
    OrbitMemoryError,
    OrbitRecord,
    orbit,
    orbit_to_csv,
    return_set,
    upper_banach_density,
)
from .jsonio import SchemaError, canonical_dumps, dump_path, format_float, load_path

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # core
    "PseudoShift",
    "InducingMap",
    "WeightRule",
    "SupportedVector",
    "SignedLogScalar",
    "PseudoShiftError",
    "InconsistentMapError",
    "forward_product_log",
    "backward_coefficient_log",
    "lp_norm_log",
    # criterion
    "CONDITIONS",
    "TargetFamily",
    "IndexSets",
    "WitnessCertificate",
    "NoWitness",
    "CorrectionBounds",
    "Check",
    "VerificationReport",
    "build_correction",
    "correction_bounds",
    "find_witness",
    "verify_certificate",
    "max_cross_ratio",
    # family
    "FamilyParams",
    "make_family",
    "inverse_family",
    "derived_constants",
    "threshold_k",
    # construct
    "ScheduleStep",
    "ScheduleCertificate",
    "ScheduleFailure",
    "enumerate_targets",
    "build_dhc_vector",
    "verify_schedule",
    # dynamics
    "OrbitRecord",
    "DensityEstimate",
    "OrbitMemoryError",
    "orbit",
    "return_set",
    "orbit_to_csv",
    "upper_banach_density",
    # serialization
    "SchemaError",
    "canonical_dumps",
    "dump_path",
    "load_path",
    "format_float",
]
