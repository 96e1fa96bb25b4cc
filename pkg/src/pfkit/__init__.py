"""Exact convergence diagnostics for measure-preserving dynamics.

The core objects are finite probability spaces with rational atom masses,
measure-preserving self-maps on them, and the induced transfer operator.
Everything on the finite side is computed in exact rational arithmetic;
the dyadic doubling model extends the same diagnostics to an infinite
exact system, and the Ulam layer provides float discretizations.
"""

from .audit import (
    AuditFailure,
    AuditReport,
    SplitMix64,
    SystemGenerator,
    positive_permutation_form,
    run_audit,
)
from .dyadic import (
    DyadicSet,
    DyadicStepFunction,
    doubling_image,
    doubling_preimage,
    exactness_profile,
    image_defect,
    image_measure_limit as dyadic_image_measure_limit,
    image_measure_profile,
    trace_defect,
    transfer_apply,
    transition_matrix,
)
from .dynamics import (
    MeasurePreservingMap,
    OrbitReport,
    SigmaSubAlgebra,
    check_measure_preserving,
    completion_mod_null,
    completions_equal,
    invariant_algebra,
    invariant_version,
    minimal_invariant_superset,
    preimage_algebra,
    set_orbit,
    tail_algebra,
)
from .errors import (
    BadBinCountError,
    DiagnosticInconsistencyError,
    DyadicValueError,
    NegativeDensityError,
    NonStochasticRowError,
    NotMeasurePreservingError,
    NullTraceError,
    ParseError,
    PeriodDetectionError,
    PfkitError,
    SpaceMismatchError,
)
from .fixtures import (
    identity_system,
    single_atom_with_nulls,
    three_point_system,
    two_atom_swap,
)
from .mixing import (
    MixingProfile,
    classify,
    image_measure_limit,
    image_mixing_defect,
    is_ergodic,
    is_exact,
    is_mixing,
    limit_vanishes,
    lower_bound_defect,
    lower_bound_witness,
    trace_mixing_defect,
    uniform_mixing_defect,
)
from .operators import (
    LimitReport,
    MarkovMatrix,
    apply_power,
    cesaro_limit,
    conditional_expectation,
    density_power_sequence,
    density_support,
    fixed_space_dimension,
    identity_matrix,
    koopman_operator,
    power_sequence,
    rank_one_projection,
    transfer_operator,
)
from .space import (
    Density,
    FiniteProbabilitySpace,
    MeasurableSet,
    MeasureAlgebraClass,
    algebra_distance,
    class_distance,
    class_of,
    constant_density,
    indicator,
    inner,
)
from .systemio import (
    bundled_example,
    format_fraction,
    input_digest,
    load_system,
    parse_fraction,
    save_system,
    system_from_dict,
    system_to_dict,
)
from .ulam import UlamModel, dense_exact_matrix, mixing_profile, ulam_assemble

__version__ = "0.1.0"

__all__ = [
    "AuditFailure",
    "AuditReport",
    "BadBinCountError",
    "Density",
    "DiagnosticInconsistencyError",
    "DyadicSet",
    "DyadicStepFunction",
    "DyadicValueError",
    "FiniteProbabilitySpace",
    "LimitReport",
    "MarkovMatrix",
    "MeasurableSet",
    "MeasureAlgebraClass",
    "MeasurePreservingMap",
    "MixingProfile",
    "NegativeDensityError",
    "NonStochasticRowError",
    "NotMeasurePreservingError",
    "NullTraceError",
    "OrbitReport",
    "ParseError",
    "PeriodDetectionError",
    "PfkitError",
    "SigmaSubAlgebra",
    "SpaceMismatchError",
    "SplitMix64",
    "SystemGenerator",
    "UlamModel",
    "algebra_distance",
    "apply_power",
    "bundled_example",
    "cesaro_limit",
    "check_measure_preserving",
    "class_distance",
    "class_of",
    "classify",
    "completion_mod_null",
    "completions_equal",
    "conditional_expectation",
    "constant_density",
    "dense_exact_matrix",
    "density_power_sequence",
    "density_support",
    "doubling_image",
    "doubling_preimage",
    "dyadic_image_measure_limit",
    "exactness_profile",
    "fixed_space_dimension",
    "format_fraction",
    "identity_matrix",
    "identity_system",
    "image_defect",
    "image_measure_limit",
    "image_measure_profile",
    "image_mixing_defect",
    "indicator",
    "inner",
    "input_digest",
    "invariant_algebra",
    "invariant_version",
    "is_ergodic",
    "is_exact",
    "is_mixing",
    "koopman_operator",
    "limit_vanishes",
    "load_system",
    "lower_bound_defect",
    "lower_bound_witness",
    "minimal_invariant_superset",
    "mixing_profile",
    "parse_fraction",
    "positive_permutation_form",
    "power_sequence",
    "preimage_algebra",
    "rank_one_projection",
    "run_audit",
    "save_system",
    "set_orbit",
    "single_atom_with_nulls",
    "system_from_dict",
    "system_to_dict",
    "tail_algebra",
    "three_point_system",
    "trace_defect",
    "trace_mixing_defect",
    "transfer_apply",
    "transfer_operator",
    "transition_matrix",
    "two_atom_swap",
    "ulam_assemble",
    "uniform_mixing_defect",
]
