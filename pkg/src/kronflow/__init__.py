"""kronflow: exact algebraic invariants of linear torus flows, truncated to
desk scale, plus the numerics that witness their dynamical consequences."""

from .errors import KronError, UnsupportedStructureError, ValidationError
from .exact_linalg import (
    IntVecFin,
    RowFiniteIntMatrix,
    format_rational,
    gcd_of_vector,
    integer_kernel,
    parse_rational,
    rational_gcd,
    unimodular_compose,
)
from .frequency import (
    DEFAULT_DEPTH,
    UNIT,
    FrequencyVector,
    Generator,
    RationalSequenceSpec,
    SigmaSequence,
    SubgroupOfQSpec,
    coordinates,
    evaluate_float,
    parse_frequency_spec,
    pi_power_generator,
    rational_vector,
    solenoid_vector,
    sqrt_prime_generator,
    truncate,
)
from .classification import (
    BaerType,
    ClosureDescriptor,
    ModuleDescriptor,
    SupernaturalNumber,
    baer_isomorphic,
    baer_to_qa,
    build_frequency_from_groups,
    classification_report,
    closures_homeomorphic,
    decompose_module,
    free_baer_type,
    is_free,
    module_rank,
    orbit_closure,
    qa_to_baer,
)
from .resonance_reduction import (
    FlowReduction,
    ReductionCertificate,
    ResonanceBasis,
    apply_automorphism,
    reduce_flow,
    reduce_vector,
    resonance_basis,
)
from .solenoid_geometry import (
    GeometricWeights,
    SolenoidCoords,
    TorusPoint,
    approximating_times,
    from_coordinates,
    is_member,
    local_chart,
    orbit_point,
    product_metric,
    to_coordinates,
)
from .dynamics import (
    TrigPolynomial,
    equidistribution_report,
    flow,
    haar_average,
    minimality_probe,
    resonance_witness,
    time_average,
)
from .benjamin_ono import (
    BoActionSpec,
    BoModuleReport,
    bo_frequencies,
    bo_orbit_closure,
    bo_tail_module,
)

__version__ = "0.1.0"
