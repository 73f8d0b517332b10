"""Base norms and order-unit norms on sections of the PSD cone, applied to
discrimination and decision problems for quantum states, channels and
networks."""

__version__ = "0.1.0"

from .choi import (
    ChoiMatrix,
    KrausMap,
    apply_choi,
    apply_choi_tensor_id,
    choi_of_kraus,
    is_channel_choi,
    kraus_channel,
    max_entangled_projection,
    max_entangled_state,
    max_entangled_vector,
)
from .decisions import (
    Certificate,
    DecisionProblem,
    Experiment,
    GeneralizedPOVM,
    PayoffResult,
    bayes_error,
    build_xi,
    certify_optimal,
    choi_to_povm,
    classical_problem,
    decompose_povm,
    helstrom,
    max_entangled_tester_exists,
    max_payoff,
    multi_hypothesis_error,
    povm_to_choi,
    quantum_problem,
)
from .errors import (
    DomainError,
    EmptySectionError,
    GnormError,
    NumericalError,
    ShapeError,
    SolverError,
    ValidationError,
)
from .hermitian import (
    HermitianMatrix,
    Spectrum,
    abs_pos_neg,
    diag,
    eig,
    herm,
    hvec,
    hunvec_matrix,
    identity,
    matrix_from_json,
    matrix_to_json,
    op_norm,
    outer,
    partial_trace,
    pinv_sqrt,
    psd_check,
    sqrt_psd,
    support_projection,
    tensor,
    trace,
    trace_norm,
    trace_pair,
    transpose_in_basis,
    zeros,
)
from .norms import (
    ExtremalCertificate,
    NormResult,
    base_norm,
    base_norm_psd,
    base_norm_singleton,
    certify_extremal_psd,
    diamond_norm,
    dmax,
    dual_base_norm,
    hmin,
    ncomb_norm,
    order_unit_norm_singleton,
)
from .oracles import SampleSet, grid_hmin, norm_lower_bound, norm_upper_bound, sample_section
from .sections import (
    DualSectionView,
    Section,
    channels_section,
    comb_section,
    contains,
    custom_section,
    dual_section,
    dual_view,
    full_slice_section,
    generalized_section,
    id_tensor_section,
    interior_element,
    povm_section,
    section_from_descriptor,
    section_to_descriptor,
    singleton_section,
    states_section,
    transpose_section,
)
from .solver import Block, ConeProgram, ConeSolution, dump_program, project_psd, solve
