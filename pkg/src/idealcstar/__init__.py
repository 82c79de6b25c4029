"""Workbench for ideal completions of group algebras.

Group models with exact word arithmetic, positive-definite function
certification, truncated GNS representations, completion-norm estimates,
quantum-group coproduct checks, and finite transformation groupoids.
"""

from ._speed import BACKEND as kernel_backend
from .completions import (
    ConvolutionOperator,
    EqualityCertificate,
    GroupRingElement,
    NormEstimate,
    TensorSquareElement,
    coassociativity_defect,
    coproduct,
    coproduct_checks,
    coproduct_density_rank,
    equality_certificate,
    gns_norm_lower,
    haagerup_upper_bound,
    hom_pushforward,
    kesten_exact,
    norm_gap_report,
    powered_haagerup_upper,
    reduced_norm_lower,
    reduced_norm_upper,
    schur_multiply,
    state_compose,
    trivial_norm,
)
from .dynamics import (
    ActionCertificate,
    Cocycle,
    ConvAlgebraElement,
    CovariantRep,
    FiniteSystem,
    GroupoidFunction,
    action_certificate,
    covariant_rep,
    dn_report,
    envelopes,
    groupoid_pd_check,
    groupoid_schur_multiply,
    lift,
    radon_nikodym,
    spectral_gap,
    state_kernel,
    state_schur_kernel,
    sup_norm_profile,
)
from .errors import (
    BudgetExceededError,
    CertificateInconsistencyError,
    GramIndefiniteError,
    HermitianStructureError,
    IdealCstarError,
    InvalidHomomorphismError,
    ModelMismatchError,
    PreconditionError,
    UnsupportedModelError,
)
from .functions import (
    BoundedBelow,
    CallableFunction,
    ExpDecay,
    FiniteSupport,
    FolnerFunction,
    GroupFunction,
    IdealSpec,
    LpNormResult,
    Membership,
    RadialFunction,
    SphereSupSequence,
    TableFunction,
    adjoint_convolve,
    cnd_window_check,
    constant_one,
    delta_e,
    folner,
    folner_ball,
    folner_box,
    haagerup,
    ideal_membership,
    lp_norm,
    make_family,
    pd_window_check,
    power,
    product,
    schoenberg,
    translate_left,
    translate_right,
    word_length_function,
)
from .groups import (
    Ball,
    FiniteCyclicModel,
    FreeAbelianModel,
    FreeModel,
    GroupElement,
    GroupModel,
    InfiniteDihedralModel,
    ball,
    compose,
    growth_check,
    model_from_name,
    word_length,
)
from .reps import (
    FiniteUnitaryRep,
    GnsWindow,
    MatrixCoefficientFunction,
    direct_sum,
    gns_window,
    matrix_coefficient,
    random_pd,
    random_rep,
    tensor,
)

__version__ = "0.1.0"
