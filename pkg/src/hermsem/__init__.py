"""Numerics for semimartingales with values in the dual of the Hermite model
of the Schwartz space: simulation, Riemann-sum stochastic integration,
UCP/Emery metric estimation, and term-by-term verification of the
distribution-valued Ito formula."""

from .basis import (
    Distribution,
    HermiteBasis,
    TestFunction,
    analyze,
    basis_vector,
    differentiate,
    dual_basis_vector,
    dual_seminorm,
    eval_hermite,
    pair,
    position_multiply,
    seminorm,
    shift,
    shift_many,
)
from .diagnostics import (
    ProbeCase,
    ProbeReport,
    continuity_probe,
    linearity_probe,
    localization_probe,
    standard_probe_preset,
    stopping_probe,
    truncate_elementary,
)
from .dirac_ito import (
    ConvolvedDiracSemimartingale,
    DiracSemimartingale,
    ItoTerms,
    conv_matrix,
    conv_pair,
    conv_pair_many,
    dirac_pair,
    ito_residual,
    ito_terms,
    ito_terms_distribution,
)
from .metrics import (
    IntegrandDictionary,
    ProcessEnsemble,
    d_ucp_estimate,
    r_em_estimate,
    r_ucp_estimate,
    ucp_dual_estimate,
    ucp_dual_metric,
    ucp_tail_bound,
)
from .paths import (
    CadlagPath,
    ContractError,
    HistoryView,
    RandomPartition,
    SemimartingaleSpec,
    bracket_continuous,
    dyadic_partition,
    first_passage_time,
    hitting_partition,
    jump_refined_partition,
    make_partition,
    quadratic_variation,
    simulate,
    simulate_ensemble,
    stop_path,
)
from .scalar_integral import (
    CylindricalSemimartingale,
    ElementaryScalarIntegrand,
    ElementaryTestFnIntegrand,
    constant_one,
    h_dot_z,
    integrate_elementary,
    riemann_scalar,
)
from .trajectory import ScalarTrajectory
from .vector_integral import (
    DistributionPath,
    LocalizedIntegrand,
    TensorIntegrand,
    dual_apply,
    integrate_then_integrate,
    localize_integrate,
    riemann_vector,
    vector_integrate,
)

__version__ = "0.1.0"
