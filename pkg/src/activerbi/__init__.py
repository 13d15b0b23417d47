"""Active recursive Bayesian inference with Renyi-entropy query selection."""

from .probability import (
    PROB_FLOOR,
    InvalidAlphaError,
    InvalidDistributionError,
    SupportMismatchError,
    argmax_state,
    as_distribution,
    floor_normalize,
    renyi_divergence,
    renyi_entropy,
)
from .inference import (
    EvidenceModel,
    History,
    SequenceRecord,
    evidence_likelihood,
    evidence_marginal,
    map_estimate,
    one_hot_likelihood,
    posterior_update,
)
from .objectives import (
    PolicyConfig,
    QuadratureSpec,
    StoppingConfig,
    anneal_lambda,
    conditional_renyi_entropy,
    greedy_batch_select,
    i_momentum,
    q_momentum,
    shannon_conditional_entropy,
    stopping_value,
    unified_query_score,
)
from .geometry import (
    BoundarySpec,
    boundary_points,
    collinearity_residual,
    entropy_gap,
    feasible,
    find_tilde_tau,
    tau_double_prime,
)
from .harness import (
    ExperimentSummary,
    ScenarioConfig,
    TrialResult,
    make_prior,
    prop1_harness,
    prop1_proof_step_check,
    run_experiment,
    run_trial,
    sample_evidence,
    sweep,
)
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"
