"""Label-noise auditing of frozen-representation classifiers.

Measure a training pipeline's generalization gap, decompose it into
robustness, rationality, and memorization components via noisy retraining
experiments, bound the memorization component with plug-in information
estimates, and certify every inequality exactly on small instances through
the enumeration oracle.
"""

from .bounds import (
    ErmRobustnessResult,
    RetentionRow,
    Thm2Bound,
    audit,
    erm_robustness_check,
    least_squares_robustness_check,
    thm2_bound,
)
from .datagen import SynthSpec, augment, gaussian_clusters, margin_fixture, synth, trivial_rep_fixture
from .datasets import (
    AccuracyQuad,
    DenominatorMode,
    GapDecomposition,
    GapReport,
    LabeledEmbeddings,
    NoiseKind,
    TrialSummary,
    accuracy,
    assemble_gaps,
)
from .errors import (
    ContractViolationError,
    EmbeddingFormatError,
    EnumerationLimitError,
    IndependenceError,
    InsufficientTrialsError,
    NTrainUndefinedError,
    ReportFormatError,
    RRMError,
    SingularSystemError,
    TrainerFailureError,
)
from .fileio import (
    read_embeddings,
    read_embeddings_csv,
    read_report,
    write_embeddings,
    write_embeddings_csv,
    write_report,
)
from .infotheory import (
    ComplexityEstimate,
    Estimator,
    JointHistogram,
    cdc_estimate,
    cpc_estimate,
    entropy,
    mi_superadditivity_check,
    mutual_information,
    mutual_information_probs,
    pinsker_gap_bound,
)
from .noise import (
    NoiseModel,
    NoisyTrial,
    corrupt_labels,
    noisy_accuracies,
    run_clean,
    run_noisy_trials,
)
from .oracle import (
    CertificationResult,
    ExactQuantities,
    ExactScenario,
    OracleTrainer,
    certify_chain,
    constant_rule,
    enumerate_scenario,
    interpolating_rule,
    majority_rule,
    oracle_trainer_handle,
    pinsker_grid_certification,
    random_scenario,
    superadditivity_certification,
    threshold_rule,
)
from .rationality import PotlConfig, PotlResult, potl_experiment, procedure_s_predict
from .rng import substream
from .trainers import (
    FiniteHypothesisClass,
    LinearClassifier,
    MarginProfile,
    RidgeConfig,
    constant_trainer,
    erm_fit,
    erm_trainer,
    interpolating_trainer,
    margin_profile,
    membership_gated_trainer,
    ridge_fit,
    ridge_trainer,
    threshold_hypotheses,
)

__version__ = "0.1.0"
