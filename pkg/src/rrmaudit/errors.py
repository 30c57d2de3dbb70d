"""Semantic exception hierarchy.

Public functions never raise bare ValueError; every contract violation maps
to one of the classes below so callers can distinguish usage errors from
runtime failures (the CLI maps them to exit codes 2 and 1 respectively).
"""


class RRMError(Exception):
    """Base class for all errors raised by this package."""


class ContractViolationError(RRMError, ValueError):
    """An argument violates a documented precondition."""


class NTrainUndefinedError(RRMError):
    """NTrain(eta) requested but no corrupted sample occurred in any trial."""


class SingularSystemError(RRMError):
    """Unregularized least squares hit a rank-deficient Gram matrix."""

    def __init__(self, rank: int, size: int):
        self.rank = rank
        self.size = size
        super().__init__(
            f"Gram matrix is singular at lambda=0: rank {rank} < size {size}; "
            "use a positive regularization weight"
        )


class InsufficientTrialsError(RRMError):
    """An estimator needs more noisy repetitions than were provided."""


class EnumerationLimitError(RRMError):
    """Exact scenario exceeds the enumerable noise-pattern budget."""


class TrainerFailureError(RRMError):
    """A trainer raised during a noisy trial; carries the trial index."""

    def __init__(self, trial_index: int, cause: BaseException):
        self.trial_index = trial_index
        super().__init__(f"trainer failed in trial {trial_index}: {cause!r}")


class EmbeddingFormatError(RRMError):
    """Malformed embedding file; message names the offending byte offset."""


class ReportFormatError(RRMError):
    """Malformed or incomplete audit report file."""


class IndependenceError(RRMError):
    """A joint distribution violates a required independence precondition."""
