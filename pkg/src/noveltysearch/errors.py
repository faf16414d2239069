"""Exception hierarchy shared by all pipeline stages."""


class PipelineError(Exception):
    """Base class for every error this package raises on bad input or state."""


class CorpusError(PipelineError):
    """Invalid patent record, duplicate id, or impossible group assignment."""


class SliceError(PipelineError):
    """Invalid slicing configuration or unsliceable description."""


class PairError(PipelineError):
    """Pair construction or assembly violated a contract."""


class ClassifierError(PipelineError):
    """Classification failed before any transport took place."""


class TransportError(ClassifierError):
    """The remote backend could not be reached or kept failing after retry.

    Carries the pair ids that remain unscored, and any results that were
    completed before the failure (never silently dropped).
    """

    def __init__(self, message, pair_ids=(), partial_results=()):
        super().__init__(message)
        self.pair_ids = list(pair_ids)
        self.partial_results = list(partial_results)


class ProtocolError(ClassifierError):
    """The remote backend answered, but not in the agreed wire format."""


class ScoringError(PipelineError):
    """Results could not be joined to piece provenance."""


class SearchError(PipelineError):
    """A search could not produce a complete ranking.

    ``unscored_pair_ids`` names every query pair without a result;
    ``partial_audit`` holds the per-piece rows that were completed.
    """

    def __init__(self, message, unscored_pair_ids=(), partial_audit=()):
        super().__init__(message)
        self.unscored_pair_ids = list(unscored_pair_ids)
        self.partial_audit = list(partial_audit)


class EvaluationError(PipelineError):
    """An evaluation input did not satisfy its preconditions."""


class ConfigError(PipelineError):
    """Pipeline configuration file or flags failed validation."""
