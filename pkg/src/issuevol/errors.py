"""Exception hierarchy.

Everything raised deliberately by the library derives from
:class:`IssueVolError`, which the CLI maps to the input/usage exit code.
"""


class IssueVolError(Exception):
    """Base class for errors caused by bad input or invalid parameters."""


class DegenerateInputError(IssueVolError, ValueError):
    """Input has no usable mass (empty distribution, all-zero shares...)."""


class AlignmentError(IssueVolError, ValueError):
    """Two distributions are not expressed over the same issue support."""


class InfiniteDivergenceError(IssueVolError, ArithmeticError):
    """KL divergence is infinite because the reference has a zero share."""


class IngestError(IssueVolError):
    """Fatal ingestion failure (bad header, nothing accepted)."""


class SeriesError(IssueVolError, ValueError):
    """An attention series transform cannot be applied."""


class VocabularyError(IssueVolError):
    """Vocabulary construction left no usable terms."""


class ModelError(IssueVolError):
    """Topic model cannot be fitted, loaded, or applied."""


class SpecError(IssueVolError, ValueError):
    """A synthetic regime or corpus specification is invalid."""


class ParameterError(IssueVolError, ValueError):
    """A numeric or categorical parameter is outside its valid range."""


class ShareSumError(IngestError, ValueError):
    """Shares sum too far from 1 to be treated as a rounded distribution."""
