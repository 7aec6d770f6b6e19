"""Exception types shared across the harness."""


class SemscoreError(Exception):
    """Base class for all harness errors."""


class UnknownPut(SemscoreError):
    """Requested program id is not in the registry."""


class DomainViolation(SemscoreError):
    """Input lies outside the program's declared input domain."""


class NonFiniteOutput(SemscoreError):
    """An unmutated kernel produced NaN/inf; this is a kernel bug."""


class NotTrajectoryCapable(SemscoreError):
    """Trajectory output requested from a scalar-only program."""


class NotDeterministicClass(SemscoreError):
    """Syntactic mutants are only defined for the deterministic numeric programs."""


class UnknownMetaPattern(SemscoreError):
    """A relation reached a verifier that has no method for its pattern."""


class EmptySequence(SemscoreError):
    """DTW requires two nonempty sequences."""


class DegenerateSample(SemscoreError):
    """All paired differences were zero; the signed-rank test carries no signal."""


class NonPositiveError(SemscoreError):
    """Convergence-order estimation needs strictly positive error values."""


class IrregularRefinement(SemscoreError):
    """Step sizes must decrease by a constant factor."""


class AllEquivalent(SemscoreError):
    """Every mutant in the cell was judged equivalent; the score is undefined."""


class EmptySample(SemscoreError):
    """A statistic was requested on an empty sample."""


class ZeroMean(SemscoreError):
    """Coefficient of variation is undefined at zero mean."""


class DegenerateMatrix(SemscoreError):
    """Rank tests need at least two columns."""


class LengthMismatch(SemscoreError):
    """Paired rank correlation needs equal-length samples."""


class UnreachableTarget(SemscoreError):
    """Stipulated effect-size target is not above the observed effect."""


class IncompleteInput(SemscoreError):
    """Hypothesis evaluation needs a complete campaign, annotations and stats."""


class MissingEvidence(SemscoreError):
    """Root-cause diagnosis was called without the evidence it needs."""


class NoKills(SemscoreError):
    """Share computation on a cell that killed nothing."""


class ConfigIncomplete(SemscoreError):
    """The degenerate-limit configuration must set all six axes together."""


class MismatchDetected(SemscoreError):
    """Degeneration check failed: the semantic score differs from the classic score."""


class TrivialisationViolated(SemscoreError):
    """A degenerate-limit run produced a non-C1 root-cause label."""


class ConfigInvalid(SemscoreError):
    """Campaign configuration failed validation."""


class ResultsMissing(SemscoreError):
    """A command was pointed at a directory without the expected result files."""
