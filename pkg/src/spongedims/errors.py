"""Exception types shared across the package."""


class SpongeDimsError(Exception):
    """Base class for all package-specific errors."""


class InvalidSpecError(SpongeDimsError):
    """An operation received a sponge spec that fails validation."""


class InvalidRatioError(SpongeDimsError):
    """A contraction ratio lies outside (0, 1]."""


class NoSolutionError(SpongeDimsError):
    """The Moran equation has no root for the given ratio list."""


class InsufficientLengthError(SpongeDimsError):
    """A finite word is too short for the requested shift."""


class WordTooShortError(SpongeDimsError):
    """A word does not supply enough symbols to bracket a scale."""


class ScaleTooLargeError(SpongeDimsError):
    """A scale exceeds the range on which the construction is defined."""


class BudgetExceededError(SpongeDimsError):
    """A geometric construction would exceed the configured box budget."""


class EmptySetError(SpongeDimsError):
    """Hausdorff distance is undefined for empty sets."""


class InsufficientDataError(SpongeDimsError):
    """Not enough table entries to fit a scaling exponent."""


class NoTwistAvailableError(SpongeDimsError):
    """No digit drops its contraction across a cluster boundary.

    Raised only when a cluster structure is inconsistent with the
    contraction map it was derived from; a correctly merged clustering
    always admits a twist digit at every boundary.
    """
