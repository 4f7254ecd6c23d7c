"""Exception hierarchy shared by every module of the package."""


class AlphamodError(Exception):
    """Base class for all package errors."""


class DomainError(AlphamodError, ValueError):
    """An exponent or parameter lies outside the range a statement covers."""


class ConfigError(AlphamodError, ValueError):
    """A configuration is inconsistent with the grid or covering it targets."""


class GridOverflowError(AlphamodError, ValueError):
    """A synthesized function escapes the periodic domain or its band."""


class CoveringGapError(AlphamodError, ValueError):
    """The requested covering constants leave part of the band uncovered."""


class IndexOutOfCovering(AlphamodError, IndexError):
    """A block index exceeds the truncation of the covering."""


class ShellOutOfCovering(AlphamodError, ValueError):
    """A dyadic shell reaches beyond the covered band."""


class InsufficientCovering(AlphamodError, ValueError):
    """A function carries spectral energy outside the covered band."""


class KernelMeanZero(AlphamodError, ValueError):
    """A maximal-function kernel has vanishing integral."""


class DegenerateAtom(AlphamodError, ValueError):
    """Moment removal annihilated the random bump of an atom."""


class CoveringMismatch(AlphamodError, ValueError):
    """An alpha-bump spectrum straddles more than one window."""


class DegenerateFit(AlphamodError, ValueError):
    """A log-log fit received too few points or a zero value."""
