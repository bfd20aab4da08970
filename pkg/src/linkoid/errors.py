"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations

__all__ = [
    "LinkoidError",
    "InvalidDiagram",
    "ParseError",
    "ClosedComponent",
    "TooLarge",
    "SizeMismatch",
    "NoExcisableArc",
    "MultiComponent",
    "EmptyList",
    "UnsupportedSelector",
    "IrregularProjection",
    "SamplingFailure",
    "InvalidInvolution",
]


class LinkoidError(Exception):
    """Base class for all errors raised by this package."""


class InvalidDiagram(LinkoidError):
    """A diagram failed validation.

    Attributes:
        violations: The list of violated invariants reported by ``validate``.
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid diagram")


class ParseError(LinkoidError):
    """A diagram or curve file could not be parsed.

    Attributes:
        locus: The JSON field (or ``line N``) at which parsing failed.
    """

    def __init__(self, locus: str, message: str = ""):
        self.locus = locus
        self.message = message
        super().__init__(f"{locus}: {message}" if message else locus)


class ClosedComponent(LinkoidError):
    """An operation that needs open strands met a closed one."""


class TooLarge(LinkoidError):
    """A size guard refused an input (exponential or factorial blow-up)."""


class SizeMismatch(LinkoidError):
    """Two objects that must act on the same label set do not."""


class NoExcisableArc(LinkoidError):
    """A virtual crossing cannot be isolated on an arc free of classical crossings."""


class MultiComponent(LinkoidError):
    """An invariant defined for one-component closures met several components."""


class EmptyList(LinkoidError):
    """An average was requested over an empty collection."""


class UnsupportedSelector(LinkoidError):
    """An invariant selector is not valid for the requested operation."""


class IrregularProjection(LinkoidError):
    """A projection direction produced a non-generic diagram.

    Attributes:
        feature: Short name of the failing feature, e.g. ``"close crossings"``.
    """

    def __init__(self, feature: str, detail: str = ""):
        self.feature = feature
        super().__init__(f"{feature}: {detail}" if detail else feature)


class SamplingFailure(LinkoidError):
    """Monte Carlo sampling exhausted its retry budget on irregular directions."""


class InvalidInvolution(LinkoidError, ValueError):
    """A permutation is not a fixed-point-free involution on ``{1..2n}``."""
