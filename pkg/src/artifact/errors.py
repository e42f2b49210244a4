"""Error types shared across the package.

Every failure mode that callers are expected to handle gets its own class so
that tests and the CLI can catch precisely what they mean to catch.  All of
them derive from :class:`ArtifactError`.
"""


class ArtifactError(Exception):
    """Base class for all package-specific errors."""


class NonDivisible(ArtifactError):
    """Exact polynomial division was requested but the remainder is nonzero."""


class NonCoprimeDenominator(ArtifactError):
    """A fractional exponent denominator is not invertible modulo the order."""


class NonCoprime(ArtifactError):
    """An evaluation requires two integers to be coprime and they are not."""


class PoleHit(ArtifactError):
    """A denominator vanished at the requested specialization point."""


class UnresolvedLimit(ArtifactError):
    """A symbolic limit token appeared in a position with no rewrite rule."""


class NotQHS(ArtifactError):
    """The surgery data describes a manifold with infinite first homology."""


class TruncationTooSmall(ArtifactError):
    """A truncated element does not carry enough terms for the request."""


class UndefinedAtOrder(ArtifactError):
    """The requested quantity is not defined at this order."""


class ParseError(ArtifactError):
    """A textual description could not be parsed."""


class ValidationError(ArtifactError):
    """Parsed or constructed data violates a structural constraint."""
