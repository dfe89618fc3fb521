"""Exception taxonomy shared across the package.

Each class carries the process exit code used by the command-line front end:
0 success, 2 config/parse, 3 range/model, 4 numerical, 5 scale.
"""


class LdxError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(LdxError):
    """Malformed model file, bad CLI arguments, or inconsistent configuration."""

    exit_code = 2


class ModelError(LdxError):
    """Structurally invalid model data (nonpositive kernel, bad stochastic matrix, ...)."""

    exit_code = 3


class DomainError(ModelError):
    """Evaluation point outside the declared analyticity domain."""


class RangeError(ModelError):
    """Requested target outside the admissible large-deviation range."""


class NumericalError(LdxError):
    """A numerical consistency check failed beyond its tolerance."""

    exit_code = 4


class GapViolation(NumericalError):
    """Two eigenvalues of maximal modulus are numerically indistinguishable."""


class ContinuationError(NumericalError):
    """Eigenvalue continuation along a circle became ambiguous; shrink the radius."""


class DegenerateVariance(NumericalError):
    """Tilted variance is numerically zero (coboundary-like observable)."""


class ScaleError(LdxError):
    """An exact oracle would exceed its configured size guard."""

    exit_code = 5


class LatticeWarning(UserWarning):
    """Input violates the non-lattice hypothesis; expansions are still computed."""
