"""Exception types shared across the package.

Every hard failure raised by this package derives from ``SolitonError`` so
callers (and the CLI) can distinguish our diagnostics from generic Python
errors.  Domain problems (a sample point leaving the region where a family
is defined, degenerate initial data) get their own branch because the CLI
maps them to a dedicated exit code.
"""


class SolitonError(Exception):
    """Base class for all errors raised by this package."""


class DomainViolation(SolitonError):
    """Base for errors caused by evaluating outside a valid region."""


class DomainTooSmall(DomainViolation):
    """A finite-difference stencil does not fit inside the declared domain."""


class OutOfDomain(DomainViolation):
    """A sample point lies outside the region where the family is defined."""


class OutOfTrustRegion(DomainViolation):
    """A truncated series was evaluated beyond its trusted radius."""


class DegenerateInitialData(DomainViolation):
    """Initial data for the singular solver fails the positivity conditions."""


class NonFinite(SolitonError):
    """A field evaluation returned NaN or infinity."""


class SingularMetric(SolitonError):
    """A metric sample is singular or too ill-conditioned to invert."""


class InvalidParam(SolitonError):
    """A family was requested with parameters outside its admissible set."""


class IrrationalInput(SolitonError):
    """An eigenvalue list contained a float with no small exact rational form."""


class NonPositiveEigenvalue(SolitonError):
    """An operation that needs strictly positive eigenvalues got one <= 0."""


class ShapeMismatch(SolitonError):
    """Vector/eigenvalue lengths disagree."""


class DimensionTooLarge(SolitonError):
    """The dense series backend only supports a small number of variables."""


class NonConvergent(SolitonError):
    """An iteration failed to converge within its budget."""


class ConstraintViolation(SolitonError):
    """A claimed symmetry does not satisfy its defining constraints."""


class NotPositiveDefinite(UserWarning):
    """Advisory warning: a computed metric sample is not positive definite.

    This is a warning rather than an error because finite-difference noise can
    push a marginal sample past zero, and downstream checks are expected to
    make their own pass/fail call.
    """
