"""Exception hierarchy shared by every module.

The CLI maps these onto its exit-code contract: input problems exit 2,
violated mathematical preconditions exit 3, exhausted budgets and schedules
exit 4, and a certificate that parses but fails re-verification exits 5.
"""

from __future__ import annotations


class Error(Exception):
    """Base class for all package errors."""


class InputError(Error):
    """Malformed or invalid input data (bad JSON, bad shapes, bad tables)."""


class MalformedCertificateError(InputError):
    """Certificate JSON that does not match the published schema.

    Distinct from a verification *failure*, which is a well-formed
    certificate whose recomputed contents do not match.
    """


class PreconditionError(Error):
    """A mathematical precondition of an operation does not hold."""


class SingularMatrixError(PreconditionError):
    """Inversion (or an operation requiring invertibility) on det = 0."""


class DimensionMismatchError(PreconditionError):
    """Operands with incompatible dimensions."""


class ResourceError(Error):
    """A configured budget was exceeded; results are never silently truncated."""

    def __init__(self, message: str, *, partial_size: int | None = None):
        super().__init__(message)
        self.partial_size = partial_size


class BitBoundExceededError(ResourceError):
    """Entry blow-up guard tripped during integer matrix reduction."""


class ScheduleExhaustedError(ResourceError):
    """No success below the configured schedule/budget.

    Carries the largest modulus tried.  Never a claim that success is
    impossible: groups violating the search's hypotheses (e.g. generated by
    an infinite-order semisimple element) can make every level fail.
    """

    def __init__(self, message: str, *, largest_tried: int | None = None):
        super().__init__(message)
        self.largest_tried = largest_tried
