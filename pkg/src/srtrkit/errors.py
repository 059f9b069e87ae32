"""Exception hierarchy shared across the toolkit.

Subclasses are grouped by how the command-line front end maps them to exit
codes: bad or inconsistent input data, legitimate negative verdicts, and
numerical breakdowns are kept distinguishable.
"""

from __future__ import annotations


class SrtrKitError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(SrtrKitError):
    """Matrix shapes do not conform."""


class NonFiniteError(SrtrKitError):
    """Input contains NaN or infinite entries."""


class InvalidTransformError(SrtrKitError):
    """State transform is singular or wrongly sized."""


class RegularityViolationError(SrtrKitError):
    """Output matrix is rank deficient, so no output-normal form exists."""


class UnsupportedFeedthroughError(SrtrKitError):
    """Operation requires a strictly proper system (D = 0)."""


class TrivialCaseError(SrtrKitError):
    """p == n: full state measurement, nothing to partition."""


class PoleEvaluationError(SrtrKitError):
    """Evaluation point coincides with a pole of the system."""


class InvalidThetaError(SrtrKitError):
    """Stable-factor data violates its constraints (unstable Ax or singular
    Bx / Cx)."""


class KontrollerFormError(SrtrKitError):
    """A normalized-factorization precondition failed.

    ``condition`` names the failed requirement: "a" (U invertible),
    "b" (A + F C stable) or "c" ((A, B, C) minimal).
    """

    def __init__(self, condition: str, message: str):
        super().__init__(f"condition ({condition}): {message}")
        self.condition = condition


class PreconditionError(SrtrKitError):
    """A documented operation precondition does not hold."""


class NoSolutionError(SrtrKitError):
    """No suitable invariant subspace (or other solution object) was found.

    ``best_cond`` reports the best conditioning encountered, for diagnostics.
    """

    def __init__(self, message: str, best_cond: float | None = None):
        super().__init__(message)
        self.best_cond = best_cond


class NumericalFailureError(SrtrKitError):
    """An iteration failed to converge or a residual check failed."""


class AlgebraicLoopError(SrtrKitError):
    """Interconnection has direct feedthrough around the loop."""


class InfeasibleError(SrtrKitError):
    """The structured-synthesis solver could not meet the target tolerance.

    Carries the best condition report found so callers can inspect how close
    the search came.
    """

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class InexactTruncationError(SrtrKitError):
    """Row-order reduction would discard non-negligible coupling.

    ``residual`` is the offending coupling norm.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class InvalidInputError(SrtrKitError):
    """Malformed file, JSON schema violation, or bad CLI argument."""
