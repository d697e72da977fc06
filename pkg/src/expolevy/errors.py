"""Exception types shared across the package.

Two broad families matter for the CLI exit codes: ``ValidationFailure``
(bad input, violated precondition or assumption; exit code 1) and
``NumericalFailure`` (the computation itself could not be carried out;
exit code 2). ``UsageError`` maps to exit code 3.
"""


class ExpoLevyError(Exception):
    """Base class for all package errors."""


class UsageError(ExpoLevyError):
    """Malformed command-line or API usage."""


class ValidationFailure(ExpoLevyError):
    """Input rejected before any numerics ran."""


class ModelInvalidError(ValidationFailure):
    """The model violates a structural invariant (see validate())."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid model: " + "; ".join(self.violations))


class PreconditionError(ValidationFailure):
    """A stated operation precondition does not hold."""


class DomainError(ValidationFailure):
    """Argument outside the operation's domain (e.g. x=0, wrong regime)."""


class StripError(ValidationFailure):
    """Argument outside the strip of analyticity Re(s) in (0, 1+theta)."""


class AssumptionError(ValidationFailure):
    """One of the standing assumptions A.1-A.5 fails."""

    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__("assumption failure: " + "; ".join(self.failures))


class MomentError(PreconditionError):
    """Requested moment does not exist (order >= theta)."""


class InfinitePriceError(PreconditionError):
    """Asian price is infinite (tail exponent too small, zeta_1 <= 1)."""


class NumericalFailure(ExpoLevyError):
    """The computation failed or did not converge."""


class PoleError(NumericalFailure):
    """Evaluation at (or too near) a pole."""

    def __init__(self, message, pole=None, multiplicity=None):
        super().__init__(message)
        self.pole = pole
        self.multiplicity = multiplicity


class ConvergenceError(NumericalFailure):
    """Series or quadrature did not converge to tolerance."""


class MultipleRootError(NumericalFailure):
    """Two roots of psi(z)=q are too close (excluded degenerate case)."""


class RootCountError(NumericalFailure):
    """Computed root counts contradict the structural count laws."""


class BreakpointError(NumericalFailure):
    """Series evaluation exactly at the drift breakpoint x = 1/|mu|."""
