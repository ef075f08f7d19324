"""Exception hierarchy for qrheat.

Every failure mode raised by the library derives from :class:`QrheatError`,
so callers can catch one base class at sweep level and keep going.
"""


class QrheatError(Exception):
    """Base class for all qrheat errors."""


class NonPositiveFrequency(QrheatError):
    """A frequency that must be positive was zero or negative."""


class CouplingOutOfRange(QrheatError):
    """Qubit-photon coupling at or beyond the spectral-collapse bound."""


class TruncationTooSmall(QrheatError):
    """A brute-force oracle was asked for levels outside its reliable window."""


class OverflowRisk(QrheatError):
    """Overlap evaluation outside the stable window with log-domain disabled."""


class DimensionMismatch(QrheatError):
    """Inconsistent truncation between rate tables and energy tables."""


class SingularSolve(QrheatError):
    """The stationary null space is not one-dimensional (disconnected chain)."""


class ConvergenceFailure(QrheatError):
    """An eigenvalue computation failed to converge."""


class StepTooLarge(QrheatError):
    """Finite-difference tilt step would exponentiate beyond the safe range."""


class TruncationUnconverged(QrheatError):
    """Automatic truncation escalation hit the cap without converging."""


class CutoffUnconverged(QrheatError):
    """Weak-coupling component sum did not reach the requested tail bound."""


class BothCurrentsZero(QrheatError):
    """Rectification factor is undefined when both currents vanish."""


class TooFewPoints(QrheatError):
    """Peak detection needs at least five samples."""


class UnknownPreset(QrheatError):
    """Requested figure preset name is not defined."""


class ParseError(QrheatError):
    """Sweep configuration document could not be parsed."""


class ValidationError(QrheatError):
    """Sweep configuration violates one or more invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class IoError(QrheatError):
    """Failed to write sweep output."""
