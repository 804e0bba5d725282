"""Exception types raised across the package."""


class HardyError(Exception):
    """Base class for all errors raised by hardylab."""


class StateFormatError(HardyError, ValueError):
    """A state document or amplitude array is malformed."""


class DimensionCapExceeded(HardyError, ValueError):
    """Total Hilbert-space dimension is above the configured cap."""


class IneligibleState(HardyError):
    """The state admits no Hardy construction for the requested cut.

    The offending classification is kept on ``classification`` so callers
    can report whether the state was a product or had a flat spectrum.
    """

    def __init__(self, classification, message=None):
        self.classification = classification
        if message is None:
            message = f"state is not Hardy-eligible: {classification.tag}"
        super().__init__(message)


class NoEligibleComponent(HardyError):
    """No nonzero-weight component of a peeled state has distinct Schmidt weights."""


class EnumerationCapExceeded(HardyError):
    """A strategy enumeration would exceed the configured cap."""


class ScenarioError(HardyError, ValueError):
    """A scenario, constraint, or table references invalid settings or outcomes."""
