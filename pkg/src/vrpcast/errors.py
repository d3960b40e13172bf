"""Exception hierarchy shared across the package."""


class VrpcastError(Exception):
    """Base class for all vrpcast errors."""


class DataFormatError(VrpcastError):
    """Input file or row could not be parsed."""


class DegenerateDataError(VrpcastError):
    """Data is valid but too degenerate for the requested computation
    (constant series, zero variance, max == min, ...)."""


class TrainingError(VrpcastError):
    """A training run aborted (non-finite objective, damping overflow)."""


class PipelineStageError(VrpcastError):
    """A pipeline stage failed; carries the stage name."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
