"""Exception hierarchy shared across the package.

The CLI maps FatcountError (and OSError) to exit code 1; argparse usage
errors exit with 2.
"""


class FatcountError(Exception):
    """Base class for all package errors."""


class FormatError(FatcountError):
    """A file does not conform to its declared on-disk format."""


class SizeMismatchError(FormatError):
    """Payload size disagrees with the header."""


class HuRangeError(FormatError):
    """A voxel value lies outside the signed 12-bit HU envelope."""


class ShapeError(FatcountError):
    """Array/volume dimensions do not match."""


class ParameterError(FatcountError):
    """Invalid parameter value or combination."""


class DataError(FatcountError):
    """Dataset is empty, incomplete, or too small for the request."""


class LeakageError(FatcountError):
    """A case id appears in both the train and test side of a fold."""


class TrainingDiverged(FatcountError):
    """A loss became NaN/Inf during training."""


class StageError(FatcountError):
    """A pipeline stage failed; carries the stage name."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage
