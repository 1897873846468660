"""Exception types shared across the toolkit."""


class ShapeError(ValueError):
    """Array dimensions do not satisfy an operation's contract."""


class ParameterError(ValueError):
    """A parameter is outside its documented range."""


class NumericError(ArithmeticError):
    """A computation produced non-finite values."""


class ProviderError(RuntimeError):
    """A pluggable provider (text encoder, detector, scorer, ...) failed."""


class LossError(RuntimeError):
    """A loss component could not be evaluated; message names the provider."""


class PipelineError(RuntimeError):
    """Hard failure inside the dataset pipeline.

    Carries the path of the checkpoint written before aborting so a rerun
    can resume.
    """

    def __init__(self, message: str, checkpoint_path=None):
        super().__init__(message)
        self.checkpoint_path = checkpoint_path
