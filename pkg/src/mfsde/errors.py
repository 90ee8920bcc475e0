"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A parameter is outside its admissible range."""


class GridMismatchError(ValueError):
    """Two grid-indexed objects do not live on the same grid."""


class EmbeddingError(RuntimeError):
    """A synthesis method cannot represent the requested covariance."""


class BlowUpError(RuntimeError):
    """The solver state left the trust region or became non-finite."""

    def __init__(self, step: int, time: float, state: float):
        self.step = step
        self.time = time
        self.state = state
        super().__init__(
            f"state blew up at step {step} (t={time:.6g}): x={state!r}"
        )
