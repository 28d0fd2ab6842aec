"""Exception types raised by the estimators and the experiment harness."""


class EstimationError(RuntimeError):
    """Base class for numerical failures inside an estimation pipeline."""


class ConditioningError(EstimationError):
    """A least-squares system matrix is too ill-conditioned to invert safely."""

    def __init__(self, cond, limit, hint=""):
        self.cond = float(cond)
        self.limit = float(limit)
        msg = f"condition number {self.cond:.3e} exceeds limit {self.limit:.1e}"
        if hint:
            msg += f"; {hint}"
        super().__init__(msg)


class DegenerateChannelError(EstimationError):
    """An elementwise division hit a (near-)zero channel coefficient."""

    def __init__(self, what, index):
        self.index = index
        super().__init__(f"near-zero divisor in {what} at index {index}")


class ConfigError(ValueError):
    """Invalid or unknown experiment configuration entry."""
