"""Exception hierarchy shared by the services, the CLI and the HTTP routes."""

from typing import List, Optional


class LoopBVError(Exception):
    """Base class for every error raised by the calculator"""


class RangeError(LoopBVError, ValueError):
    """A degree outside the stored (truncated) range was requested"""

    def __init__(self, message: str, degree: Optional[int] = None):
        super().__init__(message)
        self.degree = degree


class ModelValidationError(LoopBVError):
    """A model failed validation; carries every violation found"""

    def __init__(self, violations: List, message: Optional[str] = None):
        self.violations = list(violations)
        if message is None:
            first = self.violations[0] if self.violations else None
            message = str(first) if first is not None else "model failed validation"
        super().__init__(message)


class NotPoincareDualityError(ModelValidationError):
    """The orientation pairing is degenerate in some degree"""

    def __init__(self, degree: int, violations: Optional[List] = None):
        self.degree = degree
        super().__init__(
            violations or [],
            f"not a Poincaré duality model: pairing is degenerate in degree {degree}",
        )


class InconsistentModelError(LoopBVError):
    """An exact linear solve that must succeed for a valid model did not"""


class ChainIdentityError(LoopBVError):
    """An exact identity failed while building a complex or an operator"""

    def __init__(self, identity: str, witness: str, detail: str = ""):
        self.identity = identity
        self.witness = witness
        self.detail = detail
        text = f"{identity} fails on {witness}"
        super().__init__(f"{text}: {detail}" if detail else text)


class ModelLoadError(LoopBVError):
    """A model file could not be parsed or does not match the schema"""


class UnknownModelError(LoopBVError, KeyError):
    """No builtin model has the requested name"""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown model"


class PipelineError(LoopBVError):
    """The requested pipeline cannot run on the given input"""
