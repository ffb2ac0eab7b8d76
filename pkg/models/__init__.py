# Models package
from .schemas import (
    BasisEntry,
    GeneratorEntry,
    ProductEntry,
    DifferentialEntry,
    ModelFile,
    RunRequest,
    ValidationResponse,
    BettiResponse,
    LoopResponse,
    HodgeResponse,
    CheckResponse,
    BuiltinsResponse,
    SystemStatus,
    ErrorResponse
)

__all__ = [
    "BasisEntry",
    "GeneratorEntry",
    "ProductEntry",
    "DifferentialEntry",
    "ModelFile",
    "RunRequest",
    "ValidationResponse",
    "BettiResponse",
    "LoopResponse",
    "HodgeResponse",
    "CheckResponse",
    "BuiltinsResponse",
    "SystemStatus",
    "ErrorResponse"
]
