# Routes package
from .system import router as system_router
from .builtins import router as builtins_router
from .validate import router as validate_router
from .betti import router as betti_router
from .loop import router as loop_router
from .hodge import router as hodge_router
from .check import router as check_router

__all__ = [
    "system_router",
    "builtins_router",
    "validate_router",
    "betti_router",
    "loop_router",
    "hodge_router",
    "check_router"
]
