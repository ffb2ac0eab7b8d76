# Services package
from .model_service import ModelPair, model_service
from .verification import run_checks

__all__ = [
    "ModelPair",
    "model_service",
    "run_checks"
]
