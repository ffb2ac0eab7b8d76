import logging
import os
from typing import Callable, Tuple, TypeVar

from fastapi import HTTPException
from fastapi.concurrency import run_in_threadpool

from models.schemas import RunRequest
from services.cdga import ensure_valid
from services.exceptions import (
    LoopBVError,
    ModelLoadError,
    ModelValidationError,
    PipelineError,
    RangeError,
    UnknownModelError,
)
from services.model_service import ModelPair, model_service

logger = logging.getLogger(__name__)

T = TypeVar("T")


def max_degree_limit() -> int:
    return int(os.getenv('MAX_DEGREE_LIMIT', 14))


def http_error(e: Exception) -> HTTPException:
    """Map a service error to the HTTP status the API documents"""
    if isinstance(e, UnknownModelError):
        return HTTPException(status_code=404, detail=str(e))
    if isinstance(e, (ModelValidationError, ModelLoadError)):
        return HTTPException(status_code=422, detail=str(e))
    if isinstance(e, (RangeError, PipelineError)):
        return HTTPException(status_code=400, detail=str(e))
    return HTTPException(status_code=500, detail=f"Error running computation: {str(e)}")


def resolve(request: RunRequest) -> Tuple[ModelPair, int]:
    """Model pair and degree bound for a request, validated"""
    if request.builtin is not None:
        pair = model_service.builtin(request.builtin)
    else:
        model = model_service.from_model_file(request.model, request.model.name)
        sullivan = None
        if request.sullivan is not None:
            if request.sullivan.kind != "sullivan":
                raise ModelLoadError(f"{request.sullivan.name}: the sullivan slot needs a model of kind sullivan")
            sullivan = model_service.from_model_file(request.sullivan, request.sullivan.name)
        pair = ModelPair.of(model)
        if sullivan is not None and pair.pd is not None:
            pair = ModelPair(pair.pd, sullivan)
    for model in (pair.pd, pair.sullivan):
        if model is not None:
            ensure_valid(model)
    N = pair.default_degree if request.max_degree is None else request.max_degree
    limit = max_degree_limit()
    if N > limit:
        raise RangeError(f"max_degree {N} exceeds the server limit {limit}", N)
    return pair, N


async def run(request: RunRequest, compute: Callable[[ModelPair, int], T]) -> T:
    """Resolve the request and run the computation in the thread pool"""
    try:
        pair, N = resolve(request)
        return await run_in_threadpool(compute, pair, N)
    except LoopBVError as e:
        logger.warning("request failed: %s", e)
        raise http_error(e)
