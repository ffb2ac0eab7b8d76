from fastapi import APIRouter
from models.schemas import LoopResponse, RunRequest
from services.exceptions import PipelineError
from services.rendering import loop_payload
from services.stringtop import loop_algebra
from .common import run

router = APIRouter()


def _tables(pair, N: int):
    if pair.pd is None:
        raise PipelineError("loop tables need a pd-cdga model")
    return loop_payload(loop_algebra(pair.pd, N))


@router.post("/loop", response_model=LoopResponse)
async def loop_tables(request: RunRequest):
    """
    Loop product, BV operator and bracket on loop homology

    Needs a PD model and max_degree at least its dimension.
    """
    return await run(request, _tables)
