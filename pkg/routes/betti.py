from fastapi import APIRouter
from models.schemas import BettiResponse, RunRequest
from services.rendering import betti_payload
from .common import run

router = APIRouter()


@router.post("/betti", response_model=BettiResponse)
async def betti_numbers(request: RunRequest):
    """
    Betti numbers of the free loop space

    dim H^n(LM) for n ≤ max_degree from the Hochschild pipeline, the
    Sullivan pipeline or both (with a match flag per degree).
    """
    return await run(request, lambda pair, N: betti_payload(pair, N, request.pipeline))
