from fastapi import APIRouter
from models.schemas import CheckResponse, RunRequest
from services.rendering import check_payload
from services.verification import run_checks
from .common import run

router = APIRouter()


@router.post("/check", response_model=CheckResponse)
async def check(request: RunRequest):
    """
    Run the verification suite

    Always answers 200; ``passed`` is false when some identity failed and
    the failing reports name the first witness.
    """
    return await run(request, lambda pair, N: check_payload(pair.name, N, run_checks(pair, N, request.seed)))
