from fastapi import APIRouter
from models.schemas import HodgeResponse, RunRequest
from services.exceptions import PipelineError
from services.rendering import hodge_payload
from services.sullivan import build_free_loop_model, hodge_table
from .common import run

router = APIRouter()


def _table(pair, N: int):
    if pair.sullivan is None:
        raise PipelineError("the Hodge table needs a Sullivan model")
    return hodge_payload(pair.sullivan.name, hodge_table(build_free_loop_model(pair.sullivan, N), N))


@router.post("/hodge", response_model=HodgeResponse)
async def hodge(request: RunRequest):
    """
    Hodge decomposition of H^*(LM)

    Rows are degrees n, columns the weights p; each row also carries its
    sum and the dimension computed on the whole free loop model.
    """
    return await run(request, _table)
