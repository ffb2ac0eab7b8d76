from fastapi import APIRouter
from models.schemas import BuiltinInfo, BuiltinsResponse
from services.model_service import model_service

router = APIRouter()


@router.get("/builtins", response_model=BuiltinsResponse)
async def list_builtins():
    """
    List the builtin models

    Every builtin has a PD model; all of them also carry a Sullivan model.
    """
    builtins = []
    for name in model_service.builtin_names():
        pair = model_service.builtin(name)
        builtins.append(BuiltinInfo(name=name, dimension=pair.pd.dimension, has_sullivan=pair.sullivan is not None))
    return BuiltinsResponse(builtins=builtins, total=len(builtins))
