from fastapi import APIRouter, File, HTTPException, UploadFile
from fastapi.concurrency import run_in_threadpool
from models.schemas import ValidationResponse
from services.exceptions import ModelLoadError
from services.model_service import model_service
from services.rendering import validation_payload
from .common import http_error

router = APIRouter()


@router.post("/validate", response_model=ValidationResponse)
async def validate_model(file: UploadFile = File(..., description="Model file (JSON)")):
    """
    Validate an uploaded model file

    Parse errors answer 422 with the position; axiom violations are
    returned in the body with ``valid`` set to false.
    """
    content = await file.read()
    try:
        model = model_service.parse(content.decode("utf-8"), file.filename or "upload")
    except UnicodeDecodeError:
        raise HTTPException(status_code=422, detail="model files must be UTF-8 encoded")
    except ModelLoadError as e:
        raise http_error(e)
    return await run_in_threadpool(validation_payload, model)
