import logging

from fastapi import APIRouter

from app.core.errors import DiagnosticsError, UimlError
from app.routes import http_error
from app.schemas.request_schema import ValidateRequest
from app.schemas.response_schema import ValidateResponse
from app.services.pipeline_service import pipeline_service

router = APIRouter()
logger = logging.getLogger(__name__)


@router.post("/validate", response_model=ValidateResponse)
async def validate_endpoint(request: ValidateRequest):
    try:
        _, warnings = pipeline_service.check(request.uiml, request.source_name)
        return ValidateResponse(valid=True, diagnostics=warnings)
    except DiagnosticsError as e:
        return ValidateResponse(valid=False, diagnostics=e.diagnostics)
    except UimlError as e:
        logger.warning(f"Validation of {request.source_name} failed: {e}")
        raise http_error(e)
