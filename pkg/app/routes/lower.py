import logging

from fastapi import APIRouter

from app.core.errors import UimlError
from app.routes import http_error
from app.schemas.request_schema import LowerRequest
from app.schemas.response_schema import LowerResponse
from app.services.pipeline_service import pipeline_service

router = APIRouter()
logger = logging.getLogger(__name__)


@router.post("/lower", response_model=LowerResponse)
async def lower_endpoint(request: LowerRequest):
    try:
        return LowerResponse(uiml=pipeline_service.lower(request.model))
    except UimlError as e:
        logger.warning(f"Lowering '{request.model.title}' failed: {e}")
        raise http_error(e)
