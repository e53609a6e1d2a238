import logging

from fastapi import APIRouter

from app.core.errors import UimlError
from app.routes import http_error
from app.schemas.request_schema import SimulateRequest
from app.schemas.response_schema import SimulateResponse
from app.services.pipeline_service import pipeline_service

router = APIRouter()
logger = logging.getLogger(__name__)


@router.post("/simulate", response_model=SimulateResponse)
async def simulate_endpoint(request: SimulateRequest):
    try:
        trace = pipeline_service.simulate(
            request.uiml, request.events, request.source_name, interface_name=request.interface_name)
    except UimlError as e:
        logger.warning(f"Simulation of {request.source_name} failed: {e}")
        raise http_error(e)
    return SimulateResponse(trace=[entry.render() for entry in trace])
