import logging

from fastapi import APIRouter

from app.core.cache_service import cache_manager
from app.core.errors import UimlError
from app.routes import http_error
from app.schemas.emit_schema import EmitOptions
from app.schemas.request_schema import RenderRequest
from app.schemas.response_schema import RenderResponse
from app.services.pipeline_service import pipeline_service

router = APIRouter()
logger = logging.getLogger(__name__)


@router.post("/render", response_model=RenderResponse)
async def render_endpoint(request: RenderRequest):
    hints_json = request.hints.model_dump_json() if request.hints else ""
    key = cache_manager.content_key(request.uiml, ",".join(sorted(request.families)), hints_json, request.indent)
    cached = cache_manager.get(key, namespace="render")
    if cached is not None:
        return RenderResponse(results=cached, cached=True)

    opts = EmitOptions() if request.indent is None else EmitOptions(indent=request.indent)
    try:
        rendered = pipeline_service.render(
            request.uiml, request.families, request.source_name, hints=request.hints, opts=opts)
    except UimlError as e:
        logger.warning(f"Render of {request.source_name} failed: {e}")
        raise http_error(e)

    results = [r.model_dump(mode="json") for r in rendered]
    cache_manager.set(key, results, namespace="render")
    return RenderResponse(results=results)
