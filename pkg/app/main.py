"""
uimlc HTTP compile service: validate, lower, render and simulate over JSON
"""
import logging
from contextlib import asynccontextmanager
from time import time

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from app import __version__
from app.config import settings
from app.core.cache_service import cache_manager
from app.routes import lower, render, simulate, validate
from app.schemas.vocabulary_schema import FamilyId
from app.services.vocabulary_service import (
    builtin_generic_vocabulary,
    builtin_mapping_table,
    builtin_target_vocabulary,
)

logging.basicConfig(
    level=getattr(logging, settings.log_level.upper(), logging.WARNING),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def preload_tables():
    """Load the built-in vocabularies and mapping tables once at startup"""
    start = time()
    generic = builtin_generic_vocabulary()
    for family in FamilyId:
        builtin_target_vocabulary(family)
        builtin_mapping_table(family)
    logger.info(f"✓ Built-in tables loaded ({len(generic)} generic classes) in {time() - start:.3f}s")


@asynccontextmanager
async def lifespan(app: FastAPI):
    logger.info("Starting uimlc service...")
    preload_tables()
    yield
    logger.info(f"Shutting down, cache: {cache_manager.get_stats()}")


app = FastAPI(
    title="uimlc",
    description="UIML multi-platform UI compiler",
    version=__version__,
    lifespan=lifespan,
    docs_url="/docs",
    redoc_url="/redoc"
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.exception_handler(Exception)
async def global_exception_handler(request: Request, exc: Exception):
    logger.error(f"Error on {request.url.path}: {exc}", exc_info=True)
    return JSONResponse(
        status_code=500,
        content={"error": str(exc), "path": str(request.url.path)}
    )


app.include_router(validate.router, prefix="/api", tags=["Validate"])
app.include_router(lower.router, prefix="/api", tags=["Lower"])
app.include_router(render.router, prefix="/api", tags=["Render"])
app.include_router(simulate.router, prefix="/api", tags=["Simulate"])


@app.get("/", tags=["Health"])
async def root():
    return {
        "name": "uimlc",
        "version": __version__,
        "status": "operational",
        "families": [f.value for f in FamilyId],
        "docs": "/docs"
    }


@app.get("/health", tags=["Health"])
async def health_check():
    return {
        "status": "healthy",
        "timestamp": time(),
        "cache": cache_manager.get_stats(),
    }


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(
        "app.main:app",
        host=settings.api_host,
        port=settings.api_port,
    )
