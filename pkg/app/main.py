"""
Main FastAPI Application
"""

import logging
from datetime import datetime

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from app.config import settings
from app.shared.errors import MatchLabError
from app.shared.log import configure_logging
from app.shared.schemas import ErrorResponse

# Routers
from app.algorithms.router import router as algorithms_router
from app.core.router import router as core_router
from app.harness.router import router as experiments_router
from app.oracle.router import router as oracle_router
from app.prefgen.router import router as prefgen_router


# ---------------------------------------------------------
# Logging Configuration
# ---------------------------------------------------------
configure_logging()
logger = logging.getLogger(__name__)


# ---------------------------------------------------------
# FastAPI App Initialization
# ---------------------------------------------------------
app = FastAPI(
    title=settings.app_name,
    description="Stable matching simulations, exact enumeration and bound checks",
    version="1.0.0",
    docs_url="/docs" if settings.enable_docs else None,
    redoc_url="/redoc" if settings.enable_docs else None,
)


# ---------------------------------------------------------
# CORS Middleware
# ---------------------------------------------------------
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


# ---------------------------------------------------------
# Domain Errors
# ---------------------------------------------------------
@app.exception_handler(MatchLabError)
async def matchlab_error_handler(request: Request, exc: MatchLabError):
    logger.error(f"{request.url.path}: {exc.message}")
    body = ErrorResponse.from_error(exc)
    return JSONResponse(status_code=422, content=body.model_dump())


# ---------------------------------------------------------
# Router Registration
# ---------------------------------------------------------
app.include_router(core_router, prefix="/api/core")
app.include_router(prefgen_router, prefix="/api/prefgen")
app.include_router(algorithms_router, prefix="/api/algorithms")
app.include_router(oracle_router, prefix="/api/oracle")
app.include_router(experiments_router, prefix="/api/experiments")


# ---------------------------------------------------------
# Root Endpoint
# ---------------------------------------------------------
@app.get("/")
async def root():
    return {
        "message": settings.app_name,
        "version": "1.0.0",
        "status": "running",
        "services": {
            "core": "/api/core",
            "prefgen": "/api/prefgen",
            "algorithms": "/api/algorithms",
            "oracle": "/api/oracle",
            "experiments": "/api/experiments",
        },
        "docs": "/docs" if settings.enable_docs else "disabled",
    }


# ---------------------------------------------------------
# Health Check Endpoint
# ---------------------------------------------------------
@app.get("/health")
async def health_check():
    return {
        "status": "healthy",
        "service": "matchlab",
        "timestamp": datetime.utcnow().isoformat(),
    }
