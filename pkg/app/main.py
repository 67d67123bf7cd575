"""FastAPI main application for the RES sizing service."""

import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from app.api.routes import router
from app.config import configure_logging, get_settings

logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Application lifespan handler for startup/shutdown events."""
    # Startup
    settings = get_settings()
    configure_logging()
    logger.info("[START] RES sizing service starting...")
    logger.info("   Solver backend: %s", settings.SOLVER_BACKEND)
    logger.info("   Scaling passes: %d", settings.SCALING_PASSES)
    logger.info("   Resource cache: %s", settings.RESOURCE_CACHE_DIR)

    yield

    # Shutdown
    logger.info("[STOP] RES sizing service shutting down...")


# Create FastAPI app
app = FastAPI(
    title="RES sizing",
    description="""
    Minimum-cost sizing of wind, PV, pumped-storage hydro and solar-thermal
    capacity that meets hourly demand with a minimum renewable energy share.

    ## Features
    - **Validate**: Check a scenario file and its series
    - **Solve**: Size one scenario by linear programming
    - **Sweep**: Re-solve over a grid of renewable shares
    - **Catalog**: Technology costs and characteristics
    """,
    version="1.0.0",
    lifespan=lifespan,
)


# Configure CORS
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


# Include API routes
app.include_router(router)


@app.get("/")
async def root():
    """Service summary."""
    return {
        "name": "RES sizing",
        "version": "1.0.0",
        "docs": "/docs",
    }


if __name__ == "__main__":
    import uvicorn
    settings = get_settings()
    uvicorn.run(
        "app.main:app",
        host=settings.API_HOST,
        port=settings.API_PORT,
        reload=True
    )
