import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from focir import __version__
from focir.config import settings
from focir.routers import coeffs, health, identify, simulate

logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Lifespan event handler for startup and shutdown."""
    logger.info(f"Starting focir {__version__}")
    logger.info(
        f"Default horizon T={settings.horizon}, residual tolerance {settings.residual_tol:g}, "
        f"scan points {settings.scan_points}"
    )

    yield

    logger.info("Shutting down focir")


# Create FastAPI app
app = FastAPI(
    title="focir",
    description="Fractional-order circuit simulation and structural identifiability",
    version=__version__,
    lifespan=lifespan,
)

# CORS middleware for development
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],  # In production, specify allowed origins
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.exception_handler(RequestValidationError)
async def validation_error_handler(request: Request, exc: RequestValidationError):
    """Report request schema violations as 400."""
    logger.warning(f"Invalid request to {request.url.path}: {exc.errors()}")
    return JSONResponse(status_code=400, content={"detail": jsonable_errors(exc)})


def jsonable_errors(exc: RequestValidationError):
    return [{"loc": list(error.get("loc", ())), "msg": error.get("msg", "")} for error in exc.errors()]


# Include routers
app.include_router(health.router)
app.include_router(simulate.router)
app.include_router(coeffs.router)
app.include_router(identify.router)


@app.get("/")
async def read_root():
    """API root endpoint."""
    return {
        "message": "focir API is running",
        "version": __version__,
        "docs": "/docs",
    }


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(
        "focir.main:app",
        host=settings.host,
        port=settings.port,
        reload=settings.debug,
    )
