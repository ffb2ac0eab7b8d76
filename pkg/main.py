from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from datetime import datetime
from dotenv import load_dotenv
import logging
import os
import uvicorn

# Load environment variables
load_dotenv()

from models.schemas import ErrorResponse

# Import routers
from routes import (
    system_router,
    builtins_router,
    validate_router,
    betti_router,
    loop_router,
    hodge_router,
    check_router
)

LOG_LEVEL = os.getenv('LOG_LEVEL', 'info')
logging.basicConfig(level=LOG_LEVEL.upper(), format="%(asctime)s %(levelname)s %(name)s: %(message)s")
logger = logging.getLogger("loopbv")

# Create FastAPI application
app = FastAPI(
    title=os.getenv('APP_NAME', 'LoopBV String Topology Calculator'),
    description="""
    **LoopBV: exact rational string topology**

    Computes the loop homology of a simply connected closed manifold from
    a Poincaré duality model, with its BV algebra structure, and checks it
    against the Hodge decomposition of a Sullivan model of the free loop
    space.

    ## Features

    * **Betti numbers**: dim H^n(LM) from both pipelines
    * **BV tables**: loop product, Δ and bracket on ℍ_*(LM)
    * **Hodge table**: H^n_[p](LM) from the free loop model
    * **Verification**: every chain-level identity checked exactly over ℚ
    """,
    version=os.getenv('APP_VERSION', '1.0.0'),
    license_info={
        "name": "MIT License",
        "url": "https://opensource.org/licenses/MIT",
    },
)

# Configure CORS
app.add_middleware(
    CORSMiddleware,
    allow_origins=os.getenv('CORS_ORIGINS', '*').split(','),
    allow_credentials=True,
    allow_methods=["GET", "POST"],
    allow_headers=["*"],
)

# API prefix
API_PREFIX = os.getenv('API_PREFIX', '/api')

# Register routers
app.include_router(
    system_router,
    prefix=API_PREFIX,
    tags=["System Health"],
    responses={
        500: {"description": "Internal server error"}
    }
)

app.include_router(
    builtins_router,
    prefix=API_PREFIX,
    tags=["Models"],
    responses={
        500: {"description": "Internal server error"}
    }
)

app.include_router(
    validate_router,
    prefix=API_PREFIX,
    tags=["Models"],
    responses={
        500: {"description": "Internal server error"},
        422: {"description": "Unparseable model file"}
    }
)

for router in (betti_router, loop_router, hodge_router, check_router):
    app.include_router(
        router,
        prefix=API_PREFIX,
        tags=["Computations"],
        responses={
            400: {"description": "Degree out of range or unusable pipeline"},
            404: {"description": "Unknown builtin"},
            422: {"description": "Invalid model"},
            500: {"description": "Internal server error", "model": ErrorResponse}
        }
    )

# Root endpoint
@app.get("/", tags=["Welcome"])
async def root():
    """
    Welcome endpoint listing the API
    """
    return {
        "message": "Welcome to the LoopBV string topology calculator",
        "description": "Loop homology BV algebras and Hodge decompositions, exact over the rationals",
        "version": os.getenv('APP_VERSION', '1.0.0'),
        "documentation": "/docs",
        "api_prefix": API_PREFIX,
        "endpoints": {
            "system_status": f"{API_PREFIX}/test",
            "builtins": f"{API_PREFIX}/builtins",
            "validate": f"{API_PREFIX}/validate",
            "betti": f"{API_PREFIX}/betti",
            "loop": f"{API_PREFIX}/loop",
            "hodge": f"{API_PREFIX}/hodge",
            "check": f"{API_PREFIX}/check"
        }
    }

# Health check endpoint
@app.get("/health", tags=["System Health"])
async def health_check():
    """
    Simple health check endpoint
    """
    return {
        "status": "healthy",
        "timestamp": datetime.now().isoformat(),
        "service": "LoopBV String Topology Calculator"
    }

# Global exception handler
@app.exception_handler(Exception)
async def global_exception_handler(request, exc):
    """
    Global exception handler for unhandled errors
    """
    logger.exception("unhandled error on %s", request.url.path)
    error = ErrorResponse(
        error="Internal Server Error",
        message="An unexpected error occurred. Please try again later."
    )
    return JSONResponse(status_code=500, content=error.model_dump(mode="json"))

# Run the application
if __name__ == "__main__":
    host = os.getenv('HOST', '0.0.0.0')
    port = int(os.getenv('PORT', 8000))
    debug = os.getenv('DEBUG', 'False').lower() == 'true'

    uvicorn.run(
        "main:app",
        host=host,
        port=port,
        reload=debug,
        log_level=LOG_LEVEL
    )
