import logging

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from app.api.routes.compile import router as compile_router
from app.api.routes.lowerbound import router as lowerbound_router
from app.api.routes.run import router as run_router
from app.api.routes.verify import router as verify_router
from app.core.config import get_settings
from app.core.logging import setup_logging
from app.core.middleware import RequestContextMiddleware
from app.services.errors import StepCrnError

settings = get_settings()
setup_logging(settings.log_level, settings.log_json)
logger = logging.getLogger(__name__)

app = FastAPI(title='Step CRN toolchain API', version='1.0.0')
app.add_middleware(RequestContextMiddleware)
app.include_router(compile_router, prefix=settings.api_prefix)
app.include_router(run_router, prefix=settings.api_prefix)
app.include_router(verify_router, prefix=settings.api_prefix)
app.include_router(lowerbound_router, prefix=settings.api_prefix)


@app.exception_handler(StepCrnError)
async def toolchain_error(request: Request, exc: StepCrnError):
    logger.warning(
        'request rejected',
        extra={'request_id': getattr(request.state, 'request_id', None), 'error': str(exc)},
    )
    return JSONResponse(status_code=422, content={'ok': False, 'error': str(exc)})


@app.get('/health')
async def health():
    return {'status': 'ok'}
