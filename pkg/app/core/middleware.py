import logging
import time
import uuid

from fastapi import Request
from starlette.middleware.base import BaseHTTPMiddleware

logger = logging.getLogger(__name__)


class RequestContextMiddleware(BaseHTTPMiddleware):
    async def dispatch(self, request: Request, call_next):
        request_id = request.headers.get('X-Request-ID', str(uuid.uuid4()))
        request.state.request_id = request_id
        started = time.perf_counter()
        response = await call_next(request)
        response.headers['X-Request-ID'] = request_id
        logger.info(
            'request handled',
            extra={
                'request_id': request_id,
                'path': request.url.path,
                'status': response.status_code,
                'elapsed_ms': round((time.perf_counter() - started) * 1000, 2),
            },
        )
        return response
