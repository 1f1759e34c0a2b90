from fastapi import APIRouter

from app.models.program import Schedule
from app.schemas.api import RunRequest, RunResponse
from app.services.engine import run_program
from app.services.programs import parse_program
from app.services.utils import parse_bits

router = APIRouter(prefix='/run', tags=['run'])


@router.post('', response_model=RunResponse)
def run(payload: RunRequest):
    program = parse_program(payload.program)
    result = run_program(program, parse_bits(payload.bits), Schedule(payload.seed), trace=payload.trace)
    return RunResponse(
        ok=result.decode_error is None,
        outputs=None if result.decoded is None else list(result.decoded),
        error=result.decode_error,
        peak_volume=result.peak_volume,
        step_count=result.step_count,
        final=result.final.sparse(),
        trace=list(result.trace),
    )
