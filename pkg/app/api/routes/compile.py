from fastapi import APIRouter

from app.schemas.api import CompileRequest, CompileResponse
from app.services.compilers import compile_circuit
from app.services.netlist import parse_circuit
from app.services.programs import format_program, report_model

router = APIRouter(prefix='/compile', tags=['compile'])


@router.post('', response_model=CompileResponse)
def compile_netlist(payload: CompileRequest):
    compilation = compile_circuit(parse_circuit(payload.netlist), payload.backend)
    return CompileResponse(
        program=format_program(compilation.program),
        report=report_model(compilation.report),
    )
