from fastapi import APIRouter

from app.schemas.api import VerifyRequest, VerifySummary
from app.services.netlist import parse_circuit
from app.services.verification import verify_circuit

router = APIRouter(prefix='/verify', tags=['verify'])


@router.post('', response_model=VerifySummary)
def verify(payload: VerifyRequest):
    return verify_circuit(
        parse_circuit(payload.netlist),
        payload.backend,
        inputs=payload.inputs,
        seeds=payload.seeds,
        exhaustive=payload.exhaustive,
        workers=1,
    )
