from fastapi import APIRouter, Query

from app.schemas.api import LowerBoundRow
from app.services.lowerbound import verify_fib_growth

router = APIRouter(prefix='/lowerbound', tags=['lowerbound'])


@router.get('', response_model=list[LowerBoundRow])
def lowerbound(max_depth: int = Query(default=10, ge=1, le=24)):
    rows = []
    for depth in range(1, max_depth + 1):
        report = verify_fib_growth(depth)
        rows.append(
            LowerBoundRow(
                depth=report.depth,
                fib=report.fib,
                chain_bound=report.chain_bound,
                propagated_bound=report.propagated_bound,
                measured_demand=report.measured_demand,
                static_volume=report.static_volume,
                passed=report.passed,
            )
        )
    return rows
