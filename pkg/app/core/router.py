from fastapi import APIRouter

from app.algorithms.service import algorithms_service
from app.core.schemas import Instance, SolveRequest
from app.core.service import core_service
from app.shared.schemas import SuccessResponse

router = APIRouter(tags=["core"])


# -----------------------------------------------------------
# VALIDATE AN INSTANCE
# -----------------------------------------------------------
@router.post("/validate", response_model=SuccessResponse)
def validate(inst: Instance):
    """
    Lists duplicate and out-of-range entries of every preference list.
    An empty violation list means the instance is usable.
    """
    report = core_service.validate(inst)
    return SuccessResponse(
        success=True,
        message="Instance is valid" if report.ok else f"{len(report.violations)} violation(s) found",
        data=report.model_dump(mode="json"),
    )


# -----------------------------------------------------------
# SOLVE (MAN- OR WOMAN-OPTIMAL)
# -----------------------------------------------------------
@router.post("/solve", response_model=SuccessResponse)
def solve_instance(req: SolveRequest):
    """
    Runs deferred acceptance with the given side proposing and returns the
    matching with each person's rank of their partner.
    """
    result = algorithms_service.solve(req.instance, req.side)
    return SuccessResponse(success=True, message="Matching computed", data=result.model_dump(mode="json"))
