from fastapi import APIRouter

from app.oracle.schemas import StableSetRequest
from app.oracle.service import oracle_service
from app.shared.schemas import SuccessResponse

router = APIRouter(tags=["oracle"])


@router.post("/stable-set", response_model=SuccessResponse)
def stable_set(req: StableSetRequest):
    """Every stable matching by exhaustive search; refuses instances above the guard."""
    export = oracle_service.stable_set(req.instance, req.guard)
    return SuccessResponse(
        success=True,
        message=f"{export.count} stable matching(s)",
        data=export.model_dump(mode="json"),
    )
