from fastapi import APIRouter

from app.algorithms.schemas import EnumerateRequest
from app.algorithms.service import algorithms_service
from app.core.schemas import Instance
from app.shared.schemas import SuccessResponse

router = APIRouter(tags=["algorithms"])


# -----------------------------------------------------------
# STABLE HUSBANDS OF ONE WOMAN
# -----------------------------------------------------------
@router.post("/enumerate", response_model=SuccessResponse)
def enumerate_husbands(req: EnumerateRequest):
    """
    Walks one woman through all of her stable husbands, worst first.
    With weights, her list is drawn from them using the seed.
    """
    result = algorithms_service.husbands(req.instance, req.woman, req.weights, req.seed)
    return SuccessResponse(
        success=True,
        message=f"{result.count} stable husband(s)",
        data=result.model_dump(mode="json"),
    )


# -----------------------------------------------------------
# BLOCK DECOMPOSITION
# -----------------------------------------------------------
@router.post("/blocks", response_model=SuccessResponse)
def blocks(inst: Instance):
    report = algorithms_service.blocks(inst)
    return SuccessResponse(
        success=True,
        message=f"{len(report.separators) - 1} block(s)",
        data=report.model_dump(mode="json"),
    )
