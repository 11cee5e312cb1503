from fastapi import APIRouter

from app.prefgen.schemas import GenerateResponse, ModelDescriptor
from app.prefgen.service import prefgen_service
from app.shared.schemas import SuccessResponse

router = APIRouter(tags=["prefgen"])


@router.post("/generate", response_model=SuccessResponse)
def generate(descriptor: ModelDescriptor):
    """Builds the instance a model descriptor names. Randomized models need a seed."""
    built = prefgen_service.generate(descriptor)
    result = GenerateResponse(descriptor=built.descriptor, instance=built.instance)
    return SuccessResponse(success=True, message="Instance generated", data=result.model_dump(mode="json"))
