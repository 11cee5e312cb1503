from fastapi import APIRouter

from app.harness.schemas import ExperimentConfig
from app.harness.service import harness_service
from app.shared.schemas import SuccessResponse

router = APIRouter(tags=["experiments"])


@router.get("/list", response_model=SuccessResponse)
def catalog():
    return SuccessResponse(
        success=True,
        message="Experiment catalog",
        data=[info.model_dump(mode="json") for info in harness_service.catalog()],
    )


@router.post("/run", response_model=SuccessResponse)
def run(cfg: ExperimentConfig):
    """
    Runs one experiment and returns its summary without the per-trial rows.
    Files are only written when the config names an output path.
    """
    report = harness_service.run(cfg)
    return SuccessResponse(
        success=True,
        message=f"{report.experiment}: {report.verdict.value}",
        data=report.model_dump(mode="json", exclude={"rows"}),
    )
