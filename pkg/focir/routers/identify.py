"""
Identification API Router
Inversion of coefficient vectors and round-trip audits
"""
import logging

from fastapi import APIRouter

from focir.config import settings
from focir.models import IdentifyReport, IdentifyRequest, RoundtripReport, RoundtripRequest
from focir.routers.common import http_error
from focir.services.ident_engine import IdentificationService, ident_service

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api", tags=["identification"])


@router.post("/identify", response_model=IdentifyReport)
def identify(request: IdentifyRequest):
    """
    Recover every parameter set that reproduces the coefficients

    Args:
        request: Coefficient document with an optional residual tolerance

    Returns:
        Solutions, residuals and classification
    """
    logger.info(f"Identify request: {request.structure.value}, T={request.T}")
    service = ident_service
    if request.tol is not None:
        service = IdentificationService(settings.model_copy(update={"residual_tol": request.tol}))
    try:
        c = request.to_vector()
        result = service.identify(c)
    except Exception as e:
        raise http_error(e, "identify") from e
    return IdentifyReport.from_result(result, c)


@router.post("/roundtrip", response_model=RoundtripReport)
def roundtrip(request: RoundtripRequest):
    """
    Coefficient map followed by inversion, checked against the submitted model

    Args:
        request: RoundtripRequest with model, horizon T and optional tolerance

    Returns:
        Audit report; ``passed`` is false when the error exceeds the tolerance
    """
    tol = settings.roundtrip_tol if request.tol is None else request.tol
    logger.info(f"Round-trip request: {len(request.model.branches)} branch(es), T={request.horizon}, tol={tol}")
    try:
        audit = ident_service.roundtrip(request.model.to_params(), request.horizon, tol=tol)
    except Exception as e:
        raise http_error(e, "run round trip") from e
    return RoundtripReport.from_audit(audit, tol)
