"""
Coefficient API Router
"""
import logging

from fastapi import APIRouter

from focir.models import CoefficientFileSchema, CoeffsRequest
from focir.routers.common import http_error
from focir.services.tf_builder import coefficient_map

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/api", tags=["coefficients"])


@router.post("/coeffs", response_model=CoefficientFileSchema)
def model_coefficients(request: CoeffsRequest):
    """
    Monic transfer-function coefficients of a circuit model

    Args:
        request: CoeffsRequest with the model and horizon T

    Returns:
        Coefficient document (structure, ts, T, f, g)
    """
    logger.info(f"Coefficient request: {len(request.model.branches)} branch(es), T={request.horizon}")
    try:
        c = coefficient_map(request.model.to_params(), request.horizon)
    except Exception as e:
        raise http_error(e, "compute coefficients") from e
    return CoefficientFileSchema.from_vector(c)
