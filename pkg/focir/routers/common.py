"""
Mapping of library errors onto HTTP responses.
"""
import logging

from fastapi import HTTPException
from pydantic import ValidationError

from focir.errors import (
    DimensionError,
    DomainError,
    InconsistentCoefficientsError,
    InputError,
    SingularStructureError,
    UnsupportedStructureError,
)

logger = logging.getLogger(__name__)

INPUT_ERRORS = (InputError, ValidationError, DomainError, DimensionError)
INVERSION_ERRORS = (InconsistentCoefficientsError, SingularStructureError, UnsupportedStructureError)


def http_error(e: Exception, action: str) -> HTTPException:
    """
    Translate an exception raised while serving a request.

    Args:
        e: The exception
        action: Short description of the failed operation, used in logs

    Returns:
        HTTPException with 400 (bad input), 422 (inversion failure) or 500
    """
    if isinstance(e, INPUT_ERRORS):
        logger.warning(f"{action}: rejected input: {e}")
        return HTTPException(status_code=400, detail=str(e))
    if isinstance(e, INVERSION_ERRORS):
        logger.warning(f"{action}: inversion failed: {e}")
        return HTTPException(status_code=422, detail=f"{type(e).__name__}: {e}")
    logger.error(f"{action} error: {e}", exc_info=True)
    return HTTPException(status_code=500, detail=f"Failed to {action}: {str(e)}")
