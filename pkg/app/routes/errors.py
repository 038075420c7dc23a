import logging
from typing import Tuple

from flask import jsonify
from pydantic import ValidationError

from app.exceptions import (
    DomainError, ParseError, PreconditionError, SetMapError, UnknownExampleError,
)
from app.models.schemas import ErrorResponse

logger = logging.getLogger(__name__)


def error_response(e: Exception, fallback_code: str) -> Tuple[object, int]:
    """JSON ErrorResponse and HTTP status for an exception raised by a route"""
    if isinstance(e, ValidationError):
        body = ErrorResponse(error="Invalid request data", error_code="VALIDATION_ERROR",
                             details={'errors': [err['msg'] for err in e.errors()]})
        return jsonify(body.model_dump(mode='json')), 400
    if isinstance(e, UnknownExampleError):
        status = 404
    elif isinstance(e, (ParseError, DomainError)):
        status = 400
    elif isinstance(e, PreconditionError):
        status = 409
    elif isinstance(e, SetMapError):
        status = 500
    elif isinstance(e, ValueError):
        body = ErrorResponse(error=str(e), error_code="INVALID_PARAMETER")
        return jsonify(body.model_dump(mode='json')), 400
    else:
        logger.error(f"Unhandled error: {str(e)}")
        body = ErrorResponse(error=str(e), error_code=fallback_code)
        return jsonify(body.model_dump(mode='json')), 500

    if status == 500:
        logger.error(f"{e.error_code}: {e.message}")
    body = ErrorResponse(error=str(e), error_code=e.error_code, details=e.details)
    return jsonify(body.model_dump(mode='json')), status
