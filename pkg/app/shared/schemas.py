"""
Response envelopes returned by every API route.
"""

from typing import Any, Optional

from pydantic import BaseModel

from app.shared.errors import MatchLabError


class SuccessResponse(BaseModel):
    success: bool = True
    message: str
    data: Optional[Any] = None


class ErrorResponse(BaseModel):
    success: bool = False
    code: str = MatchLabError.code
    error: str
    details: Optional[str] = None

    @classmethod
    def from_error(cls, exc: MatchLabError) -> "ErrorResponse":
        return cls(code=exc.code, error=exc.message, details=exc.details)
