"""HTTP service layer: pydantic models, shared handlers, FastAPI app."""

from .handlers import HANDLERS

__all__ = ["HANDLERS"]
