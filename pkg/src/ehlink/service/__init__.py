"""HTTP face of the package: pydantic schemas, handlers, FastAPI app."""

from .app import app, create_app

__all__ = ["app", "create_app"]
