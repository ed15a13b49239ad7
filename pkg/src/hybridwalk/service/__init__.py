"""HTTP service wrapping the core package."""

from .app import create_app, status_for_error
from .handlers import AppState

__all__ = ["create_app", "status_for_error", "AppState"]
