"""HTTP/WebSocket service wrapping the library for live operation."""

from .app import create_app

__all__ = ["create_app"]
