"""HTTP service wrapping the core calculators."""

from .app import app

__all__ = ["app"]
