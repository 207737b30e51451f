"""HTTP service: the review-vetting API plus stage execution over the core."""

from geodistill.service.app import create_app

__all__ = ["create_app"]
