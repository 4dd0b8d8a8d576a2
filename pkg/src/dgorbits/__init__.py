"""Orbit analysis of mapping class group actions coming from doubles of finite groups."""

from dgorbits.errors import GroupError, ResourceLimitError, VerificationError

__all__ = ["GroupError", "ResourceLimitError", "VerificationError"]
__version__ = "0.1.0"
