"""Elastic functional changepoint detection."""

from ._efcp import *  # noqa: F401,F403
from ._efcp import __doc__  # noqa: F401

__version__ = "0.1.0"
