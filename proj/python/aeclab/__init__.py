"""Acoustic echo cancellation with delay estimation."""

from ._aeclab import *  # noqa: F401,F403
from ._aeclab import AeclabError, Model, UsageError  # noqa: F401
