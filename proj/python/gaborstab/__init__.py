"""Gabor frame bounds and stability certificates for timing jitter."""

from ._core import *  # noqa: F401,F403
from ._core import ConfigError, GaborError, __version__  # noqa: F401
