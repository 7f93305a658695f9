"""Random bit generator simulators, randomness estimators and closed-form models."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
