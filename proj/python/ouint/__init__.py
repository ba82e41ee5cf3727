"""Interventions, stability and stationary laws of Ornstein-Uhlenbeck SDEs."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
