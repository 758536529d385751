"""Instrumental-variable mining on causal knowledge graphs, text features,
random forests and two-stage least squares."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
