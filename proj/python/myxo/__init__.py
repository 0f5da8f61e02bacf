"""Discrete-velocity kinetic model of myxobacteria alignment and reversal."""

from ._core import *  # noqa: F401,F403
from ._core import ConfigError, MyxoError, NegativityDetected

__version__ = "0.1.0"
