"""Quasiprobability statistics of two-time measurements."""

from ._qprob import *  # noqa: F401,F403
from ._qprob import __doc__  # noqa: F401

__version__ = "0.1.0"
