"""Reflected backward SDE laboratory on binomial lattices."""

from rbsde._core import *  # noqa: F401,F403
from rbsde._core import __doc__  # noqa: F401

__version__ = "0.1.0"
