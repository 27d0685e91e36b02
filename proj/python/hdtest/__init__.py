"""Kernel, distance and mean-difference two-sample tests for high-dimensional data.

Thin wrapper around the compiled extension; see the README for the C++ API
and the command-line tool.
"""

from ._hdtest import *  # noqa: F401,F403
from ._hdtest import __version__  # noqa: F401
