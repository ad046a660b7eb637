"""Level spacing statistics, log-gas sampling and stop-time scheduling for
buses on a ring route."""

from ._core import *  # noqa: F401,F403
from ._core import RingChaosError, __doc__  # noqa: F401

__version__ = "0.1.0"
