"""Band-limited-noise sideband cooling: analytics, noise synthesis, Langevin
simulation, spectral thermometry, and sweep orchestration.

All rates are angular (rad/s); JSON parameter files use Hz (see
load_system_params).
"""

from ._noisecool import *  # noqa: F401,F403
from ._noisecool import __doc__ as _core_doc  # noqa: F401
