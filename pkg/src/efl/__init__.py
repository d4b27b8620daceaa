"""efl: envy-free cake division solvers, certificates and counting tools.

Submodules:

* ``core``        cuts, tiles, allocations, divisions
* ``preferences`` oracle families (extremal, utility, half-space)
* ``solver``      grid sweeps, matching certificates
* ``graphs``      preference-graph analytics
* ``hybrid``      boxed divisions with measure equipartition
* ``cli``         the ``efl`` command-line tool
"""

from .core import (
    Allocation,
    Cut,
    Division,
    InputError,
    Tile,
    cut_from_points,
    cuts_equal,
    divisions_equal,
)
from ._kernels import active_backend, use_backend

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "Cut",
    "Division",
    "InputError",
    "Tile",
    "active_backend",
    "cut_from_points",
    "cuts_equal",
    "divisions_equal",
    "use_backend",
    "__version__",
]
