"""Tensor-train toolkit: MPS/MPO algebra, circuit simulation, ground-state and
linear solvers, tensor cross interpolation and quantics grids."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
