"""Array and point aliases shared across the package."""

from typing import Literal

import numpy as np
from numpy.typing import NDArray

FloatArray = NDArray[np.float64]
ComplexArray = NDArray[np.complex128]
IntArray = NDArray[np.int64]
BoolArray = NDArray[np.bool_]

Point = tuple[float, float]

BoundaryKind = Literal["D", "N"]
"""Boundary condition carried by a node or an arc: Dirichlet or Neumann."""
