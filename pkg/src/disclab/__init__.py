"""Toolkit for constructing, certifying and optimizing low-discrepancy
point sets: exact box-discrepancy engines, discrepancy-preserving point
shifts, solver-neutral optimization model emitters with solution
verification, desk-scale exact optimizers, lattice parameter search and
local-discrepancy rasters.
"""

from . import discrepancy
from . import model
from . import pointset
from . import raster
from . import search
from . import shifts

__version__ = "0.1.0"
