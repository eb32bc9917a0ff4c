"""The `gapcert` package"""

import importlib.metadata as im

__version__ = im.version(__package__)

from .functionals import FunctionalBreakdown, FunctionalParams, compute_h
from .kernels import Polynomial
from .optimize import CertificationResult, certify, min_h
from .zeros import GapVariant, ZeroTable
