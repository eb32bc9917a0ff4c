import math
import os
from pathlib import Path

RESULTS_BASE_FOLDER = Path(os.environ.get("GAPCERT_RESULTS_FOLDER", "/tmp/gapcert"))

# numerical defaults, overridable per run
QUAD_ORDER = int(os.environ.get("GAPCERT_QUAD_ORDER", 64))
J_MAX = int(os.environ.get("GAPCERT_J_MAX", 40))
TAIL_TOL = float(os.environ.get("GAPCERT_TAIL_TOL", 1e-15))
MIN_QUAD_ORDER = 8

# kernels
MAX_KERNEL_DEGREE = 512

# functionals
# relative to the sum of the magnitudes of the three U terms
ZERO_MOLLIFIER_TOL = 1e-14
SMALL_FREQUENCY = 1e-3
TRIG_SERIES_TERMS = 12

# optimize
GRAM_DPS = int(os.environ.get("GAPCERT_GRAM_DPS", 50))
# the equilibrated denominator must keep this many digits after factoring
GRAM_GUARD_DIGITS = 15
# U(v) / (|v|^T |D| |v|) below this leaves nothing in double precision
CANCELLATION_TOL = 1e-13
TOL_C = 1e-3
DIRECT_SEARCH_STARTS = 20
GRID_POINTS = 20

# oracle
SMALL_ETA = 1e-3
ETA_SERIES_TERMS = 8
ORACLE_EPSABS = 1e-13
ORACLE_EPSREL = 1e-10
EULER_TERM_TOL = 1e-18
MAX_SIEVE_SIZE = 10**8

# zeros
TWO_PI = 2.0 * math.pi

DEFAULT_PRESET = "paper-2009-r2-m10"
