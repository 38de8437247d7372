"""Module for the constants used across the package."""

import math

PACKAGE_NAME = "heatrecon"
CONFIG_ENV_VAR = "HEATRECON_CONFIG"

# exit codes
EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_SOLVER = 4

# weights
DEFAULT_CAP = math.exp(40.0)
LOG_UNDERFLOW = -745.0

# quadrature
SUPPORTED_ORDERS = (2, 3, 4)
DEFAULT_ORDER = 3

# numerical tolerances
RATIO_FLOOR = 1e-14
SNAP_TOLERANCE = 1e-12

# serialization
FLOAT_FORMAT = ".17g"
REPORT_FILE = "report.txt"
MANIFEST_FILE = "manifest.json"
TRUTH_FILE = "truth.csv"
OBSERVATION_FILE = "observation.csv"
RECONSTRUCTION_FILE = "reconstruction.csv"
DIAGNOSTICS_FILE = "diagnostics.csv"
ITERATIONS_FILE = "iterations.csv"
SWEEP_FILE = "sweep.csv"
