"""Constants for the gplab library and command-line runner."""

import os
from fractions import Fraction

# System Configuration
SYSTEM_NAME = os.getenv("GPLAB_SYSTEM_NAME", "gplab")
LOG_LEVEL = os.getenv("GPLAB_LOG_LEVEL", "INFO")
THREADS = max(1, int(os.getenv("GPLAB_THREADS", "1")))

# Search Limits
DEFAULT_FUEL = 10_000
DEFAULT_BFS_BUDGET = 200_000
INSPECTION_DEPTH = 8
MAX_FAMILY_SCAN = 100_000
DEFAULT_SAMPLE_COUNT = 500
DEFAULT_SEED = 0
SAMPLE_DENOMINATOR = 65_537

# Mather Parameters
MATHER_A_PRIME = Fraction(5, 16)
MATHER_A = Fraction(3, 8)
MATHER_B = Fraction(5, 8)
MATHER_B_PRIME = Fraction(3, 4)
MATHER_ALPHA = Fraction(1, 16)
MATHER_R_KNEE = Fraction(3, 8)
MATHER_BOOKKEEPING_BOUND = 100
LETTER_BOUND_M_MAX = 30
MATHER_VERIFY_M_MAX = 10

# Diagonal Trick Layout (all inside the normalized interval [3/8, 5/8])
DIAGONAL_H_OUTER = (Fraction(3, 8), Fraction(5, 8))
DIAGONAL_H_CORE_LEFT = Fraction(25, 64)
DIAGONAL_H_ALPHA = Fraction(1, 64)
DIAGONAL_H_CORE_RIGHT = Fraction(19, 32)
DIAGONAL_J = (Fraction(101, 256), Fraction(103, 256))
DIAGONAL_DEFAULT_M_MAX = 5
DIAGONAL_INDEX_POWER = 2
WINDOWS_PER_FAMILY = 2

# Distortion Report
DEFAULT_RATIO_M_MAX = 12
DEFAULT_VERIFY_M_MAX = 2
RATIO_DECREASING_FROM = 5
CERTIFICATE_K_MAX = 20
BILIPSCHITZ_K_MAX = 8
BILIPSCHITZ_DEPTH_MAX = 3

# Cayley Experiments
H5_SIZE = 5
H5_N_MAX = 50
BS_N_MAX = 20
BS_BALL_N_MAX = 3
DEFAULT_BALL_RADIUS = 6

# Report Formats
FORMAT_JSON = "json"
FORMAT_CSV = "csv"
SUITE_H5 = "h5"
SUITE_BS = "bs"
SUITE_MATHER = "mather"
SUITE_DIAGONAL = "diagonal"
SUITE_CERTIFICATE = "certificate"
SUITE_PIPELINE = "pipeline"
COMMAND_VERIFY = "verify"
COMMAND_DISTORTION = "distortion"
COMMAND_RANK = "rank"
COMMAND_BALL = "ball"
GROUP_H5_GAMMA1 = "h5-gamma1"
GROUP_H5_GAMMA2 = "h5-gamma2"
GROUP_H5_FULL = "h5-full"
GROUP_BS = "bs"

# Exit Codes
EXIT_OK = 0
EXIT_ASSERTION_FAILED = 1
EXIT_CONFIG_ERROR = 2

# Error Messages
ERROR_NOT_MONOTONE = "Points are not strictly increasing: {}"
ERROR_OUT_OF_RANGE = "Value {} is outside [0, 1]"
ERROR_INVALID_BUMP = "Bump parameters violate 0 < a' < a < b < b+alpha < b' < 1: {}"
ERROR_MALFORMED_EXPR = "Malformed set expression: {}"
ERROR_NOT_PL_HERE = "Interval {} contains the accumulation point {}"
ERROR_FUEL_EXHAUSTED = "More than {} hulls meet the interval {}"
ERROR_UNBOUND_GENERATOR = "Generator '{}' is not bound in the environment"
ERROR_NOT_REPRESENTABLE = "Result is not representable: {}"
ERROR_BUDGET_EXCEEDED = "Ball grew past the budget of {} elements at radius {}"
ERROR_SUBADDITIVITY = "lengths({}) = {} exceeds lengths({}) + lengths({}) = {}"
ERROR_IDENTITY_FAILED = "Identity failed: {}"
ERROR_GENERATOR_UNREACHABLE = "Generator '{}' is outside the radius-{} ball"
ERROR_CERTIFICATE_FAILED = "L_{}(f1^{}) = {} differs from {} * {}"
ERROR_DISJOINTNESS_FAILED = "Disjointness failed at m = {}: {}"
ERROR_BOUND_EXCEEDED = "Letter count {} exceeds the bound {} at m = {}"
ERROR_PARSE = "Cannot parse {}: {}"
ERROR_INVALID_CONFIG = "Invalid configuration: {}"
ERROR_TORSION = "Element has finite order {}"
ERROR_NOT_DYADIC = "Translation {} is not a dyadic rational"
