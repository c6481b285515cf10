"""
Configuration settings for nlsground.
Loads settings from environment variables with sensible defaults.
"""
import os

from dotenv import load_dotenv

load_dotenv()

# Output
RESULTS_DIR = os.environ.get("NLSGROUND_RESULTS_DIR", "results")

# Worker pool for independent solves
THREADS = int(os.environ.get("NLSGROUND_THREADS", str(os.cpu_count() or 1)))

# Gradient flow defaults
DEFAULT_TOL = float(os.environ.get("NLSGROUND_TOL", "1e-10"))
DEFAULT_MAX_ITERS = int(os.environ.get("NLSGROUND_MAX_ITERS", "1000000"))
DT_CAP = float(os.environ.get("NLSGROUND_DT_CAP", "0.1"))
CG_RTOL = 1e-12
# Lagged-coefficient stability: dt * (sigma-1) * max beta|phi|^(2 sigma) <= STABILITY_FACTOR
STABILITY_FACTOR = 0.25
# Relative energy rise that rejects a step; the step is halved at most MAX_STEP_HALVINGS times in a row
ENERGY_RISE_RTOL = 1e-12
MAX_STEP_HALVINGS = 40
# An update below STAGNATION_ULPS units of rounding at the peak counts as converged
STAGNATION_ULPS = 64
LOG_EVERY = 1000

# 2D grids are capped at GRID_CAP_2D interior points per direction
GRID_CAP_2D = int(os.environ.get("NLSGROUND_GRID_CAP_2D", "257"))

# Harmonic truncation: R = max(HARMONIC_WIDTHS / sqrt(gamma), TF_MARGIN * tf radius)
HARMONIC_WIDTHS = 8.0
TF_MARGIN = 1.5

# Rescaled attractive problem box
ATTRACTIVE_HALF_WIDTH = 16.0
ATTRACTIVE_POINTS = 1023

# Asymptotics
LAYER_EPS_CUT = 1e-10
LAYER_NODES = 4001
LAYER_QUAD_TOL = 1e-12
MATCHED_RTOL = 1e-10
MATCHED_SOFT_BETA = 10.0
SHOOT_MU_RTOL = 1e-14
SHOOT_X_TOL = 1e-13

# Regime analysis
BIFURCATION_DELTA = 0.02
PETVIASHVILI_TOL = 1e-10
PETVIASHVILI_MAX_ITERS = 2000

# Logging settings
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "standard": {
            "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "level": "DEBUG",
            "formatter": "standard",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "INFO",
    },
    "loggers": {
        "nlsground": {
            "handlers": ["console"],
            "level": os.environ.get("NLSGROUND_LOG_LEVEL", "INFO"),
            "propagate": False,
        },
    },
}
