"""
Centralized configuration for graphrfd.

This module contains the numerical tolerances, default truncation parameters,
exit codes and logging settings used throughout the toolkit so that every
certificate records the exact values it was produced with.
"""
import os
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Dict

# ====================================================================
# NUMERICAL TOLERANCES
# ====================================================================

CONSTRUCTION_TOLERANCE = 1e-12
ORACLE_TOLERANCE = 1e-9
RANK_RELATIVE_TOLERANCE = 1e-8
UNIT_MODULUS_TOLERANCE = 1e-12
COMPATIBILITY_TOLERANCE = 1e-15
TRACE_TOLERANCE = 1e-10


@dataclass(frozen=True)
class ToleranceConfig:
    """Tolerances applied by the numerical checks."""
    construction: float = CONSTRUCTION_TOLERANCE   # CK and unitality residuals
    oracle: float = ORACLE_TOLERANCE               # rho(x) vs rho(normal_form(x))
    rank_relative: float = RANK_RELATIVE_TOLERANCE  # singular value cutoff
    unit_modulus: float = UNIT_MODULUS_TOLERANCE   # |z| = 1 guard
    compatibility: float = COMPATIBILITY_TOLERANCE  # pi1z o theta1 = pi2 o theta2
    trace: float = TRACE_TOLERANCE                 # per-dimension entry trace bound

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ToleranceConfig":
        known = {k: float(v) for k, v in data.items() if k in cls.__dataclass_fields__}
        return cls(**known)


DEFAULT_TOLERANCES = ToleranceConfig()

# ====================================================================
# FAMILY PARAMETERS
# ====================================================================

# Truncation bound L on monomial lengths for separation checks
DEFAULT_TRUNCATION = 2

# Upper bound on m when searching for the smallest separating z-family
DEFAULT_ZCOUNT_SEARCH_LIMIT = 16

# Worker threads used to build per-z family members
MAX_PARALLEL_REPS = 4


def default_zcount(truncation: int) -> int:
    """Smallest z-count with the Laurent-degree guarantee for truncation L."""
    return 2 * truncation + 1

# ====================================================================
# EXIT CODES
# ====================================================================

class ExitCode(Enum):
    """Stable process exit codes of the command-line front end."""
    OK = 0
    IO = 1
    PARSE = 2
    PRECONDITION = 3
    DIGEST_MISMATCH = 4
    VERIFY_FAILED = 5
    NOT_RFD = 10

# ====================================================================
# LOGGING CONFIGURATION
# ====================================================================

LOG_LEVEL = "WARNING"
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

DEBUG_ENABLED = False
VERBOSE_LOGGING = False


def load_environment_config() -> None:
    """Load logging configuration from environment variables."""
    global DEBUG_ENABLED, VERBOSE_LOGGING, LOG_LEVEL

    DEBUG_ENABLED = os.environ.get("GRAPHRFD_DEBUG", "false").lower() == "true"
    VERBOSE_LOGGING = os.environ.get("GRAPHRFD_VERBOSE", "false").lower() == "true"

    if DEBUG_ENABLED:
        LOG_LEVEL = "DEBUG"
    elif VERBOSE_LOGGING:
        LOG_LEVEL = "INFO"
    else:
        LOG_LEVEL = os.environ.get("GRAPHRFD_LOG_LEVEL", LOG_LEVEL).upper()
