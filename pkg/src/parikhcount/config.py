"""Resource guards for the brute-force and dynamic-programming routes.

Each cap can be overridden through an environment variable; the value is
read at call time so tests and the CLI can adjust it per process.
"""

import os

ENUM_CAP_VAR = "PARIKH_ENUM_CAP"
DP_CAP_VAR = "PARIKH_DP_CAP"
BEST_C_CAP_VAR = "PARIKH_BEST_C_CAP"
COST_DP_CAP_VAR = "PARIKH_COST_DP_CAP"

DEFAULT_ENUM_CAP = 10
DEFAULT_DP_CAP = 10**7
DEFAULT_BEST_C_CAP = 64
DEFAULT_COST_DP_CAP = 10**7
BRUTE_EULER_EDGE_CAP = 12
UNARY_CFG_CAP = 10**4


def _read(var, default):
    raw = os.environ.get(var)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{var} must be an integer, got {raw!r}") from None
    if value < 0:
        raise ValueError(f"{var} must be non-negative, got {value}")
    return value


def enum_cap():
    """Maximum word length for enumeration-based counting."""
    return _read(ENUM_CAP_VAR, DEFAULT_ENUM_CAP)


def dp_cap():
    """Maximum number of sub-vectors of p for the lattice DP."""
    return _read(DP_CAP_VAR, DEFAULT_DP_CAP)


def best_c_cap():
    return _read(BEST_C_CAP_VAR, DEFAULT_BEST_C_CAP)


def cost_dp_cap():
    return _read(COST_DP_CAP_VAR, DEFAULT_COST_DP_CAP)
