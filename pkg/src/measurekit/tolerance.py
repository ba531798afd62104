"""Library-wide numerical tolerance.

The default absolute tolerance is ``1e-12``.  Setting the environment variable
``MEASUREKIT_TOLERANCE`` before import overrides it.
"""

from __future__ import annotations

import os

DEFAULT_TOLERANCE = 1e-12


def _from_env() -> float:
    raw = os.environ.get("MEASUREKIT_TOLERANCE")
    if raw is None or raw.strip() == "":
        return DEFAULT_TOLERANCE
    value = float(raw)
    if not value > 0:
        raise ValueError(f"MEASUREKIT_TOLERANCE must be positive, got {raw!r}")
    return value


TOL = _from_env()

# looser bounds used where the inputs themselves are only known to this level
RELATION_TOL = 1e-9
EIGEN_TOL = 1e-10
ZERO_PROBABILITY = 1e-15
