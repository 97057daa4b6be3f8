"""Shared numerical tolerances.

The spectral tolerance can be overridden with the ``RELEQ_TOL`` environment
variable; it is read at call time so tests and the CLI can change it.
"""

import os

#: default band for "purely imaginary" eigenvalues (normalized units)
DEFAULT_SPECTRAL_TOL = 1e-8

#: equality band for closed-form inequalities (f vs g, discriminants, alpha)
BOUNDARY_TOL = 1e-9

#: anything below this is treated as a collision distance
COLLISION_DISTANCE = 1e-300


def spectral_tol() -> float:
    raw = os.environ.get("RELEQ_TOL")
    if raw is None or raw.strip() == "":
        return DEFAULT_SPECTRAL_TOL
    value = float(raw)
    if not value > 0:
        raise ValueError(f"RELEQ_TOL must be positive, got {raw!r}")
    return value
