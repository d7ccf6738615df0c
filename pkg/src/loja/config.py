"""Global tolerances.

All set comparisons in the package are "within tol_pt". ``LOJA_TOL`` in the
environment overrides the fit tolerance.
"""

import os

TOL_PT = 1e-9
TOL_G = 1e-12
C_FLOOR = 1e-12
TOL_POLE = 1e-12
SPHERE_DIAM = 2.0


def tol_fit() -> float:
    raw = os.environ.get("LOJA_TOL")
    if raw is None or raw.strip() == "":
        return 1e-9
    return float(raw)
