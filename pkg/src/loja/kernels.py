"""Distance-scan backend, chosen once at import.

The compiled extension is used when it was built; otherwise (or when
``LOJA_PURE_PYTHON=1``) the numpy implementation takes over. Both expose the
same three functions with identical signatures.
"""

import os

from . import _pykernels

if os.environ.get("LOJA_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
        BACKEND = "python"

min_dists = _impl.min_dists
directed_hausdorff = _impl.directed_hausdorff
nearest_stats = _impl.nearest_stats
