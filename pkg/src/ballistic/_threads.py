"""Worker-count cap: BALLISTIC_THREADS limits the BLAS/OpenMP pools.

Imported before numpy so the environment variables take effect.
"""

import os

_CAP = os.environ.get("BALLISTIC_THREADS")
if _CAP:
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        os.environ.setdefault(var, _CAP)
