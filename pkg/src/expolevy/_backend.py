"""Select the compiled kernels when available, else the Python fallback.

Set EXPOLEVY_PURE=1 to force the fallback (used by the parity tests and
the benchmark).
"""

import os

if os.environ.get("EXPOLEVY_PURE", "") == "1":
    from . import _pykernels as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _pykernels as kernels

pfq_sum = kernels.pfq_sum
mc_paths = kernels.mc_paths
PFQ_CONVERGED = kernels.PFQ_CONVERGED
PFQ_TRUNCATED = kernels.PFQ_TRUNCATED
PFQ_MAX_TERMS = kernels.PFQ_MAX_TERMS
PFQ_DIVERGES_IMMEDIATELY = kernels.PFQ_DIVERGES_IMMEDIATELY


def backend_name() -> str:
    return kernels.BACKEND
