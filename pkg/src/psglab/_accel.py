"""JIT dispatch: numba-compiled hot kernels with a pure-numpy fallback.

Set the environment variable ``PSGLAB_NO_NUMBA=1`` (before import) to force
the numpy path even when numba is installed.  Modules with hot loops check
``HAVE_NUMBA`` and select between a compiled prange kernel and a vectorized
numpy implementation; both produce the same values to rounding.
"""

import os

NUMBA_DISABLED = os.environ.get("PSGLAB_NO_NUMBA", "").strip().lower() in ("1", "true", "yes")

# avoid the TBB-version warning on import; OpenMP layer is always available here
os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

try:
    if NUMBA_DISABLED:
        raise ImportError("disabled by PSGLAB_NO_NUMBA")
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False
    prange = range

    def njit(*args, **kwargs):
        # identity decorator: functions run interpreted (only used for the
        # scalar reference path; table/convolution use the numpy fallbacks)
        if len(args) == 1 and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


def using_numba():
    """True when hot kernels run compiled."""
    return HAVE_NUMBA
