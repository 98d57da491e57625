"""Kernel backend selection.

Hot numeric kernels (batched fixture evaluations) have two implementations:
a numba ``@njit`` loop version and a vectorized pure-numpy twin.  The active
backend is chosen once, at import time, from the environment variable
``ZOMINIMAX_BACKEND``:

* ``auto`` (default) -- use numba when importable, else fall back to numpy;
* ``numba``          -- require numba, raise if it is missing;
* ``numpy``          -- force the pure-numpy path.

Results are deterministic per backend; the two backends agree to floating
roundoff (last-bit differences from summation order).
"""

import os

_ENV_VAR = "ZOMINIMAX_BACKEND"
_choice = os.environ.get(_ENV_VAR, "auto").strip().lower()
if _choice not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"{_ENV_VAR} must be 'auto', 'numba' or 'numpy', got {_choice!r}"
    )

try:
    from numba import njit as _njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only on stripped installs
    _njit = None
    NUMBA_AVAILABLE = False

if _choice == "numba" and not NUMBA_AVAILABLE:
    raise ImportError(f"{_ENV_VAR}=numba but numba is not importable")

USING_NUMBA = NUMBA_AVAILABLE and _choice != "numpy"


def njit_kernel(func):
    """Compile ``func`` with numba when available, else return it unchanged.

    Only used to build the numba variants in ``_kernels``; callers never see
    an uncompiled loop version unless numba itself is absent.
    """
    if _njit is None:
        return func
    return _njit(cache=True, nogil=True)(func)


def backend_name() -> str:
    return "numba" if USING_NUMBA else "numpy"
