"""JIT switch for the hot kernels.

Set ``ALPHAREP_JIT=0`` in the environment to run the pure-numpy code paths
instead of the numba-compiled loops. The flag is read once at import time.
"""

import os

try:
    import numba as nb

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    HAVE_NUMBA = False

JIT_ENABLED = HAVE_NUMBA and os.environ.get("ALPHAREP_JIT", "1").strip().lower() not in (
    "0",
    "false",
    "no",
    "off",
)


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, otherwise the identity decorator."""
    if HAVE_NUMBA:
        return nb.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda func: func
