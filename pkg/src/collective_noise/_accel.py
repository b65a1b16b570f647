"""Optional numba acceleration.

Set ``COLLECTIVE_NOISE_DISABLE_NUMBA=1`` to force the pure-numpy kernels.
When numba is not importable the numpy kernels are used as well.
"""

import os

_DISABLED = os.environ.get("COLLECTIVE_NOISE_DISABLE_NUMBA", "").strip().lower() in {
    "1", "true", "yes", "on"}

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

NUMBA_AVAILABLE = _numba is not None
NUMBA_ENABLED = NUMBA_AVAILABLE and not _DISABLED


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, otherwise the identity decorator.

    The decorated function is compiled regardless of the env flag so the
    benchmark can compare both paths; the flag only decides which one the
    library binds.
    """
    if NUMBA_AVAILABLE:
        return _numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f
