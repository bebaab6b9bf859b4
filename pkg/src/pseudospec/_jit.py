"""Optional numba acceleration.

The hot kernels in :mod:`pseudospec.kernels` exist twice: an ``@njit`` loop
version and a vectorized numpy version. The numba path is used when numba
imports and ``PSEUDOSPEC_DISABLE_JIT`` is unset (or falsy). The flag is read
on every call so tests and benchmarks can flip it at runtime.
"""

import os
import warnings

try:
    import numba
except ImportError:  # pragma: no cover - numba is optional
    numba = None

# numba probes an old system TBB on first parallel launch and warns; the
# fallback threading layer is fine for us
warnings.filterwarnings("ignore", message="The TBB threading layer", module="numba")

HAVE_NUMBA = numba is not None

_FALSY = ("", "0", "false", "no", "off")


def jit_enabled() -> bool:
    flag = os.environ.get("PSEUDOSPEC_DISABLE_JIT", "").strip().lower()
    return HAVE_NUMBA and flag in _FALSY


def backend_name() -> str:
    return "numba" if jit_enabled() else "numpy"


def env_budget(default: int) -> int:
    """Enumeration budget, overridable through ``PSEUDOSPEC_BUDGET``."""
    raw = os.environ.get("PSEUDOSPEC_BUDGET", "").strip()
    if not raw:
        return default
    try:
        value = int(float(raw))
    except ValueError:
        from .errors import InputError

        raise InputError(f"PSEUDOSPEC_BUDGET must be an integer, got {raw!r}") from None
    if value < 1:
        from .errors import InputError

        raise InputError(f"PSEUDOSPEC_BUDGET must be positive, got {value}")
    return value
