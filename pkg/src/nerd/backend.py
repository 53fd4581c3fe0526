"""Backend selection for the hot kernels.

Walk sampling and SGNS training exist twice: as numba ``@njit`` kernels and
as pure-numpy fallbacks. The ``NERD_BACKEND`` environment variable picks the
implementation at call time:

* ``NERD_BACKEND=numba``: require the numba kernels, fail if unavailable
* ``NERD_BACKEND=numpy``: force the numpy fallbacks
* unset or ``auto``: numba when importable, numpy otherwise
"""

import os

try:
    import numba  # noqa: F401

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False

_ENV_VAR = "NERD_BACKEND"


def use_numba() -> bool:
    """Resolve which backend the current call should take."""
    choice = os.environ.get(_ENV_VAR, "auto").strip().lower()
    if choice in ("", "auto"):
        return NUMBA_AVAILABLE
    if choice == "numba":
        if not NUMBA_AVAILABLE:
            raise RuntimeError(f"{_ENV_VAR}=numba but numba is not importable")
        return True
    if choice == "numpy":
        return False
    raise ValueError(f"unrecognized {_ENV_VAR} value: {choice!r}")
