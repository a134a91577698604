"""Kernel backend selection.

The per-step inner loops (tridiagonal solves, theta selection, flux
updates) exist twice: a numba ``@njit`` version and a vectorized NumPy
version.  The environment variable ``MOVINGMESH_NUMBA`` picks one:

* unset or ``auto`` -- use numba when it imports, NumPy otherwise;
* ``1`` / ``on``    -- require numba (ImportError if missing);
* ``0`` / ``off``   -- force the pure-NumPy path.
"""

import os

ENV_VAR = "MOVINGMESH_NUMBA"


def _resolve() -> str:
    raw = os.environ.get(ENV_VAR, "auto").strip().lower()
    if raw in ("0", "off", "false", "no", "numpy"):
        return "numpy"
    if raw in ("1", "on", "true", "yes", "numba"):
        return "numba"
    if raw in ("", "auto", "default"):
        try:
            import numba  # noqa: F401
        except ImportError:
            return "numpy"
        return "numba"
    raise ValueError(
        f"unrecognised {ENV_VAR}={raw!r}: expected 'numba', 'numpy' or 'auto'"
    )


BACKEND = _resolve()


def using_numba() -> bool:
    return BACKEND == "numba"
