"""Numba / numpy backend selection.

The hot inner loops (quadruplet count accumulation, passive kernel
bucketing) exist twice: a numba @njit version and a pure-numpy version.
The environment variable QUADHC_NUMBA picks the path:

    QUADHC_NUMBA=auto   use numba when importable (default)
    QUADHC_NUMBA=0      force the pure-numpy path
    QUADHC_NUMBA=1      require numba, raise if unavailable

Both paths produce bit-identical integer results; benchmarks/bench_backends.py
compares their speed.
"""

import os

_flag = os.environ.get("QUADHC_NUMBA", "auto").strip().lower()

_HAVE_NUMBA = False
if _flag in ("0", "off", "false", "numpy"):
    NUMBA_ENABLED = False
else:
    try:
        import numba  # noqa: F401

        _HAVE_NUMBA = True
    except ImportError:
        _HAVE_NUMBA = False
    if _flag in ("1", "on", "true", "require") and not _HAVE_NUMBA:
        raise ImportError("QUADHC_NUMBA=1 but numba is not installed")
    NUMBA_ENABLED = _HAVE_NUMBA


def backend_name() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"
