"""Runtime backend selection and reproducible random-stream helpers.

Two environment variables control execution:

* ``MERIT_BACKEND`` — ``"numba"`` (default when numba imports) or ``"numpy"``
  to force the pure-NumPy/Python fallback path for the hot kernels.
* ``MERIT_THREADS`` — caps the worker-thread fan-out used by bulk drivers
  (e.g. the reference-table reproduction). Unset or ``0`` means "pick a
  small default".
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba

    _NUMBA_IMPORTABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    _NUMBA_IMPORTABLE = False


def _backend_from_env() -> str:
    choice = os.environ.get("MERIT_BACKEND", "").strip().lower()
    if choice in ("", "auto"):
        return "numba" if _NUMBA_IMPORTABLE else "numpy"
    if choice not in ("numba", "numpy"):
        raise ValueError(f"MERIT_BACKEND must be 'numba' or 'numpy', got {choice!r}")
    if choice == "numba" and not _NUMBA_IMPORTABLE:
        raise ValueError("MERIT_BACKEND=numba but numba is not importable")
    return choice


#: Backend chosen at import time; kernels consult this once.
BACKEND: str = _backend_from_env()

USE_NUMBA: bool = BACKEND == "numba"


def jit_kernel(func):
    """Compile ``func`` with numba when available, else return it unchanged.

    Kernels are written in scalar-loop style so the compiled and plain
    versions execute identical arithmetic.
    """
    if _NUMBA_IMPORTABLE:
        return numba.njit(cache=True)(func)
    return func


def thread_cap(default: int = 4) -> int:
    """Worker-thread limit from MERIT_THREADS (>=1)."""
    raw = os.environ.get("MERIT_THREADS", "").strip()
    if raw:
        cap = int(raw)
        if cap >= 1:
            return cap
    return max(1, min(default, os.cpu_count() or 1))


def substream(seed: int, *path: int) -> np.random.Generator:
    """Generator for the substream addressed by ``path`` under ``seed``.

    Streams are derived with ``SeedSequence`` spawn keys, so any unit of
    work (scenario, arm, replicate block) gets an independent stream that
    does not depend on evaluation order.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=path))
