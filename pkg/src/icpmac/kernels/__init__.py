"""Backend dispatch for the hot scan kernels.

The compiled Cython backend is preferred when its extension module built;
otherwise (or when ICPMAC_PURE_PYTHON is set to a non-empty value other than
"0") the numpy fallback is used.  Both backends implement the same two
functions with identical decision semantics; `benchmarks/bench_kernels.py`
compares their speed.
"""

import os

import numpy as np

from . import _pure

_BACKENDS = {"pure": _pure}
try:
    from . import _scan as _compiled  # compiled extension, optional

    _BACKENDS["compiled"] = _compiled
except ImportError:
    _compiled = None

if os.environ.get("ICPMAC_PURE_PYTHON", "0") not in ("", "0"):
    _active = "pure"
else:
    _active = "compiled" if _compiled is not None else "pure"


def available_backends():
    return tuple(sorted(_BACKENDS))


def active_backend():
    return _active


def use_backend(name):
    """Switch the active backend; returns the previous one."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown kernel backend {name!r}; have {available_backends()}")
    prev = _active
    _active = name
    return prev


def _f64(x):
    return np.ascontiguousarray(x, dtype=np.float64)


def nearest_scan(signals, candidates, tie_tol):
    """For each signal row, index of the Euclidean-nearest candidate row.

    Ties within ``tie_tol`` of the minimum residual go to the smallest index;
    the second return value flags rows where such a tie occurred.
    """
    return _BACKENDS[_active].nearest_scan(_f64(signals), _f64(candidates), float(tie_tol))


def proj_scan(signals, basis, offsets, tie_tol):
    """For each signal row, index of the candidate subspace with the smallest
    least-squares residual.

    ``basis`` stacks orthonormal spanning rows of every candidate subspace;
    ``offsets`` (length S+1) delimits the blocks.  Tie handling as in
    ``nearest_scan``.
    """
    offsets = np.ascontiguousarray(offsets, dtype=np.intp)
    return _BACKENDS[_active].proj_scan(_f64(signals), _f64(basis), offsets, float(tie_tol))
