"""Pure numpy implementation of the batch scan kernels.

Semantics are shared with the compiled backend in ``_scan.pyx``: per signal
row, compute one residual per candidate, then take the first candidate whose
residual lies within ``tie_tol`` of the minimum (candidates are enumerated in
lexicographic subset order, so "first" is the lexicographic tie-break).
"""

import numpy as np


def _pick(res, tie_tol):
    rmin = res.min(axis=1)
    within = res <= rmin[:, None] + tie_tol
    best = within.argmax(axis=1).astype(np.intp)
    tie = (within.sum(axis=1) >= 2).astype(np.uint8)
    return best, tie


def nearest_scan(signals, candidates, tie_tol):
    """Nearest candidate per signal row.

    signals: (T, n), candidates: (S, n).  Returns (best, tie) with best[t]
    the index of the winning candidate and tie[t] set when two or more
    candidates are within tie_tol of the minimum distance.
    """
    d2 = (
        np.einsum("ti,ti->t", signals, signals)[:, None]
        - 2.0 * (signals @ candidates.T)
        + np.einsum("si,si->s", candidates, candidates)[None, :]
    )
    np.maximum(d2, 0.0, out=d2)
    return _pick(np.sqrt(d2), tie_tol)


def proj_scan(signals, basis, offsets, tie_tol):
    """Smallest least-squares residual per signal row.

    basis stacks orthonormal row blocks, one block per candidate subspace;
    offsets[s]:offsets[s+1] delimits block s.  The residual of projecting y
    onto subspace s is sqrt(||y||^2 - ||basis_s y||^2).
    """
    T = signals.shape[0]
    S = len(offsets) - 1
    ny2 = np.einsum("ti,ti->t", signals, signals)
    proj = basis @ signals.T  # (rank_total, T)
    proj *= proj
    r2 = np.empty((T, S))
    for s in range(S):
        lo, hi = offsets[s], offsets[s + 1]
        r2[:, s] = ny2 - proj[lo:hi].sum(axis=0) if hi > lo else ny2
    np.maximum(r2, 0.0, out=r2)
    return _pick(np.sqrt(r2), tie_tol)
