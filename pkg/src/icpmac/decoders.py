"""Support estimators for the shared-codebook channel.

Three estimators, in decreasing order of side information:

* ``mdd``            -- gains known: pick the k-subset whose gain-weighted
  column sum is Euclidean-closest to the received signal.
* ``ols_mdd``        -- gains unknown: per subset, fit least squares over the
  pooled n samples and pick the subset with the smallest residual norm.
* ``variance_match_decode`` -- k=1 heuristic: estimate the gain magnitude by
  matching received power against each column's sample variance, then accept
  columns whose sign-corrected residual power is consistent with the noise
  floor.

All decoders enumerate candidate subsets in lexicographic order and break
residual ties (within TIE_TOL) toward the lexicographically smallest subset.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .channel import ReceivedSignal
from .codebook import Codebook
from .errors import ParameterError

#: absolute tolerance on residual norms below which subsets count as tied
TIE_TOL = 1e-12
#: relative singular-value cutoff for rank decisions in least squares
RANK_RTOL = 1e-10


@dataclass(frozen=True)
class DecodeOutcome:
    """Result of one decode: the estimated support plus diagnostics.

    residuals maps each scanned subset to its comparison statistic (the
    residual 2-norm for mdd/ols_mdd; the per-sample residual power for the
    variance-matching heuristic).  est_gains is None when the decoder did not
    produce gain estimates.
    """

    est_support: tuple[int, ...]
    est_gains: tuple[float, ...] | None = None
    residuals: dict = field(default_factory=dict)
    tie_broken: bool = False
    skipped: tuple[int, ...] = ()
    fallback: str | None = None
    accepted: tuple[tuple[int, ...], ...] | None = None


def _signal_vector(y) -> np.ndarray:
    if isinstance(y, ReceivedSignal):
        return y.y
    return np.asarray(y, dtype=np.float64)


def _pick_winner(subsets, res):
    rmin = res.min()
    within = res <= rmin + TIE_TOL
    best = int(np.argmax(within))
    return subsets[best], best, bool(within.sum() >= 2)


def _scan_known_gains(y, codebook, gains, k):
    subsets = list(itertools.combinations(range(codebook.m), k))
    g = np.asarray(gains, dtype=np.float64)
    res = np.empty(len(subsets))
    for s, sub in enumerate(subsets):
        res[s] = np.linalg.norm(y - codebook.entries[:, sub] @ g)
    return subsets, res


def mdd(y, codebook: Codebook, gains, k: int) -> DecodeOutcome:
    """Minimum distance decoding with known gains.

    gains has length k and applies positionally to each sorted candidate
    subset.  Scans all C(m, k) subsets; never reads the noise level.
    """
    y = _signal_vector(y)
    _check_k(codebook, k)
    gains = tuple(float(g) for g in gains)
    if len(gains) != k:
        raise ParameterError(f"need {k} gains, got {len(gains)}")
    subsets, res = _scan_known_gains(y, codebook, gains, k)
    winner, best, tied = _pick_winner(subsets, res)
    return DecodeOutcome(
        est_support=winner,
        est_gains=None,
        residuals=dict(zip(subsets, res.tolist())),
        tie_broken=tied,
    )


def ols_mdd(y, codebook: Codebook, k: int, pinned_gains=None) -> DecodeOutcome:
    """Least-squares subset scan: fit gains per subset, keep the smallest residual.

    Per k-subset S the coefficients minimize ||y - X_S g|| over the pooled n
    samples (minimum-norm solution when X_S is rank deficient).  With
    pinned_gains given, estimation is skipped and the scan reduces exactly to
    ``mdd`` with those gains.
    """
    y = _signal_vector(y)
    _check_k(codebook, k)
    if pinned_gains is not None:
        pinned_gains = tuple(float(g) for g in pinned_gains)
        if len(pinned_gains) != k:
            raise ParameterError(f"need {k} pinned gains, got {len(pinned_gains)}")
        subsets, res = _scan_known_gains(y, codebook, pinned_gains, k)
        winner, best, tied = _pick_winner(subsets, res)
        return DecodeOutcome(
            est_support=winner,
            est_gains=pinned_gains,
            residuals=dict(zip(subsets, res.tolist())),
            tie_broken=tied,
        )
    if codebook.n <= k:
        raise ParameterError(f"least squares needs n > k, got n={codebook.n}, k={k}")
    subsets = list(itertools.combinations(range(codebook.m), k))
    res = np.empty(len(subsets))
    coefs = []
    for s, sub in enumerate(subsets):
        design = codebook.entries[:, sub]
        coef, _, _, _ = np.linalg.lstsq(design, y, rcond=RANK_RTOL)
        coefs.append(coef)
        res[s] = np.linalg.norm(y - design @ coef)
    winner, best, tied = _pick_winner(subsets, res)
    return DecodeOutcome(
        est_support=winner,
        est_gains=tuple(coefs[best].tolist()),
        residuals=dict(zip(subsets, res.tolist())),
        tie_broken=tied,
    )


def variance_match_decode(
    y,
    codebook: Codebook,
    noise_var: float,
    epsilon: float = 0.1,
    rng: np.random.Generator | None = None,
) -> DecodeOutcome:
    """Single-sender heuristic: gain from power matching, acceptance by residual power.

    For column j with sample variance s2_j, the gain magnitude estimate is
    g_j = sqrt(| ||y||^2/n - noise_var | / s2_j); column j is accepted if for
    either sign q the per-sample residual power (1/n)||y -+ g_j x_j||^2 stays
    below noise_var + epsilon^2 s2_j.  A unique accepted column is the
    estimate; otherwise one index is drawn uniformly from the accepted set
    (or from all m columns when none were accepted).  Zero-variance columns
    cannot carry a gain estimate and are skipped.
    """
    y = _signal_vector(y)
    n, m = codebook.n, codebook.m
    if n < 2:
        raise ParameterError(f"need n >= 2 samples, got n={n}")
    if epsilon <= 0:
        raise ParameterError(f"epsilon={epsilon} must be > 0")
    if noise_var < 0:
        raise ParameterError(f"noise_var={noise_var} must be >= 0")
    if rng is None:
        raise ParameterError("rng is required: the fallback pick is randomized")

    cols = codebook.entries
    s2 = cols.var(axis=0, ddof=1)
    constant = np.ptp(cols, axis=0) == 0.0  # exactly constant column => no variance signal
    power_gap = abs(float(y @ y) / n - noise_var)

    skipped = []
    accepted = []
    stats = {}
    signed_gain = {}
    for j in range(m):
        if s2[j] <= 0.0 or constant[j]:
            skipped.append(j)
            continue
        g = np.sqrt(power_gap / s2[j])
        stat_by_sign = {
            sign: float(((y - sign * g * cols[:, j]) ** 2).sum()) / n for sign in (-1.0, 1.0)
        }
        sign = min(stat_by_sign, key=stat_by_sign.get)
        stats[(j,)] = stat_by_sign[sign]
        signed_gain[j] = float(sign * g)
        if stat_by_sign[sign] <= noise_var + epsilon**2 * s2[j]:
            accepted.append(j)

    if len(accepted) == 1:
        est = accepted[0]
        fallback = None
    elif not accepted:
        est = int(rng.integers(m))
        fallback = "none_accepted"
    else:
        est = accepted[int(rng.integers(len(accepted)))]
        fallback = "multiple_accepted"

    gains = (signed_gain[est],) if est in signed_gain else None
    return DecodeOutcome(
        est_support=(est,),
        est_gains=gains,
        residuals=stats,
        skipped=tuple(skipped),
        fallback=fallback,
        accepted=tuple((j,) for j in accepted),
    )


def _check_k(codebook: Codebook, k: int):
    if k < 1:
        raise ParameterError(f"k={k} must be >= 1")
    if k > codebook.m:
        raise ParameterError(f"k={k} exceeds codeword count m={codebook.m}")
