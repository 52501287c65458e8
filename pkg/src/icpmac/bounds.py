"""Closed-form error-probability bounds and the zero-rate error exponent.

Five evaluators:

* ``shannon_bound``   -- classical zero-rate converse for m >= 3 messages on
  a point-to-point Gaussian channel with per-codeword energy n*P:
  0.5 * Phi(-sqrt(m/(4(m-2)) * n*P/2)).
* ``prop1_bound``     -- the same expression with the effective power
  P + d/2 produced by the per-environment split (n*P/2, n*(P+d)/2).
* ``error_exponent``  -- the optimal zero-rate decay rate m/(4(m-1)) * P,
  valid from m = 2.
* ``fano1_bound``     -- Fano-type converse for random designs whose
  environment-2 variance is inflated by sigma_d^2.
* ``fano2_bound``     -- Fano-type converse for deterministic unit-energy
  designs whose environment-2 rows are shifted by mu_d.

Fano expressions use natural logarithms throughout and may fall outside
[0, 1]; probability-type values are clamped with the event recorded on the
returned BoundValue (``raw`` keeps the unclamped number).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BoundDomainError, ParameterError


@dataclass(frozen=True)
class BoundQuery:
    """Parameter bundle for the Fano-type evaluators.

    gains is the full length-k gain vector; t_set selects (zero-based) which
    gain positions enter the bound.  power/d/mean_env2 are carried for
    provenance: the Fano forms fix unit noise and depend only on var_surplus
    (environment-2 variance excess), mean_shift (environment-2 additive
    shift) and entry_sum (the sum of all codebook entries).
    """

    m: int
    n: int
    k: int
    gains: tuple[float, ...] = ()
    t_set: tuple[int, ...] = ()
    power: float = 0.0
    d: float = 0.0
    var_surplus: float = 0.0
    mean_env2: float = 0.0
    mean_shift: float = 0.0
    entry_sum: float = 0.0


@dataclass(frozen=True)
class BoundValue:
    value: float
    formula_id: str
    clamped: bool = False
    raw: float = 0.0


def _clamped_probability(raw: float, formula_id: str) -> BoundValue:
    value = min(1.0, max(0.0, raw))
    return BoundValue(value=value, formula_id=formula_id, clamped=(value != raw), raw=raw)


def _std_normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def shannon_bound(m: int, n: int, power: float) -> BoundValue:
    """0.5 * Phi(-sqrt(m/(4(m-2)) * n*power/2)); needs m >= 3.

    n=0 is accepted (it gives the no-data value 0.25), which is convenient
    for limit checks.
    """
    raw = _point_to_point(m, n, power)
    return _clamped_probability(raw, "shannon")


def prop1_bound(m: int, n: int, power: float, d: float) -> BoundValue:
    """Two-environment variant: the half/half power split (n*P/2 and
    n*(P+d)/2 per environment) caps total codeword energy at n*(P + d/2),
    so the point-to-point expression applies with that effective power."""
    if d < 0:
        raise ParameterError(f"environment power surplus d={d} must be >= 0")
    raw = _point_to_point(m, n, power + d / 2.0)
    return _clamped_probability(raw, "prop1")


def _point_to_point(m: int, n: int, power: float) -> float:
    if m < 3:
        raise BoundDomainError(
            f"the zero-rate converse has an m-2 denominator and needs m >= 3, got m={m}"
        )
    if n < 0:
        raise ParameterError(f"sample count n={n} must be >= 0")
    if power <= 0:
        raise ParameterError(f"power budget P={power} must be > 0")
    arg = math.sqrt(m / (4.0 * (m - 2)) * n * power / 2.0)
    return 0.5 * _std_normal_cdf(-arg)


def error_exponent(m: int, power: float) -> BoundValue:
    """Optimal zero-rate decay rate m/(4(m-1)) * power, defined for m >= 2."""
    if m < 2:
        raise BoundDomainError(f"the error exponent needs m >= 2 messages, got m={m}")
    if power <= 0:
        raise ParameterError(f"power budget P={power} must be > 0")
    value = m / (4.0 * (m - 1)) * power
    return BoundValue(value=value, formula_id="exponent", clamped=False, raw=value)


def _fano_common(q: BoundQuery):
    if q.k < 1:
        raise ParameterError(f"k={q.k} must be >= 1")
    if q.n < 1:
        raise ParameterError(f"n={q.n} must be >= 1")
    if len(q.gains) != q.k:
        raise ParameterError(f"need {q.k} gains, got {len(q.gains)}")
    t = tuple(q.t_set)
    if not t:
        raise ParameterError("t_set must be nonempty")
    if len(set(t)) != len(t) or any(not 0 <= j < q.k for j in t):
        raise ParameterError(f"t_set {t} must be distinct zero-based positions below k={q.k}")
    if q.m <= q.k:
        raise BoundDomainError(
            f"log C(m, k) vanishes when m <= k (m={q.m}, k={q.k}); the bound is undefined"
        )
    a = sum(q.gains[j] ** 2 for j in t)
    b = math.log(math.comb(q.m, q.k))
    tsize = len(t)
    # product over q = 0..|T|-1 of (m - (k - |T|) - q); positive since m > k
    log_prod = sum(math.log(q.m - (q.k - tsize) - i) for i in range(tsize))
    c_n = math.log(math.factorial(q.k)) + 1.0 + q.n * (tsize * math.log(q.m) - log_prod)
    return a, b, c_n, tsize


def fano1_bound(q: BoundQuery) -> BoundValue:
    """Fano-type converse for independent random designs (unit variance in
    environment 1, variance 1 + var_surplus in environment 2)."""
    if q.var_surplus < 0:
        raise ParameterError(f"var_surplus={q.var_surplus} must be >= 0")
    a, b, c_n, tsize = _fano_common(q)
    log_term = math.log((a + 1.0) * ((1.0 + q.var_surplus) * a + 1.0))
    raw = (tsize * math.log(q.m) - q.n / 4.0 * log_term - c_n) / b
    return _clamped_probability(raw, "fano1")


def fano2_bound(q: BoundQuery) -> BoundValue:
    """Fano-type converse for deterministic unit-energy designs whose
    environment-2 rows are shifted by mean_shift.

    Uses tau = (sum of selected gains)^2/(m-1) and
    eta = 1 + mean_shift^2 + 2*mean_shift/(n*m) * entry_sum, where entry_sum
    totals every entry of the (pre-shift) design matrix.
    """
    a, b, c_n, tsize = _fano_common(q)
    t = tuple(q.t_set)
    tau = sum(q.gains[j] * q.gains[i] for j in t for i in t) / (q.m - 1)
    eta = 1.0 + q.mean_shift**2 + 2.0 * q.mean_shift / (q.n * q.m) * q.entry_sum
    arg1 = (a + tau) + 1.0
    arg2 = eta * (a + tau) + 1.0
    if arg1 <= 0.0:
        raise BoundDomainError(f"log argument (a + tau) + 1 = {arg1} is not positive")
    if arg2 <= 0.0:
        raise BoundDomainError(f"log argument eta*(a + tau) + 1 = {arg2} is not positive")
    raw = (
        tsize * math.log(q.m) - q.n / 4.0 * math.log(arg1) - q.n / 4.0 * math.log(arg2) - c_n
    ) / b
    return _clamped_probability(raw, "fano2")
