"""Simplified invariance-test baselines.

Two classical ways to test a candidate set for invariance across the two
environments, each iterated over all k-subsets:

* ``icp_coefficient_test`` fits a separate regression per environment and
  tests every coefficient for equality across environments (two-sample
  z-tests, noise variance known).
* ``icp_residual_test`` fits one pooled regression and tests, per
  environment, that the residuals have mean zero (t-test) and variance equal
  to the known noise variance (two-sided chi-square test).

The returned estimate is the intersection of all accepted subsets (the empty
set when nothing is accepted), so unlike the channel decoders it may have any
size; exact equality with the true support is the success criterion.

These are deliberately plain z/t/chi-square replications, not the original
invariance test statistics; comparisons against them are qualitative.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .codebook import Codebook
from .decoders import DecodeOutcome, _signal_vector
from .errors import ParameterError

_PINV_RTOL = 1e-10


@dataclass(frozen=True)
class IcpTestConfig:
    """Significance level, known noise variance, and Bonferroni divisor.

    combine=None divides alpha by the natural test count (k coefficient
    tests, or 4 residual tests); set it to override the correction.
    """

    alpha: float = 0.05
    noise_var: float = 1.0
    combine: int | None = None

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ParameterError(f"alpha={self.alpha} must lie in (0, 1)")
        if self.noise_var <= 0:
            raise ParameterError(f"noise_var={self.noise_var} must be > 0")
        if self.combine is not None and self.combine < 1:
            raise ParameterError(f"combine={self.combine} must be >= 1")


def _env_rows(n):
    half = n // 2
    return slice(0, half), slice(half, n)


def _check_inputs(codebook: Codebook, k: int):
    if k < 1 or k > codebook.m:
        raise ParameterError(f"need 1 <= k <= m, got k={k}, m={codebook.m}")
    if codebook.n // 2 < k + 2:
        raise ParameterError(
            f"each environment needs >= k+2 samples, got n/2={codebook.n // 2}, k={k}"
        )


def _intersect(accepted):
    if not accepted:
        return ()
    common = set(accepted[0])
    for sub in accepted[1:]:
        common &= set(sub)
    return tuple(sorted(common))


def icp_coefficient_test(y, codebook: Codebook, k: int, cfg: IcpTestConfig) -> DecodeOutcome:
    """Accept subsets whose per-environment regression coefficients agree.

    For each k-subset, coefficients are fit by least squares separately per
    environment; each coefficient difference is z-tested with variance
    noise_var * diag((X_e' X_e)^+) summed over environments, at level
    alpha/k (Bonferroni over the k coefficients).
    """
    y = _signal_vector(y)
    _check_inputs(codebook, k)
    level = cfg.alpha / (cfg.combine if cfg.combine is not None else k)
    e1, e2 = _env_rows(codebook.n)

    accepted = []
    for sub in itertools.combinations(range(codebook.m), k):
        coef = []
        var = []
        for rows in (e1, e2):
            design = codebook.entries[rows][:, sub]
            c, _, _, _ = np.linalg.lstsq(design, y[rows], rcond=_PINV_RTOL)
            gram_inv = np.linalg.pinv(design.T @ design, rcond=_PINV_RTOL, hermitian=True)
            coef.append(c)
            var.append(cfg.noise_var * np.diag(gram_inv))
        diff = coef[0] - coef[1]
        se = np.sqrt(var[0] + var[1])
        ok = True
        for j in range(k):
            if se[j] == 0.0:
                if diff[j] != 0.0:
                    ok = False
                    break
                continue
            pval = 2.0 * stats.norm.sf(abs(diff[j]) / se[j])
            if pval <= level:
                ok = False
                break
        if ok:
            accepted.append(sub)

    return DecodeOutcome(
        est_support=_intersect(accepted),
        accepted=tuple(accepted),
    )


def icp_residual_test(y, codebook: Codebook, k: int, cfg: IcpTestConfig) -> DecodeOutcome:
    """Accept subsets whose pooled-fit residuals look like the known noise in both environments.

    Four tests per subset (2 environments x {mean, variance}), each at level
    alpha/4: a one-sample t-test of zero residual mean and a two-sided
    chi-square test of residual variance against noise_var.
    """
    y = _signal_vector(y)
    _check_inputs(codebook, k)
    level = cfg.alpha / (cfg.combine if cfg.combine is not None else 4)
    e1, e2 = _env_rows(codebook.n)

    accepted = []
    residual_norms = {}
    for sub in itertools.combinations(range(codebook.m), k):
        design = codebook.entries[:, sub]
        coef, _, _, _ = np.linalg.lstsq(design, y, rcond=_PINV_RTOL)
        resid = y - design @ coef
        residual_norms[sub] = float(np.linalg.norm(resid))
        ok = True
        for rows in (e1, e2):
            r = resid[rows]
            ne = r.size
            mean = r.mean()
            sd = r.std(ddof=1)
            if sd == 0.0:
                tstat = 0.0 if mean == 0.0 else np.inf
            else:
                tstat = mean / (sd / np.sqrt(ne))
            p_mean = 2.0 * stats.t.sf(abs(tstat), df=ne - 1)
            chi = (ne - 1) * r.var(ddof=1) / cfg.noise_var
            p_var = 2.0 * min(stats.chi2.cdf(chi, df=ne - 1), stats.chi2.sf(chi, df=ne - 1))
            if p_mean <= level or p_var <= level:
                ok = False
                break
        if ok:
            accepted.append(sub)

    return DecodeOutcome(
        est_support=_intersect(accepted),
        residuals=residual_norms,
        accepted=tuple(accepted),
    )
