"""Seeded Monte Carlo harness and the five figure presets.

Determinism contract: every trial draws from its own substream
SeedSequence(master_seed, spawn_key=(point_index, trial)), and decoders that
randomize (the variance-matching fallback, the "random" reference decoder)
get SeedSequence(master_seed, spawn_key=(point_index, trial, decoder_index)).
Results therefore depend only on the spec, never on worker count or
execution order.

Per trial: draw the true support, draw the codebook (random designs are
resampled every trial; deterministic families are built once per grid
point), transmit, decode, and count an error unless the estimated support
equals the true one exactly.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import kernels
from .bounds import prop1_bound, shannon_bound
from .channel import ChannelConfig, draw_support, transmit
from .codebook import (
    Codebook,
    make_inter,
    make_simplex,
    make_uniform,
    sample_random_uniform_env,
)
from .decoders import RANK_RTOL, TIE_TOL, mdd, ols_mdd, variance_match_decode
from .errors import IcpmacError, ParameterError
from .icp_baselines import IcpTestConfig, icp_coefficient_test, icp_residual_test

DECODERS = ("mdd", "ols_mdd", "variance_match", "icp_coeff", "icp_resid", "oracle", "random")
CODEBOOK_KINDS = ("simplex", "uniform", "interpolated", "random_uniform_env")

#: two-sided 95% normal quantile used by the Wilson interval
Z95 = float(stats.norm.ppf(0.975))

CSV_COLUMNS = (
    "figure,decoder,codebook,m,k,P,d,a,n,trials,errors,p_err,ci_lo,ci_hi,"
    "bound_shannon,bound_prop1,seed"
)


class TrialFailure(IcpmacError):
    """A decoder or codebook raised during a Monte Carlo trial."""


@dataclass(frozen=True)
class GridPoint:
    n: int
    k: int = 1
    a: float | None = None
    d: float | None = None


@dataclass(frozen=True)
class ExperimentSpec:
    codebook_kind: str
    decoders: tuple[str, ...]
    m: int
    power: float
    grid: tuple[GridPoint, ...]
    trials: int = 1000
    master_seed: int = 0
    noise_var: float = 1.0
    gains: tuple[float, ...] | None = None
    epsilon: float = 0.1
    alpha: float = 0.05
    bounds: tuple[str, ...] = ()
    figure: int | None = None

    def __post_init__(self):
        if self.codebook_kind not in CODEBOOK_KINDS:
            raise ParameterError(f"unknown codebook kind {self.codebook_kind!r}")
        if not self.decoders:
            raise ParameterError("need at least one decoder")
        for dec in self.decoders:
            if dec not in DECODERS:
                raise ParameterError(f"unknown decoder {dec!r}; have {DECODERS}")
        if self.trials < 1:
            raise ParameterError(f"trials={self.trials} must be >= 1")
        if not self.grid:
            raise ParameterError("grid must be nonempty")


@dataclass(frozen=True)
class PointResult:
    decoder: str
    point: GridPoint
    trials: int
    errors: int
    p_err: float
    ci_lo: float
    ci_hi: float
    seed: int
    wall_time: float = field(compare=False, default=0.0)

    @property
    def std_err(self) -> float:
        return float(np.sqrt(self.p_err * (1.0 - self.p_err) / self.trials))


def wilson_interval(errors: int, trials: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion; well behaved at p=0."""
    if not 0 <= errors <= trials:
        raise ParameterError(f"need 0 <= errors <= trials, got {errors}/{trials}")
    p = errors / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denom
    half = z * np.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)) / denom
    return float(center - half), float(center + half)


def _trial_rng(master_seed: int, point_index: int, trial: int, decoder_index: int | None = None):
    key = (point_index, trial) if decoder_index is None else (point_index, trial, decoder_index)
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=key))


def _fixed_codebook(spec: ExperimentSpec, point: GridPoint) -> Codebook | None:
    kind = spec.codebook_kind
    if kind == "simplex":
        return make_simplex(point.n, spec.m, spec.power)
    if kind == "uniform":
        return make_uniform(point.n, spec.m, spec.power)
    if kind == "interpolated":
        if point.a is None:
            raise ParameterError("interpolated codebook needs the grid point to carry a")
        return make_inter(point.n, spec.m, spec.power, point.a)
    return None  # random_uniform_env: resampled per trial


def _gains(spec: ExperimentSpec, k: int) -> tuple[float, ...]:
    if spec.gains is None:
        return (1.0,) * k
    if len(spec.gains) != k:
        raise ParameterError(f"spec.gains has {len(spec.gains)} entries but k={k}")
    return spec.gains


def _generate_trials(spec: ExperimentSpec, point: GridPoint, point_index: int):
    """Per-trial data (supports, codebooks, received matrix), one substream per trial."""
    m, k, trials = spec.m, point.k, spec.trials
    gains = _gains(spec, k)
    fixed = _fixed_codebook(spec, point)
    if fixed is None and point.d is None:
        raise ParameterError("random_uniform_env needs the grid point to carry d")
    supports = np.empty((trials, k), dtype=np.intp)
    signals = np.empty((trials, point.n))
    books = [] if fixed is None else None
    for t in range(trials):
        rng = _trial_rng(spec.master_seed, point_index, t)
        sup = draw_support(m, k, rng)
        supports[t] = sup
        book = fixed
        if book is None:
            book = sample_random_uniform_env(point.n, m, spec.power, point.d, rng)
            books.append(book)
        sig = transmit(book, ChannelConfig(sup, gains, spec.noise_var), rng)
        signals[t] = sig.y
    return supports, signals, fixed, books, gains


def _batch_candidates(book: Codebook, k: int, gains) -> tuple[list, np.ndarray]:
    subsets = list(itertools.combinations(range(book.m), k))
    g = np.asarray(gains)
    cand = np.stack([book.entries[:, sub] @ g for sub in subsets])
    return subsets, cand


def _batch_bases(book: Codebook, k: int) -> tuple[list, np.ndarray, np.ndarray]:
    """Orthonormal spanning rows per candidate subset, stacked for proj_scan."""
    subsets = list(itertools.combinations(range(book.m), k))
    blocks = []
    offsets = [0]
    for sub in subsets:
        design = book.entries[:, sub]
        u, s, _ = np.linalg.svd(design, full_matrices=False)
        rank = int((s > (s[0] * RANK_RTOL if s.size else 0.0)).sum())
        blocks.append(u[:, :rank].T)
        offsets.append(offsets[-1] + rank)
    basis = np.vstack(blocks) if offsets[-1] else np.empty((0, book.n))
    return subsets, basis, np.asarray(offsets, dtype=np.intp)


def _decode_batch(decoder, spec, point, supports, signals, book, gains) -> int:
    if decoder == "mdd":
        subsets, cand = _batch_candidates(book, point.k, gains)
        best, _ = kernels.nearest_scan(signals, cand, TIE_TOL)
    else:
        subsets, basis, offsets = _batch_bases(book, point.k)
        best, _ = kernels.proj_scan(signals, basis, offsets, TIE_TOL)
    est = np.asarray(subsets, dtype=np.intp)[best]
    return int((est != supports).any(axis=1).sum())


def _decode_one(decoder, decoder_index, spec, point, point_index, trial, y, book, sup, gains):
    if decoder == "mdd":
        return mdd(y, book, gains, point.k).est_support
    if decoder == "ols_mdd":
        return ols_mdd(y, book, point.k).est_support
    if decoder == "variance_match":
        if point.k != 1:
            raise ParameterError("variance_match handles k=1 only")
        rng = _trial_rng(spec.master_seed, point_index, trial, decoder_index)
        return variance_match_decode(y, book, spec.noise_var, spec.epsilon, rng).est_support
    if decoder == "icp_coeff":
        cfg = IcpTestConfig(alpha=spec.alpha, noise_var=spec.noise_var)
        return icp_coefficient_test(y, book, point.k, cfg).est_support
    if decoder == "icp_resid":
        cfg = IcpTestConfig(alpha=spec.alpha, noise_var=spec.noise_var)
        return icp_residual_test(y, book, point.k, cfg).est_support
    if decoder == "oracle":
        return sup
    if decoder == "random":
        rng = _trial_rng(spec.master_seed, point_index, trial, decoder_index)
        return tuple(sorted(int(i) for i in rng.choice(spec.m, size=point.k, replace=False)))
    raise ParameterError(f"unknown decoder {decoder!r}")


def run_point(spec: ExperimentSpec, point: GridPoint, point_index: int) -> list[PointResult]:
    """All decoder series of the spec at one grid point."""
    start = time.perf_counter()
    supports, signals, fixed, books, gains = _generate_trials(spec, point, point_index)
    results = []
    for decoder_index, decoder in enumerate(spec.decoders):
        if decoder in ("mdd", "ols_mdd") and fixed is not None:
            errors = _decode_batch(decoder, spec, point, supports, signals, fixed, gains)
        else:
            errors = 0
            for t in range(spec.trials):
                book = fixed if fixed is not None else books[t]
                sup = tuple(int(i) for i in supports[t])
                try:
                    est = _decode_one(
                        decoder, decoder_index, spec, point, point_index, t,
                        signals[t], book, sup, gains,
                    )
                except ParameterError:
                    raise
                except Exception as exc:
                    raise TrialFailure(
                        f"decoder {decoder!r} failed at grid point {point_index}, trial {t}: {exc}"
                    ) from exc
                errors += est != sup
        lo, hi = wilson_interval(errors, spec.trials)
        results.append(
            PointResult(
                decoder=decoder,
                point=point,
                trials=spec.trials,
                errors=errors,
                p_err=errors / spec.trials,
                ci_lo=lo,
                ci_hi=hi,
                seed=spec.master_seed,
                wall_time=time.perf_counter() - start,
            )
        )
    return results


def run_experiment(spec: ExperimentSpec, jobs: int = 1) -> list[PointResult]:
    """Run every grid point; output order is (grid order, decoder order).

    jobs > 1 farms grid points out to worker processes; the substream
    discipline keeps the results identical to a serial run.
    """
    if jobs <= 1:
        out = []
        for i, point in enumerate(spec.grid):
            out.extend(run_point(spec, point, i))
        return out
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(run_point, spec, point, i) for i, point in enumerate(spec.grid)]
        out = []
        for fut in futures:
            out.extend(fut.result())
        return out


# ---------------------------------------------------------------------------
# Figure presets

N_GRID = tuple(range(20, 201, 20))
A_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)
_FIGURES = (1, 2, 3, 4, 5)


def figure_preset(
    figure: int,
    trials: int | None = None,
    master_seed: int = 0,
    m: int | None = None,
) -> ExperimentSpec:
    """Experiment spec reproducing one of the five standard figures.

    1. invariance-test baselines (plus the known-gain reference decoder)
       against the split-power bound, random uniform designs with d=1;
    2. known-gain decoding on interpolated codebooks over an (n, a) grid;
    3. least-squares subset decoding on the simplex against the zero-rate
       bound;
    4. least-squares subset decoding on the simplex for k in {1, 2};
    5. all three channel decoders on interpolated codebooks at n=100.
    """
    if figure not in _FIGURES:
        raise ParameterError(f"figure must be one of {_FIGURES}, got {figure!r}")
    common = dict(
        m=m if m is not None else 3,
        power=0.1,
        trials=trials if trials is not None else 1000,
        master_seed=master_seed,
        noise_var=1.0,
        figure=figure,
    )
    if figure == 1:
        return ExperimentSpec(
            codebook_kind="random_uniform_env",
            decoders=("icp_coeff", "icp_resid", "mdd"),
            grid=tuple(GridPoint(n=n, k=1, d=1.0) for n in N_GRID),
            bounds=("prop1",),
            **common,
        )
    if figure == 2:
        return ExperimentSpec(
            codebook_kind="interpolated",
            decoders=("mdd",),
            grid=tuple(GridPoint(n=n, k=1, a=a) for a in A_GRID for n in N_GRID),
            **common,
        )
    if figure == 3:
        return ExperimentSpec(
            codebook_kind="simplex",
            decoders=("ols_mdd",),
            grid=tuple(GridPoint(n=n, k=1) for n in N_GRID),
            bounds=("shannon",),
            **common,
        )
    if figure == 4:
        return ExperimentSpec(
            codebook_kind="simplex",
            decoders=("ols_mdd",),
            grid=tuple(GridPoint(n=n, k=k) for k in (1, 2) for n in N_GRID),
            **common,
        )
    return ExperimentSpec(
        codebook_kind="interpolated",
        decoders=("mdd", "ols_mdd", "variance_match"),
        grid=tuple(GridPoint(n=100, k=1, a=a) for a in A_GRID),
        **common,
    )


def results_csv(spec: ExperimentSpec, results: list[PointResult]) -> str:
    """Deterministic CSV rendering (fixed column set, repr floats)."""

    def num(x):
        return "" if x is None else repr(float(x))

    lines = [CSV_COLUMNS]
    for res in results:
        pt = res.point
        bound_sh = ""
        bound_p1 = ""
        if "shannon" in spec.bounds:
            bound_sh = repr(shannon_bound(spec.m, pt.n, spec.power).value)
        if "prop1" in spec.bounds and pt.d is not None:
            bound_p1 = repr(prop1_bound(spec.m, pt.n, spec.power, pt.d).value)
        lines.append(
            ",".join(
                [
                    "" if spec.figure is None else str(spec.figure),
                    res.decoder,
                    spec.codebook_kind,
                    str(spec.m),
                    str(pt.k),
                    repr(float(spec.power)),
                    num(pt.d),
                    num(pt.a),
                    str(pt.n),
                    str(res.trials),
                    str(res.errors),
                    repr(res.p_err),
                    repr(res.ci_lo),
                    repr(res.ci_hi),
                    bound_sh,
                    bound_p1,
                    str(res.seed),
                ]
            )
        )
    return "\n".join(lines) + "\n"
