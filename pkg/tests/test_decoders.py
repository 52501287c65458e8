import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from icpmac import (
    ChannelConfig,
    ParameterError,
    draw_support,
    make_inter,
    make_simplex,
    make_uniform,
    mdd,
    ols_mdd,
    transmit,
    variance_match_decode,
)


def brute_force_ml(y, codebook, gains, k):
    """Independent exhaustive maximum-likelihood scan (distance minimization)."""
    dists = []
    subsets = []
    for sub in itertools.combinations(range(codebook.m), k):
        cand = np.zeros(codebook.n)
        for g, j in zip(gains, sub):
            cand = cand + g * codebook.entries[:, j]
        dists.append(math.sqrt(float(np.sum((y - cand) ** 2))))
        subsets.append(sub)
    dmin = min(dists)
    for sub, dist in zip(subsets, dists):
        if dist <= dmin + 1e-12:
            return sub
    raise AssertionError("unreachable")


class TestMdd:
    def test_exact_codeword(self):
        cb = make_simplex(20, 3, 0.5)
        out = mdd(cb.entries[:, 0], cb, (1.0,), 1)
        assert out.est_support == (0,)
        assert out.residuals[(0,)] == pytest.approx(0.0, abs=1e-12)
        assert not out.tie_broken
        assert out.est_gains is None

    def test_uniform_codebook_breaks_ties_lexicographically(self):
        cb = make_uniform(50, 3, 0.1)
        out = mdd(np.ones(50), cb, (1.0,), 1)
        assert out.est_support == (0,)
        assert out.tie_broken
        vals = list(out.residuals.values())
        assert max(vals) - min(vals) == 0.0

    def test_equidistant_signal_flags_tie(self):
        cb = make_simplex(20, 3, 0.5)
        y = 0.5 * (cb.entries[:, 0] + cb.entries[:, 1])
        out = mdd(y, cb, (1.0,), 1)
        assert out.est_support == (0,)
        assert out.tie_broken

    def test_residual_map_matches_direct_computation(self):
        cb = make_simplex(30, 4, 0.2)
        rng = np.random.default_rng(55)
        y = rng.standard_normal(30)
        out = mdd(y, cb, (1.0, -2.0), 2)
        for sub, res in out.residuals.items():
            direct = np.linalg.norm(y - cb.entries[:, sub] @ np.array([1.0, -2.0]))
            assert res == pytest.approx(direct, rel=1e-12)
        best = min(out.residuals, key=out.residuals.get)
        assert out.est_support == best

    def test_matches_brute_force_oracle(self):
        cb = make_simplex(20, 3, 0.1)
        rng = np.random.default_rng(99)
        for _ in range(300):
            sup = draw_support(3, 1, rng)
            sig = transmit(cb, ChannelConfig(sup, (1.0,), 1.0), rng)
            assert mdd(sig.y, cb, (1.0,), 1).est_support == brute_force_ml(sig.y, cb, (1.0,), 1)

    def test_rejects_bad_k(self):
        cb = make_simplex(10, 3, 1.0)
        with pytest.raises(ParameterError):
            mdd(np.zeros(10), cb, (1.0,) * 4, 4)
        with pytest.raises(ParameterError):
            mdd(np.zeros(10), cb, (), 0)


class TestOlsMdd:
    def test_noiseless_span_membership(self):
        cb = make_simplex(100, 3, 0.1)
        out = ols_mdd(2.5 * cb.entries[:, 2], cb, 1)
        assert out.est_support == (2,)
        assert out.est_gains[0] == pytest.approx(2.5, abs=1e-9)
        assert out.residuals[(2,)] == pytest.approx(0.0, abs=1e-9)

    def test_uniform_codebook_tie(self):
        cb = make_uniform(40, 3, 0.1)
        rng = np.random.default_rng(3)
        out = ols_mdd(rng.standard_normal(40), cb, 1)
        assert out.est_support == (0,)
        assert out.tie_broken

    def test_rank_deficient_design_minimum_norm(self):
        # identical columns: X_S' X_S is singular; minimum-norm splits the gain
        cb = make_uniform(40, 3, 0.25)
        y = 3.0 * cb.entries[:, 0]
        out = ols_mdd(y, cb, 2)
        assert out.est_gains[0] == pytest.approx(out.est_gains[1], rel=1e-9)
        assert sum(out.est_gains) == pytest.approx(3.0, rel=1e-9)
        assert min(out.residuals.values()) == pytest.approx(0.0, abs=1e-9)

    def test_pinned_gains_reduce_to_mdd(self):
        cb = make_simplex(20, 3, 0.1)
        rng = np.random.default_rng(7)
        for _ in range(200):
            sup = draw_support(3, 1, rng)
            sig = transmit(cb, ChannelConfig(sup, (1.0,), 1.0), rng)
            pinned = ols_mdd(sig.y, cb, 1, pinned_gains=(1.0,))
            plain = mdd(sig.y, cb, (1.0,), 1)
            assert pinned.est_support == plain.est_support
            assert pinned.residuals == plain.residuals

    def test_rotation_invariance(self):
        rng = np.random.default_rng(12)
        cb = make_simplex(30, 3, 0.4)
        y = rng.standard_normal(30)
        rot, _ = np.linalg.qr(rng.standard_normal((30, 30)))
        out = ols_mdd(y, cb, 1)
        from icpmac.codebook import Codebook

        rotated = Codebook(entries=rot @ cb.entries, n=30, m=3, power=0.4, kind="interpolated")
        out_rot = ols_mdd(rot @ y, rotated, 1)
        assert out_rot.est_support == out.est_support
        for sub in out.residuals:
            assert out_rot.residuals[sub] == pytest.approx(out.residuals[sub], rel=1e-9)

    def test_needs_more_samples_than_k(self):
        cb = make_uniform(2, 3, 1.0)
        with pytest.raises(ParameterError):
            ols_mdd(np.zeros(2), cb, 2)


@settings(max_examples=40, deadline=None)
@given(
    m=st.integers(min_value=2, max_value=6),
    k=st.integers(min_value=1, max_value=3),
    seed=st.integers(min_value=0, max_value=2**31),
)
def test_winner_attains_minimum_residual(m, k, seed):
    if k > m:
        k = m
    rng = np.random.default_rng(seed)
    cb = make_simplex(16, m, 0.5) if m <= 9 else make_uniform(16, m, 0.5)
    y = rng.standard_normal(16)
    for outcome in (mdd(y, cb, (1.0,) * k, k), ols_mdd(y, cb, k)):
        best = outcome.residuals[outcome.est_support]
        assert all(best <= r + 1e-12 for r in outcome.residuals.values())


class TestVarianceMatch:
    def test_noiseless_positive_gain(self):
        cb = make_simplex(100, 3, 0.1)
        out = variance_match_decode(
            2.5 * cb.entries[:, 0], cb, noise_var=0.0, epsilon=0.1, rng=np.random.default_rng(0)
        )
        assert out.est_support == (0,)
        assert out.fallback is None
        assert out.accepted == ((0,),)
        assert out.est_gains[0] == pytest.approx(2.5, rel=1e-9)

    def test_noiseless_negative_gain_uses_other_sign(self):
        # column 0 has sample variance exactly P, so the gain magnitude comes
        # out exact; the sign must flip to the q=1 branch
        cb = make_simplex(100, 3, 0.1)
        out = variance_match_decode(
            -2.0 * cb.entries[:, 0], cb, noise_var=0.0, epsilon=0.1, rng=np.random.default_rng(0)
        )
        assert out.est_support == (0,)
        assert out.est_gains[0] == pytest.approx(-2.0, rel=1e-9)

    def test_uniform_codebook_all_skipped(self):
        cb = make_uniform(50, 3, 0.1)
        rng = np.random.default_rng(21)
        out = variance_match_decode(np.ones(50), cb, noise_var=1.0, epsilon=0.1, rng=rng)
        assert out.skipped == (0, 1, 2)
        assert out.fallback == "none_accepted"
        assert out.est_gains is None
        assert len(out.est_support) == 1

    def test_uniform_codebook_fallback_error_rate(self):
        # random pick over 3 codewords: error rate near 2/3
        cb = make_uniform(50, 3, 0.1)
        rng = np.random.default_rng(77)
        errors = 0
        trials = 600
        for _ in range(trials):
            sup = draw_support(3, 1, rng)
            sig = transmit(cb, ChannelConfig(sup, (1.0,), 1.0), rng)
            out = variance_match_decode(sig.y, cb, 1.0, 0.1, rng)
            errors += out.est_support != sup
        assert abs(errors / trials - 2 / 3) < 0.07

    def test_fallback_is_seed_deterministic(self):
        cb = make_uniform(50, 3, 0.1)
        y = np.ones(50)
        picks_a = [
            variance_match_decode(y, cb, 1.0, 0.1, np.random.default_rng(s)).est_support
            for s in range(20)
        ]
        picks_b = [
            variance_match_decode(y, cb, 1.0, 0.1, np.random.default_rng(s)).est_support
            for s in range(20)
        ]
        assert picks_a == picks_b

    def test_parameter_validation(self):
        cb = make_simplex(10, 3, 1.0)
        with pytest.raises(ParameterError):
            variance_match_decode(np.zeros(10), cb, 1.0, 0.0, np.random.default_rng(0))
        with pytest.raises(ParameterError):
            variance_match_decode(np.zeros(10), cb, -1.0, 0.1, np.random.default_rng(0))
        with pytest.raises(ParameterError):
            variance_match_decode(np.zeros(10), cb, 1.0, 0.1, None)


def test_decoders_accept_received_signal_objects():
    cb = make_inter(20, 3, 0.5, 0.3)
    sig = transmit(cb, ChannelConfig((1,), (1.0,), 0.0), np.random.default_rng(0))
    assert mdd(sig, cb, (1.0,), 1).est_support == (1,)
    assert ols_mdd(sig, cb, 1).est_support == (1,)
