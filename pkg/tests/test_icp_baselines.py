import numpy as np
import pytest

from icpmac import (
    ChannelConfig,
    IcpTestConfig,
    ParameterError,
    draw_support,
    icp_coefficient_test,
    icp_residual_test,
    make_simplex,
    mdd,
    sample_random_uniform_env,
    transmit,
)

CFG = IcpTestConfig(alpha=0.05, noise_var=1.0)


def test_coefficient_test_accepts_noiseless_invariant_model():
    rng = np.random.default_rng(0)
    cb = sample_random_uniform_env(40, 3, 0.5, 1.0, rng)
    y = 1.3 * cb.entries[:, 1]  # equal coefficient in both environments, no noise
    out = icp_coefficient_test(y, cb, 1, CFG)
    assert (1,) in out.accepted


def test_coefficient_test_rejects_ten_sigma_shift():
    # env-2 coefficient displaced by 10 standard errors on a non-causal subset:
    # the two-sample z-test should reject essentially always
    rng = np.random.default_rng(42)
    reps, rejections = 200, 0
    for _ in range(reps):
        cb = sample_random_uniform_env(100, 3, 0.5, 1.0, rng)
        x = cb.entries[:, 2]
        e1, e2 = slice(0, 50), slice(50, 100)
        se = np.sqrt(1.0 / (x[e1] @ x[e1]) + 1.0 / (x[e2] @ x[e2]))
        beta, shift = 0.8, 10.0 * se
        y = np.empty(100)
        y[e1] = beta * x[e1] + rng.standard_normal(50)
        y[e2] = (beta + shift) * x[e2] + rng.standard_normal(50)
        out = icp_coefficient_test(y, cb, 1, CFG)
        rejections += (2,) not in out.accepted
    assert rejections / reps >= 0.99


def test_residual_test_accepts_true_model_at_large_n():
    rng = np.random.default_rng(1)
    cb = sample_random_uniform_env(400, 3, 0.5, 1.0, rng)
    sig = transmit(cb, ChannelConfig((0,), (1.0,), 1.0), rng)
    out = icp_residual_test(sig.y, cb, 1, CFG)
    assert (0,) in out.accepted


def test_residual_test_rejects_tripled_env2_noise():
    # invariance violated: residual variance in environment 2 is 9x the
    # declared noise level, so the chi-square test fires
    rng = np.random.default_rng(11)
    reps, rejections = 200, 0
    for _ in range(reps):
        cb = sample_random_uniform_env(100, 3, 0.5, 1.0, rng)
        noise = rng.standard_normal(100)
        noise[50:] *= 3.0
        y = cb.entries[:, 0] + noise
        out = icp_residual_test(y, cb, 1, CFG)
        rejections += (0,) not in out.accepted
    assert rejections / reps >= 0.99


@pytest.mark.parametrize("method", [icp_coefficient_test, icp_residual_test])
def test_null_acceptance_rate(method):
    # true subset retained at least 1 - alpha - 0.03 of the time at n=200
    rng = np.random.default_rng(123)
    trials, kept = 2000, 0
    for _ in range(trials):
        cb = sample_random_uniform_env(200, 3, 0.1, 1.0, rng)
        sup = draw_support(3, 1, rng)
        sig = transmit(cb, ChannelConfig(sup, (1.0,), 1.0), rng)
        out = method(sig.y, cb, 1, CFG)
        kept += sup in out.accepted
    assert kept / trials >= 1 - 0.05 - 0.03


@pytest.mark.parametrize("method", [icp_coefficient_test, icp_residual_test])
def test_deterministic_given_data(method):
    rng = np.random.default_rng(5)
    cb = sample_random_uniform_env(60, 3, 0.2, 1.0, rng)
    y = rng.standard_normal(60)
    assert method(y, cb, 1, CFG) == method(y, cb, 1, CFG)


def test_estimate_is_intersection_of_accepted_sets():
    rng = np.random.default_rng(9)
    cb = sample_random_uniform_env(60, 4, 0.2, 1.0, rng)
    y = rng.standard_normal(60)  # pure noise: many subsets look invariant
    out = icp_coefficient_test(y, cb, 2, CFG)
    if out.accepted:
        expected = set(out.accepted[0])
        for sub in out.accepted[1:]:
            expected &= set(sub)
        assert out.est_support == tuple(sorted(expected))
    else:
        assert out.est_support == ()


def test_error_rates_exceed_known_gain_decoding():
    # qualitative: both invariance baselines do worse than known-gain
    # minimum-distance decoding in the split-power random design
    rng_seed = 314
    trials = 300
    errs = {"coeff": 0, "resid": 0, "mdd": 0}
    rng = np.random.default_rng(rng_seed)
    for _ in range(trials):
        cb = sample_random_uniform_env(100, 3, 0.1, 1.0, rng)
        sup = draw_support(3, 1, rng)
        sig = transmit(cb, ChannelConfig(sup, (1.0,), 1.0), rng)
        errs["coeff"] += icp_coefficient_test(sig.y, cb, 1, CFG).est_support != sup
        errs["resid"] += icp_residual_test(sig.y, cb, 1, CFG).est_support != sup
        errs["mdd"] += mdd(sig.y, cb, (1.0,), 1).est_support != sup
    assert errs["coeff"] > errs["mdd"]
    assert errs["resid"] > errs["mdd"]


class TestValidation:
    def test_needs_enough_samples_per_environment(self):
        cb = make_simplex(4, 3, 1.0)
        with pytest.raises(ParameterError):
            icp_coefficient_test(np.zeros(4), cb, 1, CFG)

    def test_config_rejects_bad_alpha(self):
        for alpha in (0.0, 1.0, -0.5):
            with pytest.raises(ParameterError):
                IcpTestConfig(alpha=alpha)

    def test_custom_bonferroni_divisor(self):
        rng = np.random.default_rng(1)
        cb = sample_random_uniform_env(60, 3, 0.2, 1.0, rng)
        y = rng.standard_normal(60)
        # a larger divisor lowers the per-test level, so it can only accept more
        tight = icp_coefficient_test(y, cb, 1, IcpTestConfig(alpha=0.05, combine=1)).accepted
        loose = icp_coefficient_test(y, cb, 1, IcpTestConfig(alpha=0.05, combine=100)).accepted
        assert set(tight) <= set(loose)
