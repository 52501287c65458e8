import numpy as np
import pytest

from icpmac import (
    ChannelConfig,
    ParameterError,
    draw_support,
    make_simplex,
    transmit,
)


def test_noiseless_superposition_is_exact():
    cb = make_simplex(20, 3, 0.5)
    cfg = ChannelConfig(support=(0, 2), gains=(1.5, -0.5), noise_var=0.0)
    sig = transmit(cb, cfg, np.random.default_rng(0))
    expected = 1.5 * cb.entries[:, 0] - 0.5 * cb.entries[:, 2]
    assert np.array_equal(sig.y, expected)


def test_single_sender_unit_gain_recovers_column():
    cb = make_simplex(20, 3, 0.5)
    rng = np.random.default_rng(42)
    sig = transmit(cb, ChannelConfig(support=(1,), gains=(1.0,), noise_var=1.0), rng)
    noise = np.random.default_rng(42).standard_normal(20)  # same stream, same draw
    np.testing.assert_allclose(sig.y - noise, cb.entries[:, 1], atol=1e-12)


def test_two_sender_noiseless_energy():
    # ||c1 + c2||^2 = nP + nP + 2*(-nP/2) = nP for the m=3 simplex
    cb = make_simplex(100, 3, 0.1)
    cfg = ChannelConfig(support=(0, 1), gains=(1.0, 1.0), noise_var=0.0)
    sig = transmit(cb, cfg, np.random.default_rng(0))
    assert sig.y @ sig.y == pytest.approx(100 * 0.1, rel=1e-12)


def test_seed_determinism():
    cb = make_simplex(50, 3, 0.2)
    cfg = ChannelConfig(support=(0,), gains=(2.0,))
    a = transmit(cb, cfg, np.random.default_rng(7)).y
    b = transmit(cb, cfg, np.random.default_rng(7)).y
    assert np.array_equal(a, b)


def test_noise_moments():
    # var within 3 SE of noise_var; fourth moment within 4 SE of 3*sigma^4
    cb = make_simplex(100, 3, 0.1)
    cfg = ChannelConfig(support=(0,), gains=(1.0,), noise_var=2.0)
    rng = np.random.default_rng(123)
    clean = cb.entries[:, 0]
    resid = np.concatenate([transmit(cb, cfg, rng).y - clean for _ in range(500)])
    n_tot = resid.size
    var = resid.var()
    assert abs(var - 2.0) < 3 * np.sqrt(2 * 2.0**2 / n_tot)
    m4 = np.mean(resid**4)
    se_m4 = np.sqrt((105 - 9) * 2.0**4 / n_tot)  # var(Z^4) = 96 sigma^8
    assert abs(m4 - 3 * 2.0**2) < 4 * se_m4


class TestValidation:
    def test_support_out_of_range(self):
        cb = make_simplex(10, 3, 1.0)
        cfg = ChannelConfig(support=(3,), gains=(1.0,))
        with pytest.raises(ParameterError):
            transmit(cb, cfg, np.random.default_rng(0))

    def test_too_many_senders(self):
        cb = make_simplex(10, 3, 1.0)
        cfg = ChannelConfig(support=(0, 1, 2, 3), gains=(1.0,) * 4)
        with pytest.raises(ParameterError):
            transmit(cb, cfg, np.random.default_rng(0))

    @pytest.mark.parametrize(
        "support,gains",
        [((), ()), ((0, 0), (1.0, 1.0)), ((1, 0), (1.0, 1.0)), ((0,), (0.0,)), ((0,), (1.0, 2.0))],
    )
    def test_bad_configs(self, support, gains):
        with pytest.raises(ParameterError):
            ChannelConfig(support=support, gains=gains)

    def test_negative_noise_var(self):
        with pytest.raises(ParameterError):
            ChannelConfig(support=(0,), gains=(1.0,), noise_var=-1.0)


class TestDrawSupport:
    def test_singleton_cases(self):
        rng = np.random.default_rng(0)
        assert draw_support(1, 1, rng) == (0,)
        assert draw_support(3, 3, rng) == (0, 1, 2)

    def test_uniform_frequencies(self):
        rng = np.random.default_rng(2024)
        counts = np.zeros(3)
        draws = 30_000
        for _ in range(draws):
            counts[draw_support(3, 1, rng)[0]] += 1
        freqs = counts / draws
        assert np.all(np.abs(freqs - 1 / 3) < 0.01)
        # chi-square goodness of fit against the uniform law
        chi2 = np.sum((counts - draws / 3) ** 2 / (draws / 3))
        assert chi2 < 16.27  # 99.97% quantile of chi2(2)

    def test_rejects_k_above_m(self):
        with pytest.raises(ParameterError):
            draw_support(3, 4, np.random.default_rng(0))
