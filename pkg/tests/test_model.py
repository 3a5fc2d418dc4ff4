import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from mfbm_asian import (
    Fidelity,
    ModelParams,
    OptionContract,
    adjusted_strike,
    derive_term_params,
    jump_moment_rho,
    mean_arithmetic_power,
    mean_geometric_power,
    price,
)
from mfbm_asian.model import TermParams


def _term(mu_hat, sigma_hat_sq):
    return TermParams(n=0, r_n=0.0, sigma_n_sq=3 * sigma_hat_sq, mu_hat=mu_hat,
                      sigma_hat_sq=sigma_hat_sq, rho=1.0, u=1.0)


class TestRho:
    def test_trivial(self):
        assert jump_moment_rho(0.0, 0.0) == 1.0
        assert jump_moment_rho(0.1, 0.0) == math.exp(0.1)

    def test_against_sample_mean(self):
        rng = np.random.default_rng(11)
        j = rng.normal(-0.1, 0.2, 10**6)
        sample = np.exp(j)
        se = sample.std() / math.sqrt(j.size)
        assert jump_moment_rho(-0.1, 0.2) == pytest.approx(math.exp(-0.08), rel=1e-15)
        assert abs(sample.mean() - math.exp(-0.08)) < 3 * se

    @pytest.mark.parametrize("args", [(math.nan, 0.1), (0.0, math.inf), (0.0, -0.1)])
    def test_rejects(self, args):
        with pytest.raises(ValueError):
            jump_moment_rho(*args)


class TestValidation:
    @pytest.mark.parametrize("kw", [
        {"s0": 0.0}, {"sigma": -0.1}, {"epsilon": -1e-9}, {"lam": -1.0},
        {"sigma_j": -0.2}, {"hurst": 0.0}, {"hurst": 1.0}, {"r": math.nan},
    ])
    def test_model_invariants(self, kw):
        base = dict(s0=100.0, r=0.05)
        base.update(kw)
        with pytest.raises(ValueError):
            ModelParams(**base)

    @pytest.mark.parametrize("kw", [
        {"maturity": 0.0}, {"maturity": -1.0}, {"power": 0}, {"power": 1.5}, {"strike": -1.0},
        {"kind": "straddle"}, {"averaging": "harmonic"}, {"fidelity": "loose"},
    ])
    def test_contract_invariants(self, kw):
        base = dict(kind="call", strike=100.0, maturity=1.0)
        base.update(kw)
        with pytest.raises(ValueError):
            OptionContract(**base)

    def test_immutable(self, bs_model):
        with pytest.raises(AttributeError):
            bs_model.s0 = 1.0


class TestTermParams:
    def test_plain_brownian(self, bs_model):
        term = derive_term_params(bs_model, OptionContract("call", 100, 1.0), 0)
        assert term.r_n == 0.05
        assert term.sigma_n_sq == pytest.approx(0.04, rel=1e-15)
        assert term.mu_hat == pytest.approx(math.log(100) + 0.5 * (0.05 - 0.02), rel=1e-15)
        assert term.sigma_hat_sq == pytest.approx(0.04 / 3, rel=1e-15)
        assert term.k_prime is None
        assert term.u == 100.0

    def test_half_hurst(self):
        model = ModelParams(s0=100, r=0.05, sigma=0.2, epsilon=0.1, hurst=0.5)
        term = derive_term_params(model, OptionContract("call", 100, 1.0), 0)
        assert term.sigma_n_sq == pytest.approx(0.05, rel=1e-15)

    def test_jump_term_against_independent_evaluation(self):
        # reference values from a 30-digit evaluation of the same expressions
        model = ModelParams(s0=100, r=0.05, q=0.01, sigma=0.2, epsilon=0.1, hurst=0.8,
                            lam=0.5, mu_j=-0.1, sigma_j=0.2)
        term = derive_term_params(model, OptionContract("call", 100, 2.0), 2)
        assert term.r_n == pytest.approx(-0.04, rel=1e-14)
        assert term.sigma_n_sq == pytest.approx(0.095157165665103980823, rel=1e-14)
        assert term.mu_hat == pytest.approx(4.5175916031555393776, rel=1e-14)
        assert term.sigma_hat_sq == pytest.approx(0.063438110443402653882, rel=1e-14)
        assert term.rho == pytest.approx(0.92311634638663578137, rel=1e-14)
        assert term.u == pytest.approx(90.766160313805171821, rel=1e-14)

    def test_sigma_hat_is_third_of_variance_rate(self, jump_model):
        for n in range(5):
            term = derive_term_params(jump_model, OptionContract("put", 90, 1.7), n)
            assert term.sigma_hat_sq == term.sigma_n_sq * 1.7 / 3.0
            assert term.sigma_n_sq >= jump_model.sigma**2

    def test_no_jump_reduction(self):
        model = ModelParams(s0=100, r=0.05, q=0.02, sigma=0.3, epsilon=0.2, hurst=0.7)
        t = 2.5
        term = derive_term_params(model, OptionContract("call", 100, t), 0)
        assert term.r_n == pytest.approx(0.03, rel=1e-15)
        assert term.sigma_n_sq == pytest.approx(0.09 + 0.04 * t ** (2 * 0.7 - 1), rel=1e-14)

    def test_rejects_negative_count(self, jump_model):
        with pytest.raises(ValueError):
            derive_term_params(jump_model, OptionContract("call", 100, 1.0), -1)

    def test_arithmetic_populates_adjusted_strike(self, jump_model):
        contract = OptionContract("call", 100, 1.0, averaging="arithmetic")
        term = derive_term_params(jump_model, contract, 1)
        assert term.k_prime is not None and term.k_prime < 100

    @pytest.mark.parametrize("field", ["sigma", "epsilon", "sigma_j"])
    def test_sigma_hat_increasing(self, jump_model, field):
        contract = OptionContract("call", 100, 1.3)
        lo = derive_term_params(replace(jump_model, **{field: 0.1}), contract, 2)
        hi = derive_term_params(replace(jump_model, **{field: 0.3}), contract, 2)
        assert hi.sigma_hat_sq > lo.sigma_hat_sq

    def test_sigma_hat_increasing_in_jump_count(self, jump_model):
        contract = OptionContract("call", 100, 1.3)
        values = [derive_term_params(jump_model, contract, n).sigma_hat_sq for n in range(6)]
        assert np.all(np.diff(values) > 0)


class TestMeans:
    def test_geometric_trivial(self):
        assert mean_geometric_power(_term(0.0, 0.0), 1) == 1.0
        assert mean_geometric_power(_term(4.6, 0.0133), 1) == math.exp(4.6 + 0.0133 / 2)

    def test_geometric_square_against_sampling(self):
        rng = np.random.default_rng(5)
        sample = np.exp(2 * rng.normal(4.6, math.sqrt(0.0133), 10**6))
        expected = math.exp(9.2 + 0.0266)
        assert mean_geometric_power(_term(4.6, 0.0133), 2) == pytest.approx(expected, rel=1e-15)
        assert abs(sample.mean() - expected) < 3 * sample.std() / 1e3

    def test_arithmetic_zero_rate(self):
        model = ModelParams(s0=90.0, r=0.02, q=0.02, sigma=0.2)
        term = derive_term_params(model, OptionContract("call", 100, 1.0), 0)
        for m in (1, 2, 3):
            assert mean_arithmetic_power(model, term, m, 1.0) == pytest.approx(90.0**m, rel=1e-15)

    def test_arithmetic_near_zero_rate_continuous(self):
        model = ModelParams(s0=100.0, r=0.0, q=0.0, sigma=0.0)
        term = derive_term_params(model, OptionContract("call", 100, 1.0), 0)
        tiny = replace(term, r_n=1e-10)
        small = replace(term, r_n=2e-8)
        assert mean_arithmetic_power(model, tiny, 1, 1.0) == pytest.approx(100 * (1 + 5e-11), rel=1e-15)
        assert mean_arithmetic_power(model, small, 1, 1.0) == pytest.approx(100 * (1 + 1e-8), rel=1e-14)

    def test_arithmetic_against_quadrature(self, bs_model):
        term = derive_term_params(bs_model, OptionContract("call", 100, 1.0), 0)
        quad, _ = integrate.quad(lambda t: 100 * math.exp(0.05 * t), 0, 1, epsabs=1e-13)
        value = mean_arithmetic_power(bs_model, term, 1, 1.0)
        assert value == pytest.approx(102.542192752048079, rel=1e-14)
        assert value == pytest.approx(quad, rel=1e-13)

    def test_consistent_power_exceeds_paper(self, jump_model):
        term = derive_term_params(jump_model, OptionContract("call", 100, 1.0), 1)
        paper = mean_arithmetic_power(jump_model, term, 2, 1.0, Fidelity.PAPER)
        consistent = mean_arithmetic_power(jump_model, term, 2, 1.0, Fidelity.CONSISTENT)
        assert consistent > paper

    def test_consistent_power_against_quadrature(self, jump_model):
        term = derive_term_params(jump_model, OptionContract("call", 100, 1.0), 1)
        rate = 3 * term.r_n + 3 * term.sigma_n_sq
        quad, _ = integrate.quad(lambda t: 100.0**3 * math.exp(rate * t), 0, 1, epsrel=1e-14)
        assert mean_arithmetic_power(jump_model, term, 3, 1.0, "consistent") == pytest.approx(quad, rel=1e-13)

    def test_unit_power_same_in_both_modes(self, jump_model):
        term = derive_term_params(jump_model, OptionContract("call", 100, 1.0), 3)
        assert mean_arithmetic_power(jump_model, term, 1, 1.0, "paper") == \
            mean_arithmetic_power(jump_model, term, 1, 1.0, "consistent")


class TestAdjustedStrike:
    def test_equal_means(self):
        model = ModelParams(s0=100, r=0.03, q=0.03)
        term = derive_term_params(model, OptionContract("call", 95, 1.0), 0)
        assert adjusted_strike(95.0, model, term, 1, 1.0) == pytest.approx(95.0, rel=1e-15)

    def test_deterministic_path(self):
        model = ModelParams(s0=100, r=0.06, q=0.01)
        t = 2.0
        term = derive_term_params(model, OptionContract("call", 100, t), 0)
        g = 0.05 * t
        expected = 100 + 100 * math.exp(g / 2) - 100 * math.expm1(g) / g
        assert adjusted_strike(100.0, model, term, 1, t) == pytest.approx(expected, rel=1e-14)

    def test_below_strike_when_volatile(self, bs_model):
        term = derive_term_params(bs_model, OptionContract("call", 100, 1.0), 0)
        k_prime = adjusted_strike(100.0, bs_model, term, 1, 1.0)
        ea, _ = integrate.quad(lambda t: 100 * math.exp(0.05 * t), 0, 1)
        eg = math.exp(term.mu_hat + term.sigma_hat_sq / 2)
        assert ea > eg
        assert k_prime < 100
        assert k_prime == pytest.approx(100 - (ea - eg), rel=1e-12)


@given(
    mu_j=st.floats(-1, 1), sigma_j=st.floats(0, 1),
    kind=st.sampled_from(["call", "put"]), avg=st.sampled_from(["geometric", "arithmetic"]),
    m=st.integers(1, 3), fidelity=st.sampled_from(["paper", "consistent"]),
)
@settings(max_examples=60, deadline=None)
def test_jump_sizes_irrelevant_without_jumps(mu_j, sigma_j, kind, avg, m, fidelity):
    base = ModelParams(s0=100, r=0.04, q=0.01, sigma=0.25, epsilon=0.1, hurst=0.8)
    contract = OptionContract(kind, 100.0**m, 1.5, m, avg, fidelity)
    a = price(base, contract)
    b = price(replace(base, mu_j=mu_j, sigma_j=sigma_j), contract)
    assert a == b
