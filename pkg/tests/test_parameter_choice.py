import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracmollify.errors import BracketError, DomainError, IterationLimitError, NoiseConditionError
from fracmollify.experiments import add_noise, noise_amplitude
from fracmollify.grid import RealField, l2_norm, make_grid
from fracmollify.mittag_leffler import ml_e_gamma_1
from fracmollify.operators import MollifierParams
from fracmollify.parameter_choice import (
    Discrepancy,
    MorozovConfig,
    apriori_alpha,
    check_noise_condition,
    discrepancy,
    morozov_bisect,
    morozov_geometric,
)

MP = MollifierParams(0.5, 4.0)


@pytest.fixture(scope="module")
def noisy1(example1):
    _, g = example1
    eta = noise_amplitude(g, 1.0, 0)
    return add_noise(g, eta, 0)


class TestApriori:
    @pytest.mark.parametrize(
        "delta,E,p,h,expected",
        [(1e-2, 1.0, 2.0, 0.0, 1e-2**0.25), (1e-4, 10.0, 4.0, 0.0, 1e-5 ** (1 / 6)), (0.0, 1.0, 2.0, 1e-3, 1e-3**0.25)],
    )
    def test_values(self, delta, E, p, h, expected):
        assert apriori_alpha(delta, E, p, h) == pytest.approx(expected, rel=1e-15)

    @pytest.mark.parametrize("args", [(-1, 1, 2), (1, 0, 2), (1, 1, 0), (0, 1, 2)])
    def test_domain(self, args):
        with pytest.raises(DomainError):
            apriori_alpha(*args)

    def test_monotone_in_delta(self):
        vals = [apriori_alpha(d, 1.0, 2.0) for d in np.geomspace(1e-8, 1e-1, 20)]
        assert vals == sorted(vals)


class TestDiscrepancy:
    def test_against_closed_form_spectrum(self, example1, grid):
        # g_hat = 0.5 exp(-|xi|^2/4) E(-|xi|^2) evaluated directly on the frequency nodes
        _, g = example1
        r2 = grid.xi_squared
        ghat = 0.5 * np.exp(-r2 / 4) * ml_e_gamma_1(0.8, -r2)
        damp = 1 - np.exp(-MP.tau * 0.5**4 * r2**2)
        oracle = grid.dxi * math.sqrt(float(np.sum((damp * ghat) ** 2)))
        assert discrepancy(g, 0.5, MP) == pytest.approx(oracle, rel=1e-10)

    def test_zero_alpha(self, example1):
        assert discrepancy(example1[1], 0.0, MP) == 0.0

    def test_negative_alpha(self, example1):
        with pytest.raises(DomainError):
            discrepancy(example1[1], -0.1, MP)

    def test_supremum(self, example1):
        v = Discrepancy(example1[1], MP)
        assert v(1e6) == pytest.approx(v.supremum(), rel=1e-14)
        assert v.supremum() < l2_norm(example1[1])

    def test_ladder_monotone(self, noisy1):
        v = Discrepancy(noisy1[0], MP)
        vals = [v(a) for a in np.geomspace(1e-3, 10, 100)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))

    def test_counts_evaluations(self, example1):
        v = Discrepancy(example1[1], MP)
        v(0.1)
        v(0.2)
        assert v.evaluations == 2

    @settings(max_examples=40, deadline=None)
    @given(a=st.floats(1e-4, 50.0), b=st.floats(1e-4, 50.0))
    def test_monotone_property(self, example1, a, b):
        v = Discrepancy(example1[1], MP)
        lo, hi = sorted((a, b))
        assert v(lo) <= v(hi)


class TestNoiseCondition:
    def test_holds(self, noisy1):
        g, delta = noisy1
        assert check_noise_condition(g, delta, 1.01)

    @pytest.mark.parametrize("delta", [0.0, 1e3])
    def test_fails(self, noisy1, delta):
        assert not check_noise_condition(noisy1[0], delta, 1.01)
        with pytest.raises(NoiseConditionError):
            morozov_geometric(noisy1[0], delta, MP)

    def test_bad_theta(self, noisy1):
        with pytest.raises(DomainError):
            check_noise_condition(noisy1[0], 0.1, 1.0)


class TestGeometric:
    def test_bracket(self, noisy1):
        g, delta = noisy1
        cfg = MorozovConfig()
        alpha = morozov_geometric(g, delta, MP, cfg)
        v = Discrepancy(g, MP)
        assert v(alpha) <= cfg.theta * delta < v(alpha / cfg.q)

    def test_on_ladder(self, noisy1):
        g, delta = noisy1
        cfg = MorozovConfig()
        alpha = morozov_geometric(g, delta, MP, cfg)
        k = math.log(alpha / cfg.alpha0) / math.log(cfg.q)
        assert k == pytest.approx(round(k), abs=1e-6)

    def test_iteration_limit(self):
        g1 = make_grid(1, 10.0, 64)
        f = RealField(g1, np.exp(-g1.nodes**2))
        with pytest.raises(IterationLimitError):
            morozov_geometric(f, 1e-6, MP, MorozovConfig(max_iters=5))

    @pytest.mark.parametrize("c", [1e-3, 7.0, 250.0])
    def test_scale_equivariant(self, noisy1, c):
        g, delta = noisy1
        a = morozov_geometric(g, delta, MP)
        b = morozov_geometric(c * g, c * delta, MP)
        assert b == pytest.approx(a, rel=1e-12)


class TestBisect:
    def test_tolerance(self, noisy1):
        g, delta = noisy1
        alpha = morozov_bisect(g, delta, MP)
        assert abs(discrepancy(g, alpha, MP) - 1.01 * delta) <= 1e-6 * 1.01 * delta

    def test_agrees_with_geometric(self, noisy1):
        g, delta = noisy1
        a = morozov_bisect(g, delta, MP)
        b = morozov_geometric(g, delta, MP)
        # geometric lands within one ladder step below the root
        assert 0.99 * a <= b <= a * (1 + 1e-6)

    @pytest.mark.parametrize("start", [1e-4, 1.0, 1e3])
    def test_start_independent(self, noisy1, start):
        g, delta = noisy1
        assert morozov_bisect(g, delta, MP, alpha_start=start) == pytest.approx(
            morozov_bisect(g, delta, MP), rel=1e-5
        )

    def test_bracket_failure(self, example1):
        # theta*delta between sup v and ||g|| satisfies the noise condition but has no root
        g = example1[1]
        v = Discrepancy(g, MP)
        delta = 0.5 * (v.supremum() + l2_norm(g)) / 1.01
        assert check_noise_condition(g, delta, 1.01)
        with pytest.raises(BracketError):
            morozov_bisect(g, delta, MP)


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs", [dict(theta=1.0), dict(q=1.0), dict(q=0.0), dict(alpha0=0.0), dict(max_iters=0)]
    )
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            MorozovConfig(**kwargs)
