import json
import math
from pathlib import Path

import numpy as np
import pytest

from fracmollify.errors import DomainError, NoiseConditionError
from fracmollify.experiments import (
    EXAMPLES,
    add_noise,
    convergence_study,
    exact_data,
    exact_data_fine,
    initial_condition,
    monte_carlo,
    noise_amplitude,
    run_example,
)
from fracmollify.grid import l2_norm, make_grid

GOLDEN = json.loads((Path(__file__).parent / "golden" / "example1_p1_seed0.json").read_text())


class TestInitialConditions:
    @pytest.mark.parametrize("ex", EXAMPLES)
    def test_peak_at_origin(self, grid, ex):
        u0 = initial_condition(ex, grid)
        assert u0.values.max() <= 1.0
        assert u0.values.min() >= 0.0
        assert np.array_equal(u0.values, u0.values.T)

    def test_supports(self, grid):
        x1, x2 = grid.mesh()
        outside3 = (np.abs(x1) > 3) | (np.abs(x2) > 3)
        assert np.all(initial_condition(3, grid).values[outside3] == 0)
        outside5 = (np.abs(x1) > 5) | (np.abs(x2) > 5)
        assert np.all(initial_condition(4, grid).values[outside5] == 0)
        assert np.all(initial_condition(4, grid).values[~outside5] == 1)

    @pytest.mark.parametrize("ex", [0, 5])
    def test_unknown(self, grid, ex):
        with pytest.raises(DomainError):
            initial_condition(ex, grid)

    def test_needs_2d(self):
        with pytest.raises(DomainError):
            initial_condition(1, make_grid(1, 10, 64))

    def test_exact_data_readonly(self, cfg):
        _, g = exact_data(1, cfg.grid, cfg.exact_model)
        with pytest.raises(ValueError):
            g.values[0, 0] = 1.0


class TestNoise:
    @pytest.mark.parametrize("perc", [0.25, 1.0, 4.0])
    def test_exact_percentage(self, example1, perc):
        _, g = example1
        eta = noise_amplitude(g, perc, 3)
        noisy, delta = add_noise(g, eta, 3)
        assert 100 * delta / l2_norm(g) == pytest.approx(perc, rel=1e-13)
        assert l2_norm(noisy - g) == pytest.approx(delta, rel=1e-12)

    def test_seeded(self, example1):
        _, g = example1
        a, _ = add_noise(g, 1e-3, 7)
        b, _ = add_noise(g, 1e-3, 7)
        c, _ = add_noise(g, 1e-3, 8)
        assert np.array_equal(a.values, b.values)
        assert not np.array_equal(a.values, c.values)

    def test_zero_eta(self, example1):
        _, g = example1
        noisy, delta = add_noise(g, 0.0, 0)
        assert delta == 0.0 and noisy is g

    def test_negative_eta(self, example1):
        with pytest.raises(DomainError):
            add_noise(example1[1], -1.0, 0)


class TestRunExample:
    def test_golden(self, cfg):
        rep, _ = run_example(1, 1.0, 0, cfg)
        for key in ("delta", "alpha", "rel_err"):
            assert getattr(rep, key) == pytest.approx(GOLDEN[key], rel=1e-9)

    def test_deterministic(self, cfg):
        a, ra = run_example(2, 1.0, 5, cfg)
        b, rb = run_example(2, 1.0, 5, cfg)
        assert (a.alpha, a.rel_err, a.delta) == (b.alpha, b.rel_err, b.delta)
        assert np.array_equal(ra.values, rb.values)

    def test_noise_free_needs_fixed_alpha(self, cfg):
        with pytest.raises(NoiseConditionError):
            run_example(1, 0.0, 0, cfg)
        rep, _ = run_example(1, 0.0, 0, cfg, alpha_fixed=0.1)
        assert rep.delta == 0.0
        assert rep.rel_err < 1e-3

    def test_fine_data(self, cfg):
        rep, _ = run_example(1, 1.0, 0, cfg, fine_data=True)
        assert rep.rel_err == pytest.approx(GOLDEN["rel_err"], rel=0.05)

    def test_fine_data_agrees_with_coarse(self, cfg):
        _, g = exact_data(1, cfg.grid, cfg.exact_model)
        _, gf = exact_data_fine(1, cfg.grid, cfg.exact_model)
        assert l2_norm(gf - g) <= 1e-10 * l2_norm(g)

    def test_negative_noise(self, cfg):
        with pytest.raises(DomainError):
            run_example(1, -1.0, 0, cfg)


class TestStudies:
    def test_convergence_needs_three_levels(self, cfg):
        with pytest.raises(DomainError):
            convergence_study(1, [1.0, 0.5], cfg=cfg)

    def test_convergence_positive_slope(self, cfg):
        rep = convergence_study(1, [4.0, 1.0, 0.25], seeds=(0,), cfg=cfg)
        assert len(rep.points) == 3
        assert rep.slope > 0

    def test_monte_carlo_single(self, cfg):
        mc = monte_carlo(1, 1.0, 1, base_seed=0, cfg=cfg)
        assert mc.var_rel_err == 0.0
        assert mc.mean_rel_err == pytest.approx(GOLDEN["rel_err"], rel=1e-9)

    def test_monte_carlo_matches_runs(self, cfg):
        mc = monte_carlo(3, 2.0, 4, base_seed=10, cfg=cfg)
        errs = [run_example(3, 2.0, 10 + i, cfg)[0].rel_err for i in range(4)]
        assert mc.rel_errs == tuple(errs)
        assert mc.var_rel_err == pytest.approx(np.var(errs), rel=1e-12)

    def test_monte_carlo_bad_reps(self, cfg):
        with pytest.raises(DomainError):
            monte_carlo(1, 1.0, 0, cfg=cfg)

    @pytest.mark.slow
    def test_monte_carlo_workers_match_serial(self, cfg):
        serial = monte_carlo(1, 1.0, 4, cfg=cfg)
        parallel = monte_carlo(1, 1.0, 4, cfg=cfg, workers=2)
        assert serial == parallel

    @pytest.mark.parametrize("ex", EXAMPLES)
    def test_error_decreases_with_noise(self, cfg, ex):
        hi = math.fsum(run_example(ex, 4.0, s, cfg)[0].rel_err for s in range(3))
        lo = math.fsum(run_example(ex, 0.25, s, cfg)[0].rel_err for s in range(3))
        assert lo < hi
