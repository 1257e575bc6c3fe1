"""Benchmark problems, noisy data synthesis and the reconstruction studies.

All runs are pure functions of ``(example, perc_noise, seed, config)``: the
noise comes from a Philox generator seeded with ``seed`` and the exact data
are cached per configuration.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import PipelineConfig
from .errors import DomainError, NoiseConditionError
from .grid import RealField, forward_ft, l2_norm, make_grid
from .operators import _propagator, forward_solve, regularized_backward
from .parameter_choice import Discrepancy, check_noise_condition, morozov_geometric

__all__ = [
    "EXAMPLES",
    "RunReport",
    "RatesReport",
    "MCSummary",
    "ReplicationError",
    "initial_condition",
    "exact_data",
    "exact_data_fine",
    "add_noise",
    "noise_amplitude",
    "run_example",
    "convergence_study",
    "monte_carlo",
]

log = logging.getLogger(__name__)

EXAMPLES = (1, 2, 3, 4)


class ReplicationError(RuntimeError):
    def __init__(self, seed, cause):
        super().__init__(f"replication with seed {seed} failed: {cause}")
        self.seed = seed


@dataclass(frozen=True)
class RunReport:
    example: int
    perc_noise: float
    delta: float
    alpha: float
    rel_err: float
    elapsed: float
    seed: int = 0


@dataclass(frozen=True)
class RatesReport:
    points: tuple
    slope: float
    intercept: float
    r_squared: float


@dataclass(frozen=True)
class MCSummary:
    n_reps: int
    mean_rel_err: float
    var_rel_err: float
    mean_alpha: float
    rel_errs: tuple = ()
    alphas: tuple = ()


def _check_example(ex):
    if ex not in EXAMPLES:
        raise DomainError(f"example id must be one of {EXAMPLES}, got {ex!r}")


def _triangle(v):
    return np.clip(1.0 - np.abs(v) / 3.0, 0.0, None)


def initial_condition(ex, grid):
    """Sample the initial state of example ``ex`` on a 2-D grid."""
    _check_example(ex)
    if grid.n_dims != 2:
        raise DomainError("the benchmark examples are two-dimensional")
    x1, x2 = grid.mesh()
    if ex == 1:
        values = np.exp(-(x1**2) - x2**2)
    elif ex == 2:
        values = np.exp(-np.abs(x1) - np.abs(x2))
    elif ex == 3:
        values = _triangle(x1) * _triangle(x2)
    else:
        values = ((np.abs(x1) <= 5.0) & (np.abs(x2) <= 5.0)).astype(float)
    return RealField(grid, values)


@lru_cache(maxsize=16)
def _exact_pair(ex, grid, model):
    u0 = initial_condition(ex, grid)
    g = forward_solve(u0, model, model.T)
    u0.values.setflags(write=False)
    g.values.setflags(write=False)
    return u0, g


def exact_data(ex, grid, model):
    """``(u0, g)`` with ``g = u(., T)`` computed on the same grid."""
    return _exact_pair(ex, grid, model)


def exact_data_fine(ex, grid, model, refine=2):
    """Exact final data synthesised on a ``refine``-times finer grid.

    The fine spectrum is evaluated at the coarse nodes by direct separable
    summation of the inverse transform, so the data never pass through the
    coarse FFT.
    """
    fine = make_grid(2, grid.L, grid.N * refine)
    u0_fine = initial_condition(ex, fine)
    F = forward_ft(u0_fine).coeffs * _propagator(model, fine, float(model.T))
    phase = np.exp(1j * np.outer(grid.nodes, fine.frequencies))
    values = (phase @ F @ phase.T) * (fine.dxi / (2.0 * math.pi) * fine.dxi)
    return initial_condition(ex, grid), RealField(grid, values.real)


def _standard_normal(shape, seed):
    return np.random.Generator(np.random.Philox(seed)).standard_normal(shape)


def noise_amplitude(g, perc_noise, seed):
    """``eta`` such that :func:`add_noise` with ``seed`` yields ``perc_noise`` percent."""
    eps = RealField(g.grid, _standard_normal(g.grid.shape, seed))
    return perc_noise / 100.0 * l2_norm(g) / l2_norm(eps)


def add_noise(g, eta, seed):
    """Return ``(g + eta * eps, delta)`` with ``delta = eta * ||eps||``.

    ``eps`` is i.i.d. standard normal from ``Philox(seed)``; the norm is the
    grid-weighted L2 norm, so ``100 * delta / ||g||`` is the noise percentage.
    """
    if not (eta >= 0):
        raise DomainError(f"eta must be >= 0, got {eta!r}")
    if eta == 0:
        return g, 0.0
    eps = _standard_normal(g.grid.shape, seed)
    noisy = RealField(g.grid, g.values + eta * eps)
    return noisy, eta * l2_norm(RealField(g.grid, eps))


def run_example(ex, perc_noise, seed=0, cfg=PipelineConfig(), alpha_fixed=None, fine_data=False):
    """Synthesise noisy data, choose alpha, reconstruct ``u(., 0)``.

    With ``alpha_fixed`` the discrepancy search is skipped; this is the only
    way to run noise-free data, for which the noise condition cannot hold.
    """
    _check_example(ex)
    if not (perc_noise >= 0):
        raise DomainError(f"perc_noise must be >= 0, got {perc_noise!r}")
    start = time.perf_counter()
    grid = cfg.grid
    model = cfg.model
    u0, g = exact_data(ex, grid, cfg.exact_model)
    if fine_data:
        u0, g = exact_data_fine(ex, grid, cfg.exact_model)
    eta = noise_amplitude(g, perc_noise, seed) if perc_noise > 0 else 0.0
    gdelta, delta = add_noise(g, eta, seed)
    mp = cfg.mollifier
    if alpha_fixed is not None:
        alpha = float(alpha_fixed)
    else:
        if not check_noise_condition(gdelta, delta, cfg.theta):
            raise NoiseConditionError(
                f"example {ex} at {perc_noise}% noise: need 0 < theta*delta < ||g_delta|| "
                f"(theta*delta={cfg.theta * delta:.6g}); pass a fixed alpha to run anyway"
            )
        alpha = morozov_geometric(gdelta, delta, mp, cfg.morozov, v=Discrepancy(gdelta, mp))
    recon = regularized_backward(gdelta, alpha, model, mp, 0.0)
    rel_err = l2_norm(recon - u0) / l2_norm(u0)
    elapsed = time.perf_counter() - start
    log.info("example %d, %g%% noise, seed %d: alpha=%.6g rel_err=%.6g (%.2fs)",
             ex, perc_noise, seed, alpha, rel_err, elapsed)
    report = RunReport(ex, float(perc_noise), delta, alpha, rel_err, elapsed, seed)
    return report, recon


def convergence_study(ex, perc_list, seeds=(0, 1, 2), cfg=PipelineConfig()):
    """Least-squares slope of ``ln(rel_err)`` against ``ln(delta)``.

    Each level contributes one point: ``delta`` and the rel_err averaged over
    ``seeds``.
    """
    levels = sorted({float(p) for p in perc_list}, reverse=True)
    if len(levels) < 3:
        raise DomainError(f"need at least 3 distinct noise levels, got {len(levels)}")
    if min(levels) <= 0:
        raise DomainError("noise levels must be positive")
    if math.log10(levels[0] / levels[-1]) < 1.5:
        log.warning("noise levels span only %.2f decades", math.log10(levels[0] / levels[-1]))
    if not seeds:
        raise DomainError("need at least one seed per level")
    points = []
    for perc in levels:
        reports = [run_example(ex, perc, seed, cfg)[0] for seed in seeds]
        delta = math.fsum(r.delta for r in reports) / len(reports)
        err = math.fsum(r.rel_err for r in reports) / len(reports)
        points.append((math.log(delta), math.log(err)))
    x = np.array([p[0] for p in points])
    y = np.array([p[1] for p in points])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return RatesReport(tuple(points), float(slope), float(intercept), r2)


def _replicate(args):
    ex, perc_noise, seed, cfg = args
    try:
        report, _ = run_example(ex, perc_noise, seed, cfg)
    except Exception as exc:
        raise ReplicationError(seed, exc) from exc
    return report.rel_err, report.alpha


def monte_carlo(ex, perc_noise, n_reps, base_seed=0, cfg=PipelineConfig(), workers=1):
    """Replicate :func:`run_example` with seeds ``base_seed + i``.

    The variance is the population variance (``n_reps`` in the denominator).
    Sums use :func:`math.fsum`, so the summary does not depend on the order
    in which replications finish.
    """
    if not (isinstance(n_reps, (int, np.integer)) and n_reps >= 1):
        raise DomainError(f"n_reps must be a positive integer, got {n_reps!r}")
    jobs = [(ex, perc_noise, base_seed + i, cfg) for i in range(n_reps)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_replicate, jobs))
    else:
        results = [_replicate(job) for job in jobs]
    errs = [r[0] for r in results]
    alphas = [r[1] for r in results]
    mean = math.fsum(errs) / n_reps
    var = math.fsum((e - mean) ** 2 for e in errs) / n_reps
    return MCSummary(n_reps, mean, var, math.fsum(alphas) / n_reps, tuple(errs), tuple(alphas))
