"""Self-checks behind ``fracmollify verify``: special-function oracles and
the growth rate of ``sup (1 + x) exp(-b x**d)``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfcx

from .mittag_leffler import get_evaluator, ml_e_gamma_1, ml_reference, sup_fbd

__all__ = ["Check", "run_checks", "fbd_slope"]


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def _max_rel(a, b):
    return float(np.max(np.abs(np.asarray(a) / np.asarray(b) - 1.0)))


def fbd_slope(d, bs=None):
    """Least-squares slope of ``log sup f_{b,d}`` against ``log b``."""
    bs = np.logspace(-1, -6, 6) if bs is None else np.asarray(bs)
    vals = [sup_fbd(float(b), d)[1] for b in bs]
    return float(np.polyfit(np.log(bs), np.log(vals), 1)[0])


def run_checks(n_points=200):
    checks = []
    x = np.linspace(-30.0, 0.0, n_points)
    err = _max_rel(ml_e_gamma_1(1.0, x), np.exp(x))
    checks.append(Check("ml exp identity (gamma=1, x in [-30,0])", err <= 1e-10, f"max rel err {err:.2e}"))

    x = np.linspace(-25.0, 0.0, n_points)
    err = _max_rel(ml_e_gamma_1(0.5, x), erfcx(-x))
    checks.append(Check("ml erfc identity (gamma=1/2, x in [-25,0])", err <= 1e-8, f"max rel err {err:.2e}"))

    for gamma in (0.2, 0.5, 0.8):
        xs = np.linspace(-30.0, 0.0, 7)
        ref = [ml_reference(gamma, v, 1e-14) for v in xs]
        err = _max_rel(ml_e_gamma_1(gamma, xs), ref)
        checks.append(Check(f"ml reference (gamma={gamma})", err <= 1e-10, f"max rel err {err:.2e}"))

    for gamma in (0.2, 0.5, 0.8):
        worst = get_evaluator(gamma).seam_mismatch()
        checks.append(Check(f"ml seam continuity (gamma={gamma})", worst <= 1e-12, f"max jump {worst:.2e}"))

    for d in (0.5, 1.0, 2.0):
        slope = fbd_slope(d)
        ok = abs(slope + 1.0 / d) <= 0.05
        checks.append(Check(f"sup f_(b,d) slope (d={d})", ok, f"slope {slope:.4f}, expected {-1.0 / d:.4f}"))

    x_star, value = sup_fbd(0.1, 1.0)
    err = abs(value / (10.0 * math.exp(-0.9)) - 1.0)
    checks.append(Check("sup f_(b,1) closed form (b=0.1)", err <= 1e-10 and abs(x_star - 9.0) < 1e-8,
                        f"x*={x_star:.12g}, rel err {err:.2e}"))
    return checks
