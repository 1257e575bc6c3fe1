"""A-priori and discrepancy-based choice of the mollification parameter."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import BracketError, DomainError, IterationLimitError, NoiseConditionError
from .grid import forward_ft, l2_norm

__all__ = [
    "MorozovConfig",
    "Discrepancy",
    "apriori_alpha",
    "check_noise_condition",
    "discrepancy",
    "morozov_geometric",
    "morozov_bisect",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MorozovConfig:
    theta: float = 1.01
    q: float = 0.99
    alpha0: float = 10.0
    max_iters: int = 5000

    def __post_init__(self):
        if not self.theta > 1:
            raise DomainError(f"theta must exceed 1, got {self.theta!r}")
        if not 0 < self.q < 1:
            raise DomainError(f"q must lie in (0, 1), got {self.q!r}")
        if not self.alpha0 > 0:
            raise DomainError(f"alpha0 must be positive, got {self.alpha0!r}")
        if not self.max_iters >= 1:
            raise DomainError(f"max_iters must be >= 1, got {self.max_iters!r}")


def apriori_alpha(delta, E, p, h=0.0):
    """``(h + delta/E)^(1/(p+2))``."""
    if not (delta >= 0 and E > 0 and p > 0 and h >= 0 and delta + h * E > 0):
        raise DomainError(
            f"need delta >= 0, E > 0, p > 0, h >= 0 and delta + h E > 0; "
            f"got delta={delta!r}, E={E!r}, p={p!r}, h={h!r}"
        )
    return (h + delta / E) ** (1.0 / (p + 2.0))


def check_noise_condition(gdelta, delta, theta):
    """True iff ``0 < theta * delta < ||gdelta||``."""
    if not (delta >= 0 and theta > 1):
        raise DomainError(f"need delta >= 0 and theta > 1, got delta={delta!r}, theta={theta!r}")
    return 0.0 < theta * delta < l2_norm(gdelta)


class Discrepancy:
    """``v(alpha) = ||(1 - exp(-tau (alpha |xi|)^s)) g_hat||`` for fixed data.

    The spectrum of the data is computed once, so repeated evaluations during
    a search cost one pass over the frequency grid each.
    """

    def __init__(self, gdelta, mp):
        grid = gdelta.grid
        self.mp = mp
        spec = forward_ft(gdelta).coeffs
        self._power = (spec.real**2 + spec.imag**2).ravel()
        self._xi_s = (grid.xi_squared ** (mp.s / 2.0)).ravel()
        self._measure = grid.dxi**grid.n_dims
        self.evaluations = 0

    def __call__(self, alpha):
        if not (alpha >= 0):
            raise DomainError(f"alpha must be >= 0, got {alpha!r}")
        self.evaluations += 1
        if alpha == 0:
            return 0.0
        damp = -np.expm1(-self.mp.tau * alpha**self.mp.s * self._xi_s)
        return math.sqrt(self._measure * float(np.dot(damp * damp, self._power)))

    def supremum(self):
        """Limit of ``v`` as ``alpha -> inf``: every node except ``xi = 0``."""
        return math.sqrt(self._measure * float(self._power[self._xi_s > 0].sum()))


def discrepancy(gdelta, alpha, mp):
    return Discrepancy(gdelta, mp)(alpha)


def _require_noise_condition(gdelta, delta, theta):
    if not check_noise_condition(gdelta, delta, theta):
        raise NoiseConditionError(
            f"noise condition 0 < theta*delta < ||g_delta|| violated: "
            f"theta*delta={theta * delta:.6g}, ||g_delta||={l2_norm(gdelta):.6g}"
        )


def morozov_geometric(gdelta, delta, mp, cfg=MorozovConfig(), v=None):
    """First ``alpha0 * q**k`` with ``v(alpha) <= theta * delta``.

    Equality counts as satisfied. ``v`` may be passed in to reuse a
    precomputed :class:`Discrepancy`.
    """
    _require_noise_condition(gdelta, delta, cfg.theta)
    v = Discrepancy(gdelta, mp) if v is None else v
    target = cfg.theta * delta
    alpha = cfg.alpha0
    iters = 0
    while v(alpha) > target:
        if iters >= cfg.max_iters:
            raise IterationLimitError(
                f"discrepancy still above {target:.6g} after {iters} steps (alpha={alpha:.6g})"
            )
        alpha *= cfg.q
        iters += 1
    log.debug("geometric search: alpha=%.6g after %d steps", alpha, iters)
    return alpha


def morozov_bisect(gdelta, delta, mp, theta=1.01, rel_tol=1e-6, alpha_start=1.0, v=None):
    """Solve ``v(alpha) = theta * delta`` by bisection on the increasing ``v``.

    The bracket is grown by factors of two from ``alpha_start``.
    """
    _require_noise_condition(gdelta, delta, theta)
    v = Discrepancy(gdelta, mp) if v is None else v
    target = theta * delta
    lo = hi = float(alpha_start)
    if v(hi) < target:
        while v(hi) < target:
            lo = hi
            hi *= 2.0
            if hi > 1e12:
                raise BracketError(
                    f"v(alpha) stays below theta*delta={target:.6g} up to alpha=1e12 "
                    f"(sup v = {v.supremum():.6g})"
                )
    else:
        while v(lo) > target:
            hi = lo
            lo *= 0.5
            if lo < 1e-300:
                raise BracketError("v(alpha) stays above theta*delta down to alpha=1e-300")
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        vm = v(mid)
        if abs(vm - target) <= rel_tol * target:
            return mid
        if vm > target:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 4 * np.finfo(float).eps * hi:
            break
    vm = v(mid)
    if abs(vm - target) <= rel_tol * target:
        return mid
    raise BracketError(f"bisection stalled at alpha={mid:.17g} with v={vm:.6g}, target={target:.6g}")
