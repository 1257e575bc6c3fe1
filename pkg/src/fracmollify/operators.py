"""Forward evolution, mollification and regularised backward solvers.

Every operator is a Fourier multiplier applied on the grid of
:mod:`fracmollify.grid`. Multipliers that involve the Mittag-Leffler function
are computed once per distinct ``|xi|**2`` and cached per
``(model, grid, t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .grid import forward_ft, inverse_ft
from .mittag_leffler import PsiApprox, get_evaluator

__all__ = [
    "DiffusionModel",
    "MollifierParams",
    "forward_solve",
    "mollify",
    "mollifier_multiplier",
    "regularized_backward",
    "spectral_cutoff_backward",
    "source_representer",
    "backward_multiplier",
]


@dataclass(frozen=True)
class DiffusionModel:
    """Sub-diffusion of order ``gamma`` observed at final time ``T``.

    ``psi`` selects the evaluator: ``None`` means the exact Mittag-Leffler
    function, a :class:`PsiApprox` the perturbed one.
    """

    gamma: float = 0.8
    T: float = 1.0
    psi: PsiApprox | None = None

    def __post_init__(self):
        if not (0.0 < self.gamma < 1.0):
            raise DomainError(f"gamma must lie in (0, 1), got {self.gamma!r}")
        if not (self.T > 0 and math.isfinite(self.T)):
            raise DomainError(f"T must be positive, got {self.T!r}")
        if self.psi is not None and self.psi.gamma != self.gamma:
            raise DomainError("perturbed evaluator has a different gamma")

    def check_time(self, t):
        if not (0.0 <= t <= self.T):
            raise DomainError(f"t must lie in [0, T={self.T}], got {t!r}")


@dataclass(frozen=True)
class MollifierParams:
    tau: float = 0.5
    s: float = 4.0

    def __post_init__(self):
        if not (self.tau > 0 and self.s > 0):
            raise DomainError(f"tau and s must be positive, got tau={self.tau!r}, s={self.s!r}")


def _ones(grid):
    out = np.ones(grid.shape)
    out.setflags(write=False)
    return out


def _radial(grid, fn):
    """Evaluate ``fn`` on the distinct values of ``|xi|**2`` and scatter back."""
    r2, inverse = np.unique(grid.xi_squared, return_inverse=True)
    out = fn(r2)[inverse].reshape(grid.shape)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=64)
def _propagator(model, grid, t):
    # E(-|xi|^2 t^gamma), or psi_h(|xi|, t) for a perturbed model
    if t == 0.0:
        return _ones(grid)
    if model.psi is None:
        ev = get_evaluator(model.gamma)
        return _radial(grid, lambda r2: ev.evaluate_neg(r2 * t**model.gamma))
    return _radial(grid, lambda r2: model.psi.at_squared(r2, t))


@lru_cache(maxsize=64)
def backward_multiplier(model, grid, t):
    """``psi(|xi|, t) / psi(|xi|, T)`` with ``psi(., 0) = 1``."""
    model.check_time(t)
    if t == model.T:
        return _ones(grid)
    if t == 0.0:
        out = 1.0 / _propagator(model, grid, model.T)
        out.setflags(write=False)
        return out
    if model.psi is None:
        ev = get_evaluator(model.gamma)
        return _radial(
            grid,
            lambda r2: ev.ratio_neg(r2 * t**model.gamma, r2 * model.T**model.gamma),
        )
    return _radial(grid, lambda r2: model.psi.ratio_squared(r2, t, model.T))


def mollifier_multiplier(grid, alpha, mp):
    """``exp(-tau (alpha |xi|)^s)`` on the frequency grid."""
    if alpha == 0:
        return np.ones(grid.shape)
    # (alpha |xi|)^s = alpha^s |xi|^s, computed from |xi|^2 to keep radii exact
    return np.exp(-mp.tau * alpha**mp.s * grid.xi_squared ** (mp.s / 2.0))


def _apply(f, multiplier):
    F = forward_ft(f)
    return inverse_ft(F * multiplier)


def forward_solve(u0, model, t):
    """Evolve ``u0`` to time ``t`` with the model's evaluator."""
    model.check_time(t)
    return _apply(u0, _propagator(model, u0.grid, float(t)))


def mollify(f, alpha, mp):
    """Convolve ``f`` with the rescaled kernel, i.e. multiply by ``exp(-tau (alpha|xi|)^s)``."""
    if not (alpha >= 0):
        raise DomainError(f"alpha must be >= 0, got {alpha!r}")
    return _apply(f, mollifier_multiplier(f.grid, alpha, mp))


def regularized_backward(gdelta, alpha, model, mp, t=0.0):
    """Regularised reconstruction of ``u(., t)`` from final-time data ``gdelta``.

    The frequency-domain multiplier is
    ``exp(-tau (alpha|xi|)^s) * psi(|xi|, t) / psi(|xi|, T)``. The time ratio
    is evaluated as one quantity (see :meth:`MittagLeffler.ratio_neg`), so no
    intermediate under- or overflows at large ``|xi|``.
    """
    if not (alpha > 0 and math.isfinite(alpha)):
        raise DomainError(f"alpha must be positive for a backward solve, got {alpha!r}")
    t = float(t)
    m = mollifier_multiplier(gdelta.grid, alpha, mp) * backward_multiplier(model, gdelta.grid, t)
    return _apply(gdelta, m)


def spectral_cutoff_backward(gdelta, xi_max, model, t=0.0):
    """Fourier-truncation baseline: keep ``|xi_j| <= xi_max`` on every axis."""
    if not (xi_max >= 0):
        raise DomainError(f"xi_max must be >= 0, got {xi_max!r}")
    grid = gdelta.grid
    t = float(t)
    inside = np.abs(grid.frequencies) <= xi_max
    box = inside if grid.n_dims == 1 else inside[:, None] & inside[None, :]
    m = np.where(box, backward_multiplier(model, grid, t), 0.0)
    return _apply(gdelta, m)


def source_representer(u0, model, p):
    """``w`` with ``w_hat = E(-|xi|^2 T^gamma)^(-p/2) u0_hat``.

    Diagnostic for the smoothness of ``u0`` relative to the forward operator.
    Always uses the exact evaluator.
    """
    if not (p >= 0):
        raise DomainError(f"p must be >= 0, got {p!r}")
    if p == 0:
        return _apply(u0, np.ones(u0.grid.shape))
    exact = DiffusionModel(model.gamma, model.T)
    E = _propagator(exact, u0.grid, exact.T)
    return _apply(u0, E ** (-p / 2.0))
