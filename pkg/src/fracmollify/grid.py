r"""Half-offset grids, the continuous Fourier transform via FFT, and norms.

Nodes on each axis are ``x_j = -L + (j + 1/2) kappa`` (``j = 0..N-1``,
``kappa = 2L/N``) and frequencies ``xi_k = -Omega + k dxi`` with
``Omega = pi/kappa`` and ``dxi = pi/L``. Writing out ``x_j xi_k`` gives

.. math::

    e^{-i x_j \xi_k} = e^{i(\pi/2 - L\Omega)} \,(-1)^k e^{-i\pi k/N}
                       \,(-1)^j \, e^{-2\pi i jk/N},

so the midpoint rule for :math:`(2\pi)^{-1/2}\int f(x) e^{-ix\xi}dx` is an
ordinary FFT of ``(-1)^j f_j`` followed by the per-index factor
``kappa (2 pi)^{-1/2} C a_k`` with ``C = exp(i(pi/2 - L Omega))`` and
``a_k = (-1)^k exp(-i pi k/N)``. The inverse applies the conjugate factors
and the weight ``dxi (2 pi)^{-1/2}``; ``N kappa dxi = 2 pi`` makes the pair
exact inverses. In ``n`` dimensions the factors multiply axis by axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConsistencyError, DomainError

__all__ = [
    "GridSpec",
    "RealField",
    "SpectralField",
    "make_grid",
    "forward_ft",
    "inverse_ft",
    "l2_norm",
    "spectral_l2_norm",
    "sobolev_norm",
]

IMAG_RESIDUE_TOL = 1e-10


@dataclass(frozen=True)
class GridSpec:
    n_dims: int
    L: float
    N: int

    def __post_init__(self):
        if self.n_dims not in (1, 2):
            raise DomainError(f"n_dims must be 1 or 2, got {self.n_dims!r}")
        if not (self.L > 0 and math.isfinite(self.L)):
            raise DomainError(f"L must be positive, got {self.L!r}")
        if not isinstance(self.N, (int, np.integer)) or self.N < 8 or self.N & (self.N - 1):
            raise DomainError(f"N must be a power of two >= 8, got {self.N!r}")

    @property
    def kappa(self):
        return 2.0 * self.L / self.N

    @property
    def omega(self):
        return math.pi * self.N / (2.0 * self.L)

    @property
    def dxi(self):
        return math.pi / self.L

    @property
    def shape(self):
        return (self.N,) * self.n_dims

    @cached_property
    def nodes(self):
        return -self.L + (np.arange(self.N) + 0.5) * self.kappa

    @cached_property
    def frequencies(self):
        return -self.omega + np.arange(self.N) * self.dxi

    def mesh(self):
        """Node coordinates, one array of shape ``self.shape`` per axis."""
        return np.meshgrid(*([self.nodes] * self.n_dims), indexing="ij")

    @cached_property
    def xi_squared(self):
        """``|xi|**2`` at every frequency node (read-only)."""
        # integer offsets keep equal radii bit-identical
        k = np.arange(self.N) - self.N // 2
        m = k.astype(float) ** 2
        if self.n_dims == 2:
            m = m[:, None] + m[None, :]
        out = self.dxi**2 * m
        out.setflags(write=False)
        return out

    @cached_property
    def xi_abs(self):
        out = np.sqrt(self.xi_squared)
        out.setflags(write=False)
        return out

    @cached_property
    def _axis_factors(self):
        N = self.N
        k = np.arange(N)
        sign = np.where(k % 2 == 0, 1.0, -1.0)
        c = np.exp(1j * (math.pi / 2.0 - self.L * self.omega))
        fwd = (self.kappa / math.sqrt(2.0 * math.pi)) * c * sign * np.exp(-1j * math.pi * k / N)
        inv = (self.dxi / math.sqrt(2.0 * math.pi)) * N * np.conj(c * sign * np.exp(-1j * math.pi * k / N))
        return sign, fwd, inv

    def _outer(self, v):
        if self.n_dims == 1:
            return v
        return v[:, None] * v[None, :]

    @cached_property
    def forward_factor(self):
        return self._outer(self._axis_factors[1])

    @cached_property
    def inverse_factor(self):
        return self._outer(self._axis_factors[2])

    @cached_property
    def node_sign(self):
        return self._outer(self._axis_factors[0])


def make_grid(n_dims, L, N):
    return GridSpec(int(n_dims), float(L), int(N))


def _check_shape(grid, arr):
    if arr.shape != grid.shape:
        raise DomainError(f"array shape {arr.shape} does not match grid {grid.shape}")


@dataclass(frozen=True, eq=False)
class RealField:
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        _check_shape(self.grid, values)
        if not np.all(np.isfinite(values)):
            raise DomainError("field values must be finite")
        object.__setattr__(self, "values", values)

    def __add__(self, other):
        return RealField(self.grid, self.values + other.values)

    def __sub__(self, other):
        return RealField(self.grid, self.values - other.values)

    def __mul__(self, c):
        return RealField(self.grid, c * self.values)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class SpectralField:
    grid: GridSpec
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        _check_shape(self.grid, coeffs)
        object.__setattr__(self, "coeffs", coeffs)

    def __add__(self, other):
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __mul__(self, m):
        return SpectralField(self.grid, m * self.coeffs)

    __rmul__ = __mul__


def forward_ft(f):
    """Approximate ``(2 pi)^{-n/2} int f(x) exp(-i x.xi) dx`` at the frequency nodes."""
    grid = f.grid
    coeffs = np.fft.fftn(grid.node_sign * f.values) * grid.forward_factor
    return SpectralField(grid, coeffs)


def inverse_ft(F):
    """Discrete inverse of :func:`forward_ft`, returning the real part.

    Raises
    ------
    ConsistencyError
        If the imaginary residue exceeds ``1e-10`` times the real part in
        norm, i.e. the coefficients are not the transform of real data.
    """
    grid = F.grid
    if not np.all(np.isfinite(F.coeffs)):
        raise DomainError("spectral coefficients must be finite")
    values = grid.node_sign * np.fft.ifftn(F.coeffs * grid.inverse_factor)
    re = np.linalg.norm(values.real)
    im = np.linalg.norm(values.imag)
    if im > IMAG_RESIDUE_TOL * re:
        raise ConsistencyError(
            f"inverse transform has imaginary residue {im:.3e} vs real part {re:.3e}"
        )
    return RealField(grid, values.real)


def l2_norm(f):
    """Midpoint-rule L2 norm ``kappa^{n/2} ||values||_2``."""
    return f.grid.kappa ** (f.grid.n_dims / 2.0) * float(np.linalg.norm(f.values))


def spectral_l2_norm(F, weight=None):
    """``dxi^{n/2} ||weight * coeffs||_2`` over the frequency grid."""
    c = F.coeffs if weight is None else weight * F.coeffs
    return F.grid.dxi ** (F.grid.n_dims / 2.0) * float(np.linalg.norm(c))


def sobolev_norm(f, p):
    """Discrete ``H^p`` norm ``||(1 + |xi|^2)^{p/2} f_hat||``."""
    if not (p >= 0):
        raise DomainError(f"Sobolev order must be >= 0, got {p!r}")
    F = forward_ft(f)
    if p == 0:
        return spectral_l2_norm(F)
    return spectral_l2_norm(F, (1.0 + f.grid.xi_squared) ** (p / 2.0))
