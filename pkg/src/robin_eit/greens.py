"""Boundary trace of the Robin Green's function of the unit disk.

For a source at ``z = (rho_z, theta_z)`` the trace on ``|x| = 1`` is

    G(phi, z) = 1/(2 pi) * int_0^1 s^(1/sigma - 1) P(rho_z s, theta_z - phi) ds

with the Poisson kernel ``P(t, l) = (1 - t^2) / (1 - 2 t cos l + t^2)``.  The
substitution ``s = tau^sigma`` turns the integrand into the smooth function
``sigma P(rho_z tau^sigma, l)`` which is integrated with fixed Gauss-Legendre
nodes.  Expanding ``P`` in its Fourier series gives the independent check

    G(phi, z) = sigma/(2 pi) * sum_n rho_z^|n| e^{i n l} / (1 + sigma |n|).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_positive
from .exceptions import DomainError

#: Default cap on sampling radius.
R_MAX = 0.95
GAUSS_NODES = 64


@dataclass(frozen=True)
class SamplingPoint:
    rho_z: float
    theta_z: float = 0.0
    r_max: float = R_MAX

    def __post_init__(self):
        if not 0.0 <= self.rho_z <= self.r_max:
            raise DomainError(f"rho_z must lie in [0, {self.r_max}], got {self.rho_z}")
        if not 0.0 < self.r_max < 1.0:
            raise DomainError(f"r_max must lie in (0, 1), got {self.r_max}")
        object.__setattr__(self, "theta_z", float(np.mod(self.theta_z, 2.0 * np.pi)))

    @classmethod
    def from_cartesian(cls, x, y, r_max=R_MAX):
        return cls(float(np.hypot(x, y)), float(np.arctan2(y, x)), r_max)

    @property
    def cartesian(self):
        return self.rho_z * np.cos(self.theta_z), self.rho_z * np.sin(self.theta_z)


@dataclass(frozen=True, eq=False)
class GreensTrace:
    values: np.ndarray
    point: SamplingPoint
    sigma: float
    truncation_bound: float | None = None


def poisson_kernel(t, lam):
    """Poisson kernel of the unit disk, ``(1 - t^2) / (1 - 2 t cos(lam) + t^2)``."""
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0) or np.any(t >= 1):
        raise DomainError("poisson_kernel requires 0 <= t < 1")
    value = (1.0 - t**2) / (1.0 - 2.0 * t * np.cos(lam) + t**2)
    return value if value.ndim else float(value)


def _gauss_rule(n=GAUSS_NODES):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def greens_trace_matrix(radii, thetas, sigma, grid, n_nodes=GAUSS_NODES):
    """Quadrature traces for many sampling points at once.

    Parameters
    ----------
    radii, thetas : array_like, shape (n_samples,)
        Polar coordinates of the sampling points.
    sigma : float
        Background conductivity.
    grid : BoundaryGrid

    Returns
    -------
    ndarray, shape (n_samples, grid.n_points)
    """
    sigma = check_positive(sigma, "sigma")
    radii = np.atleast_1d(np.asarray(radii, dtype=np.float64))
    thetas = np.atleast_1d(np.asarray(thetas, dtype=np.float64))
    if np.any(radii < 0) or np.any(radii >= 1):
        raise DomainError("sampling radii must lie in [0, 1)")
    tau, w = _gauss_rule(n_nodes)
    weighted = sigma * w
    s_pow = tau**sigma
    cos_lam = np.cos(thetas[:, None] - grid.angles[None, :])
    out = np.empty((radii.size, grid.n_points))
    # Chunked so the (chunk, N, nodes) temporary stays small on fine grids.
    chunk = max(1, 2**20 // (grid.n_points * n_nodes))
    for start in range(0, radii.size, chunk):
        sl = slice(start, start + chunk)
        t = radii[sl, None, None] * s_pow[None, None, :]
        P = (1.0 - t**2) / (1.0 - 2.0 * t * cos_lam[sl, :, None] + t**2)
        out[sl] = P @ weighted
    return out / (2.0 * np.pi)


def robin_greens_trace(z, sigma, grid):
    """Trace of the Robin Green's function on ``grid`` for source point ``z``."""
    values = greens_trace_matrix([z.rho_z], [z.theta_z], sigma, grid)[0]
    return GreensTrace(values, z, float(sigma))


def series_truncation_bound(rho_z, sigma, n_max):
    """Entrywise bound on the tail ``|n| > n_max`` of the series oracle."""
    if rho_z == 0:
        return 0.0
    m = n_max + 1
    return sigma * rho_z**m / ((1.0 + sigma * m) * (1.0 - rho_z)) / np.pi


def greens_trace_series(z, sigma, grid, n_max):
    """Truncated Fourier-series evaluation of the Green's trace (oracle path)."""
    sigma = check_positive(sigma, "sigma")
    lam = z.theta_z - grid.angles
    n = np.arange(1, n_max + 1)
    weights = z.rho_z**n / (1.0 + sigma * n)
    values = 1.0 + 2.0 * (np.cos(np.outer(lam, n)) @ weights)
    values *= sigma / (2.0 * np.pi)
    return GreensTrace(values, z, sigma, series_truncation_bound(z.rho_z, sigma, n_max))
