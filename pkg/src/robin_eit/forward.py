"""Separation-of-variables forward model for the unit disk with a concentric Robin interface.

The potential is harmonic in the annulus ``rho < r < 1`` and in the inclusion
``r < rho``.  Each Fourier mode ``f_n`` of the impedance data produces

    outer:  a_n r^|n| + b_n r^-|n|      (a_0 + b_0 ln r for n = 0)
    inner:  c_n r^|n|

with ``a_n = alpha_n f_n``, ``b_n = beta_n f_n`` and ``c_n = omega_n f_n``.  The
three conditions fixing the mode are

    sigma_out u_r + u = f                         at r = 1
    u(rho+) = u(rho-)
    sigma_out u_r(rho+) - sigma_in u_r(rho-) = gamma u(rho)

The gap kernel ``K(phi - phi')`` has Fourier coefficients
``kappa_n = alpha_n + beta_n - 1 / (sigma_out |n| + 1)`` (``alpha_0 - 1`` for n = 0).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._validation import check_positive
from .exceptions import DegenerateConfigurationError, DomainError

#: Largest condition number accepted for an equilibrated mode system.
MAX_CONDITION = 1e14


@dataclass(frozen=True)
class MediumConfig:
    """Geometry and physics of the disk problem.

    Parameters
    ----------
    rho : float
        Radius of the interior circle, ``0 < rho < 1``.
    sigma_out, sigma_in : float
        Background and inclusion conductivities.
    gamma : float
        Interface transmission parameter, ``gamma >= 0``.
    """

    rho: float = 0.4
    sigma_out: float = 1.0
    sigma_in: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        rho = check_positive(self.rho, "rho")
        if not rho < 1.0:
            raise DomainError(f"rho must lie in (0, 1), got {rho}")
        check_positive(self.sigma_out, "sigma_out")
        check_positive(self.sigma_in, "sigma_in")
        check_positive(self.gamma, "gamma", strict=False)

    @property
    def has_interface(self):
        return self.gamma != 0 or self.sigma_in != self.sigma_out


@dataclass(frozen=True)
class ModeCoefficients:
    """Response factors of one Fourier mode.

    ``gap`` is the kernel coefficient ``alpha + beta - 1/(sigma_out |n| + 1)``
    computed from the perturbation of the background solution, so it carries
    no cancellation error when the interface is weak or the mode is high.
    """

    n: int
    alpha: float
    beta: float
    omega: float
    gap: float


@dataclass(frozen=True)
class BoundaryGrid:
    n_points: int = 32

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 1:
            raise DomainError(f"n_points must be a positive integer, got {self.n_points!r}")

    @property
    def spacing(self):
        return 2.0 * np.pi / self.n_points

    @property
    def angles(self):
        return self.spacing * np.arange(self.n_points)


@dataclass(frozen=True)
class KernelSpec:
    truncation_order: int = 10

    def __post_init__(self):
        if int(self.truncation_order) != self.truncation_order or self.truncation_order < 1:
            raise DomainError(
                f"truncation_order must be an integer >= 1, got {self.truncation_order!r}"
            )


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Discretized gap operator on a boundary grid, possibly with noise."""

    entries: np.ndarray
    grid: BoundaryGrid
    noise_level: float = 0.0
    seed: int | None = None
    medium: MediumConfig | None = None
    kernel: KernelSpec | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.float64)
        n = self.grid.n_points
        if entries.shape != (n, n):
            raise DomainError(f"entries must have shape {(n, n)}, got {entries.shape}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def shape(self):
        return self.entries.shape

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def symmetry_defect(self):
        return float(np.max(np.abs(self.entries - self.entries.T)))

    def describe(self):
        """Metadata record for export alongside the CSV entries."""
        record = {
            "n_points": self.grid.n_points,
            "truncation_order": None if self.kernel is None else self.kernel.truncation_order,
            "noise_level": self.noise_level,
            "seed": self.seed,
            "rng": "numpy.random.PCG64" if self.seed is not None else None,
        }
        if self.medium is not None:
            record["medium"] = {
                "rho": self.medium.rho,
                "sigma_out": self.medium.sigma_out,
                "sigma_in": self.medium.sigma_in,
                "gamma": self.medium.gamma,
            }
        record.update(self.metadata)
        return record


def _mode_system(m, medium):
    """Equilibrated 3x3 system for mode ``m = |n|``.

    Unknowns are scaled so the columns stay O(1) for high modes:
    ``(a, b * rho**-m, c * rho**m)`` for m > 0 and ``(a, b, c)`` for m = 0.
    Returns the matrix, the background solution in scaled unknowns, and the
    column scale that maps scaled unknowns back to ``(a, b, c)``.
    """
    rho, s_out, s_in, gamma = medium.rho, medium.sigma_out, medium.sigma_in, medium.gamma
    if m == 0:
        M = np.array(
            [
                [1.0, s_out, 0.0],
                [1.0, np.log(rho), -1.0],
                [0.0, s_out / rho, -gamma],
            ]
        )
        background = np.array([1.0, 0.0, 1.0])
        scale = np.ones(3)
    else:
        rm = rho**m
        M = np.array(
            [
                [s_out * m + 1.0, (1.0 - s_out * m) * rm, 0.0],
                [rm, 1.0, -1.0],
                [s_out * m * rm / rho, -s_out * m / rho, -(s_in * m / rho + gamma)],
            ]
        )
        a0 = 1.0 / (s_out * m + 1.0)
        background = np.array([a0, 0.0, a0 * rm])
        with np.errstate(over="ignore"):
            scale = np.array([1.0, rm, rho ** (-m)])
    return M, background, scale


@lru_cache(maxsize=4096)
def solve_mode(n, medium):
    """Solve the mode system for ``|n|`` and return its response factors.

    The background solution (no interface) satisfies the Robin and continuity
    rows exactly, so only the jump row carries a residual.  Solving for the
    correction keeps ``gap`` free of cancellation.

    Raises
    ------
    DegenerateConfigurationError
        If the row-equilibrated system has condition number above ``MAX_CONDITION``.
    """
    m = abs(int(n))
    M, background, scale = _mode_system(m, medium)
    with np.errstate(all="ignore"):
        row_norm = np.max(np.abs(M), axis=1, keepdims=True)
        M_eq = M / row_norm
        cond = np.linalg.cond(M_eq) if np.all(np.isfinite(M_eq)) else np.inf
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise DegenerateConfigurationError(int(n), cond)

    if not medium.has_interface:
        alpha, beta, omega = background * scale
        return ModeCoefficients(int(n), float(alpha), float(beta), float(omega), 0.0)
    residual = -(M @ background)
    residual[:2] = 0.0  # exact for the background solution
    correction = np.linalg.solve(M_eq, residual / row_norm[:, 0])
    with np.errstate(invalid="ignore"):
        alpha, beta, omega = (background + correction) * scale
    if m == 0:
        gap = correction[0]
    else:
        gap = correction[0] + correction[1] * scale[1]
    return ModeCoefficients(int(n), float(alpha), float(beta), float(omega), float(gap))


def kernel_coefficient(n, medium):
    """Fourier coefficient of the gap kernel for mode ``n``."""
    return solve_mode(n, medium).gap


def kernel_coefficients(medium, kernel):
    """Coefficients ``kappa_0 .. kappa_nmax`` as an array."""
    return np.array(
        [kernel_coefficient(n, medium) for n in range(kernel.truncation_order + 1)]
    )


def assemble_operator(medium, grid=None, kernel=None):
    """Nystrom discretization of the gap operator on ``grid``.

    ``A[i, j] = K(phi_i - phi_j) / N`` with the real cosine form
    ``K(t) = kappa_0 + 2 sum_{n=1}^{nmax} kappa_n cos(n t)``; the ``1/(2 pi)``
    prefactor of the integral operator and the trapezoid weight ``2 pi / N``
    combine into ``1/N``.
    """
    grid = BoundaryGrid() if grid is None else grid
    kernel = KernelSpec() if kernel is None else kernel
    kappa = kernel_coefficients(medium, kernel)
    phi = grid.angles
    diff = phi[:, None] - phi[None, :]
    K = np.full_like(diff, kappa[0])
    for n in range(1, kernel.truncation_order + 1):
        K += 2.0 * kappa[n] * np.cos(n * diff)
    return OperatorMatrix(K / grid.n_points, grid, medium=medium, kernel=kernel)


def apply_noise(A, delta, seed):
    """Multiplicative noise ``A_ij (1 + delta E_ij)`` with ``||E||_2 = 1``.

    ``E`` has i.i.d. uniform entries on ``[-1, 1]`` drawn from a PCG64 generator
    seeded with ``seed`` and is rescaled to unit spectral norm after drawing.
    """
    delta = check_positive(delta, "delta", strict=False)
    if delta == 0:
        return A
    entries = A.entries
    rng = np.random.default_rng(seed)
    E = rng.uniform(-1.0, 1.0, size=entries.shape)
    E /= np.linalg.norm(E, 2)
    noisy = entries * (1.0 + delta * E)

    # Schur's bound guarantees this; checked rather than assumed.
    norm_A = np.linalg.norm(entries, 2)
    if np.linalg.norm(noisy - entries, 2) > delta * norm_A * (1.0 + 1e-12) + 1e-300:
        raise ArithmeticError("noise realization violates ||A_delta - A|| <= delta ||A||")
    return OperatorMatrix(
        noisy, A.grid, noise_level=delta, seed=seed,
        medium=A.medium, kernel=A.kernel, metadata=dict(A.metadata),
    )


def _branch_for(r, medium, branch):
    if branch is None:
        return "outer" if r > medium.rho else "inner"
    if branch not in ("outer", "inner"):
        raise DomainError(f"branch must be 'outer', 'inner' or None, got {branch!r}")
    return branch


def _check_f_coeffs(f_coeffs, kernel):
    f = np.asarray(f_coeffs, dtype=np.complex128)
    expected = 2 * kernel.truncation_order + 1
    if f.shape != (expected,):
        raise DomainError(
            f"f_coeffs must hold modes -{kernel.truncation_order}..{kernel.truncation_order} "
            f"({expected} values), got shape {f.shape}"
        )
    return f


def _series(r, phi, medium, f_coeffs, kernel, branch, derivative):
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"r must lie in [0, 1], got {r}")
    f = _check_f_coeffs(f_coeffs, kernel)
    side = _branch_for(r, medium, branch)
    nmax = kernel.truncation_order
    total = 0.0j
    for n in range(-nmax, nmax + 1):
        if f[n + nmax] == 0:
            continue
        coef = solve_mode(n, medium)
        m = abs(n)
        if side == "outer":
            if m == 0:
                radial = coef.beta / r if derivative else coef.alpha + coef.beta * np.log(r)
            elif derivative:
                radial = m * (coef.alpha * r ** (m - 1) - coef.beta * r ** (-m - 1))
            else:
                radial = coef.alpha * r**m + coef.beta * r ** (-m)
        else:
            if m == 0:
                radial = 0.0 if derivative else coef.omega
            elif derivative:
                radial = m * coef.omega * r ** (m - 1)
            else:
                radial = coef.omega * r**m
        total += f[n + nmax] * radial * np.exp(1j * n * phi)
    return complex(total)


def evaluate_potential(r, phi, medium, f_coeffs, kernel, branch=None):
    """Evaluate the truncated series solution at polar point ``(r, phi)``.

    ``f_coeffs`` holds the impedance Fourier coefficients ordered
    ``n = -nmax, ..., nmax``.  ``branch`` forces the annulus (``'outer'``) or
    inclusion (``'inner'``) formula, which gives one-sided traces at ``r = rho``.
    """
    return _series(r, phi, medium, f_coeffs, kernel, branch, derivative=False)


def radial_derivative(r, phi, medium, f_coeffs, kernel, branch=None):
    """Analytic ``d/dr`` of :func:`evaluate_potential`."""
    return _series(r, phi, medium, f_coeffs, kernel, branch, derivative=True)


def boundary_trace(medium, f_coeffs, kernel, angles):
    """Trace ``u(1, phi)`` on ``angles`` for a real, band-limited impedance."""
    f = _check_f_coeffs(f_coeffs, kernel)
    nmax = kernel.truncation_order
    out = np.zeros(len(angles), dtype=np.complex128)
    for n in range(-nmax, nmax + 1):
        c = solve_mode(n, medium)
        gain = c.alpha if n == 0 else c.alpha + c.beta
        out += gain * f[n + nmax] * np.exp(1j * n * np.asarray(angles))
    return out
