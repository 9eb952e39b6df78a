"""Independent oracles for the test suite and ``robin-eit --self-check``.

Nothing here imports the production mode solver or the TTLS path; each oracle
reaches its answer by a different route:

* ``fd_forward_solve``: second-order finite differences on a polar mesh whose
  radial lines include ``r = rho``.
* ``symbolic_mode_solve``: Cramer's rule on the mode system in 50-digit
  arithmetic, with rows built from the radial basis functions.
* ``direct_ttls``: truncated TLS from the eigendecomposition of ``C^T C`` for
  ``C = [A | b]`` instead of an SVD of ``C``.
"""
from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .exceptions import DegenerateConfigurationError, DomainError, NonGenericTLSError
from .forward import ModeCoefficients


@dataclass(frozen=True)
class PolarMesh:
    """Polar mesh with ``n_inner`` radial cells in ``[0, rho]`` and the rest in ``[rho, 1]``."""

    n_r: int
    n_theta: int
    n_inner: int

    @classmethod
    def aligned_to(cls, rho, n_r, n_theta):
        return cls(n_r, n_theta, int(round(rho * n_r)))

    @property
    def n_outer(self):
        return self.n_r - self.n_inner

    @property
    def aligned(self):
        # The interface stencils need two cells on each side.
        return self.n_inner >= 2 and self.n_outer >= 2

    @property
    def angles(self):
        return 2.0 * np.pi * np.arange(self.n_theta) / self.n_theta


def _impedance_values(f_coeffs, angles):
    f = np.asarray(f_coeffs, dtype=np.complex128)
    nmax = (f.size - 1) // 2
    n = np.arange(-nmax, nmax + 1)
    return np.exp(1j * np.outer(angles, n)) @ f


def fd_forward_solve(medium, f_coeffs, mesh):
    """Boundary trace ``u(1, theta_k)`` from a finite-difference solve.

    Interior rows use the conservative five-point polar Laplacian.  The centre
    is a single unknown tied to the ring average of the first radial line.  The
    interface and outer boundary rows use one-sided second-order differences
    for ``u_r``.

    Parameters
    ----------
    medium : MediumConfig
    f_coeffs : array_like
        Impedance Fourier coefficients ordered ``n = -nmax, ..., nmax``.
    mesh : PolarMesh
        Must be aligned with ``medium.rho``.

    Returns
    -------
    ndarray, shape (mesh.n_theta,)
        Complex boundary trace (real data gives a real-valued trace up to rounding).
    """
    if not mesh.aligned:
        raise DomainError("the polar mesh must put r = rho on a radial line")
    rho, s_out, s_in, gamma = medium.rho, medium.sigma_out, medium.sigma_in, medium.gamma
    n_in, n_out, nt = mesh.n_inner, mesh.n_outer, mesh.n_theta
    h_in, h_out = rho / n_in, (1.0 - rho) / n_out
    r = np.concatenate([h_in * np.arange(1, n_in + 1), rho + h_out * np.arange(1, n_out + 1)])
    n_rings = r.size
    iface, edge = n_in - 1, n_rings - 1
    dth2 = (2.0 * np.pi / nt) ** 2
    k = np.arange(nt)

    def node(i, shift=0):
        return 1 + i * nt + (k + shift) % nt

    rows, cols, vals = [], [], []

    def put(eq, col, value):
        rows.append(np.broadcast_to(eq, (nt,)))
        cols.append(np.broadcast_to(col, (nt,)))
        vals.append(np.broadcast_to(value, (nt,)))

    n_unknowns = 1 + n_rings * nt
    rhs = np.zeros(n_unknowns, dtype=np.complex128)
    # centre: u(0) equals the mean over the first ring (discrete mean-value property)
    put(np.zeros(nt, dtype=int), 0, -1.0 / nt)
    put(np.zeros(nt, dtype=int), node(0), 1.0 / nt)

    for i in range(n_rings):
        eq = node(i)
        if i == iface:
            put(eq, node(i), -1.5 * s_out / h_out - 1.5 * s_in / h_in - gamma)
            put(eq, node(i + 1), 2.0 * s_out / h_out)
            put(eq, node(i + 2), -0.5 * s_out / h_out)
            put(eq, node(i - 1), 2.0 * s_in / h_in)
            put(eq, node(i - 2) if i >= 2 else 0, -0.5 * s_in / h_in)
        elif i == edge:
            put(eq, node(i), 1.5 * s_out / h_out + 1.0)
            put(eq, node(i - 1), -2.0 * s_out / h_out)
            put(eq, node(i - 2), 0.5 * s_out / h_out)
            rhs[eq] = _impedance_values(f_coeffs, mesh.angles)
        else:
            h = h_in if i < n_in else h_out
            ri = r[i]
            rp, rm = (ri + 0.5 * h) / (ri * h * h), (ri - 0.5 * h) / (ri * h * h)
            ang = 1.0 / (ri * ri * dth2)
            put(eq, node(i), -(rp + rm) - 2.0 * ang)
            put(eq, node(i + 1), rp)
            put(eq, node(i - 1) if i > 0 else 0, rm)
            put(eq, node(i, 1), ang)
            put(eq, node(i, -1), ang)

    M = sp.csc_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_unknowns, n_unknowns),
    )
    u = spla.spsolve(M, rhs)
    return u[node(edge)]


def symbolic_mode_solve(n, medium, dps=50):
    """Mode response factors by Cramer's rule in ``dps``-digit arithmetic."""
    m = abs(int(n))
    with mpmath.workdps(dps):
        rho = mpmath.mpf(medium.rho)
        so, si, g = (mpmath.mpf(v) for v in (medium.sigma_out, medium.sigma_in, medium.gamma))
        if m == 0:
            outer = (lambda r: mpmath.mpf(1), lambda r: mpmath.log(r))
            d_outer = (lambda r: mpmath.mpf(0), lambda r: 1 / r)
            inner, d_inner = (lambda r: mpmath.mpf(1)), (lambda r: mpmath.mpf(0))
        else:
            outer = (lambda r: r**m, lambda r: r ** (-m))
            d_outer = (lambda r: m * r ** (m - 1), lambda r: -m * r ** (-m - 1))
            inner, d_inner = (lambda r: r**m), (lambda r: m * r ** (m - 1))
        one = mpmath.mpf(1)
        # unknowns (a, b, c): outer = a*outer[0] + b*outer[1], inner = c*inner
        M = mpmath.matrix([
            [so * d_outer[0](one) + outer[0](one), so * d_outer[1](one) + outer[1](one), 0],
            [outer[0](rho), outer[1](rho), -inner(rho)],
            [so * d_outer[0](rho), so * d_outer[1](rho), -(si * d_inner(rho) + g * inner(rho))],
        ])
        rhs = mpmath.matrix([1, 0, 0])
        det = mpmath.det(M)
        scale = mpmath.mnorm(M, 1) ** 3
        if abs(det) <= mpmath.mpf(10) ** (-dps + 5) * scale:
            raise DegenerateConfigurationError(int(n), float("inf"))
        sol = []
        for col in range(3):
            Mc = M.copy()
            for row in range(3):
                Mc[row, col] = rhs[row]
            sol.append(mpmath.det(Mc) / det)
        a, b, c = sol
        background = one if m == 0 else one / (so * m + 1)
        gap = a - background if m == 0 else a + b - background
        return ModeCoefficients(int(n), float(a), float(b), float(c), float(gap))


def direct_ttls(A, b, k):
    """Truncated TLS solution of ``A x = b`` keeping ``k`` components.

    Uses the eigenvectors of ``C^T C`` (``C = [A | b]``) ordered by decreasing
    eigenvalue as the right singular vectors of ``C``.
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = A.shape[1]
    if not 1 <= k <= n:
        raise DomainError(f"k must lie in [1, {n}], got {k}")
    C = np.column_stack([A, b])
    evals, evecs = np.linalg.eigh(C.T @ C)
    V = evecs[:, ::-1]
    V12, v22 = V[:n, k:], V[n, k:]
    tail = float(v22 @ v22)
    if tail == 0.0:
        raise NonGenericTLSError("vanishing tail of the last row of V")
    return -V12 @ v22 / tail
