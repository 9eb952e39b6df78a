"""Linear sampling and regularized factorization indicators on a sampling grid.

For a sampling point ``z`` with Green's trace ``b_z``:

    W_LSM(z) = 1 / ||f_alpha^z||,          f_alpha^z = filtered solution of A f = b_z
    W_RFM(z) = 1 / sum_n phi(s_n)^2 / s_n |<u_n, b_z>|^2

Points where the norm or the sum vanishes are flagged instead of producing an
infinite value.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_positive
from .exceptions import DomainError, EmptyMapError, ZeroOperatorError
from .forward import BoundaryGrid
from .greens import R_MAX, greens_trace_matrix
from .regularize import (
    FilterSpec,
    SpectralSystem,
    decompose,
    spectral_filters,
    ttls_filter_matrix,
    ttls_solutions,
)

METHODS = ("lsm", "rfm")
DEFAULT_RESOLUTION = 101
DEFAULT_TAU = 0.5
#: Annulus used as the exterior reference region when scoring.
EXTERIOR_ANNULUS = (0.6, 0.9)
_CHUNK = 1024


@dataclass(frozen=True, eq=False)
class ImagingGrid:
    """Cartesian lattice over ``[-1, 1]^2`` restricted to ``|z| <= r_max``."""

    resolution: int = DEFAULT_RESOLUTION
    r_max: float = R_MAX

    def __post_init__(self):
        if int(self.resolution) != self.resolution or self.resolution < 2:
            raise DomainError(f"resolution must be an integer >= 2, got {self.resolution!r}")
        if not 0.0 < self.r_max < 1.0:
            raise DomainError(f"r_max must lie in (0, 1), got {self.r_max}")
        axis = np.linspace(-1.0, 1.0, self.resolution)
        X, Y = np.meshgrid(axis, axis)
        mask = np.hypot(X, Y) <= self.r_max
        rows, cols = np.nonzero(mask)
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "points", np.column_stack([X[mask], Y[mask]]))

    def __len__(self):
        return self.points.shape[0]

    @property
    def spacing(self):
        return 2.0 / (self.resolution - 1)

    @property
    def radii(self):
        return np.hypot(self.points[:, 0], self.points[:, 1])

    @property
    def thetas(self):
        return np.arctan2(self.points[:, 1], self.points[:, 0])


@dataclass(frozen=True, eq=False)
class IndicatorMap:
    grid: ImagingGrid
    values: np.ndarray
    method: str
    filter: FilterSpec
    normalized: bool = False
    flags: np.ndarray | None = None
    guard_hits: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.flags is None:
            object.__setattr__(self, "flags", np.zeros(self.values.shape, dtype=bool))

    @property
    def n_flagged(self):
        return int(np.count_nonzero(self.flags))

    @property
    def name(self):
        return f"{self.method}_{self.filter.label}"


@dataclass(frozen=True)
class ReconMetrics:
    contrast: float
    jaccard: float
    argmax_dist: float
    flagged: int = 0

    def as_dict(self):
        return {
            "contrast": self.contrast,
            "jaccard": self.jaccard,
            "argmax_dist": self.argmax_dist,
            "flagged": self.flagged,
        }


def _traces(points_r, points_t, sigma, n):
    return greens_trace_matrix(points_r, points_t, sigma, BoundaryGrid(n))


def lsm_values(operator, radii, thetas, sigma, spec):
    """Raw LSM indicator and flags at polar sampling points."""
    system = operator if isinstance(operator, SpectralSystem) else decompose(operator)
    if len(system) == 0:
        raise ZeroOperatorError("operator has an empty spectrum")
    n = system.size
    spec.check_truncation(n)
    B = _traces(radii, thetas, sigma, n)
    if spec.scheme == "ttls":
        norms = np.concatenate([
            np.linalg.norm(ttls_solutions(system.matrix, B[i:i + _CHUNK], spec.param), axis=1)
            for i in range(0, B.shape[0], _CHUNK)
        ])
    else:
        weights = spectral_filters(system, spec) / system.singular_values
        norms = np.linalg.norm(system.coefficients(B) * weights, axis=1)
    return _invert(norms)


def rfm_values(system, radii, thetas, sigma, spec):
    """Raw RFM indicator, flags and TTLS pole-guard count at polar sampling points."""
    if len(system) == 0:
        raise ZeroOperatorError("operator has an empty spectrum")
    n = system.size
    spec.check_truncation(n)
    B = _traces(radii, thetas, sigma, n)
    coef2 = system.coefficients(B) ** 2
    guard_hits = 0
    if spec.scheme == "ttls":
        sums = np.empty(B.shape[0])
        for i in range(0, B.shape[0], _CHUNK):
            phi, skipped = ttls_filter_matrix(system, B[i:i + _CHUNK], spec.param)
            sums[i:i + _CHUNK] = np.sum(phi**2 / system.singular_values * coef2[i:i + _CHUNK], axis=1)
            guard_hits += int(skipped.sum())
    else:
        phi = spectral_filters(system, spec)
        sums = coef2 @ (phi**2 / system.singular_values)
    values, flags = _invert(sums)
    return values, flags, guard_hits


def _invert(x):
    flags = ~(x > 0) | ~np.isfinite(x)
    with np.errstate(divide="ignore"):
        values = np.where(flags, 0.0, 1.0 / np.where(flags, 1.0, x))
    return values, flags


def lsm_indicator(A, grid, sigma, spec):
    """Raw (unnormalized) linear sampling indicator over ``grid``."""
    sigma = check_positive(sigma, "sigma")
    values, flags = lsm_values(A, grid.radii, grid.thetas, sigma, spec)
    return IndicatorMap(grid, values, "lsm", spec, normalized=False, flags=flags)


def rfm_indicator(system, grid, sigma, spec):
    """Raw (unnormalized) regularized factorization indicator over ``grid``."""
    sigma = check_positive(sigma, "sigma")
    if not isinstance(system, SpectralSystem):
        system = decompose(system)
    values, flags, hits = rfm_values(system, grid.radii, grid.thetas, sigma, spec)
    return IndicatorMap(grid, values, "rfm", spec, normalized=False, flags=flags, guard_hits=hits)


def normalize_values(values, flags):
    if np.all(flags):
        raise EmptyMapError("every point of the indicator map is flagged")
    peak = np.max(values[~flags])
    if not peak > 0:
        raise EmptyMapError("indicator map has no positive value")
    out = values / peak
    out[flags] = 1.0
    return out


def normalize_map(indicator):
    """Divide by the supremum over unflagged points; flagged points become 1."""
    values = normalize_values(indicator.values, indicator.flags)
    return IndicatorMap(
        indicator.grid, values, indicator.method, indicator.filter,
        normalized=True, flags=indicator.flags.copy(), guard_hits=indicator.guard_hits,
    )


def score(indicator, truth, tau=DEFAULT_TAU):
    """Reconstruction metrics of a normalized map against the true concentric disk.

    ``contrast`` is the mean value inside ``D`` over the mean on the annulus
    ``0.6 <= |z| <= 0.9``; ``jaccard`` compares ``{W >= tau}`` with ``D`` on the
    grid points; ``argmax_dist`` is the distance of the peak to the centre of ``D``, where a
    plateau of maximal values is represented by its centroid.
    """
    if not 0.0 < tau < 1.0:
        raise DomainError(f"tau must lie in (0, 1), got {tau}")
    W = indicator.values
    radii = indicator.grid.radii
    inside = radii < truth.rho
    lo, hi = EXTERIOR_ANNULUS
    annulus = (radii >= lo) & (radii <= hi)
    level = W >= tau
    union = np.count_nonzero(level | inside)
    jaccard = np.count_nonzero(level & inside) / union if union else 0.0
    if inside.any() and annulus.any():
        with np.errstate(divide="ignore"):
            contrast = float(np.float64(np.mean(W[inside])) / np.mean(W[annulus]))
    else:
        contrast = float("nan")
    # ties (plateaus) resolve to the centroid of the maximizing points
    valid = ~indicator.flags if not np.all(indicator.flags) else np.ones(W.shape, dtype=bool)
    top = valid & (W == W[valid].max())
    peak = indicator.grid.points[top].mean(axis=0)
    return ReconMetrics(
        contrast=contrast,
        jaccard=float(jaccard),
        argmax_dist=float(np.hypot(*peak)),
        flagged=indicator.n_flagged,
    )


def transition_band_area(indicator, low=0.25, high=0.75):
    """Area of the region where a normalized map lies between ``low`` and ``high``."""
    W = indicator.values
    count = np.count_nonzero((W >= low) & (W <= high))
    return count * indicator.grid.spacing**2
