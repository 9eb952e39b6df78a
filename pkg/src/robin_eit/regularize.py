"""Filtered-SVD regularization: Tikhonov, spectral cut-off and truncated TLS.

A filtered solution of ``A f = b`` has the form

    f = sum_n phi(s_n) / s_n * <u_n, b> v_n

with ``phi(t) = t^2 / (t^2 + alpha)`` (Tikhonov) or ``phi(t) = [t^2 >= alpha]``
(spectral cut-off).  Truncated TLS keeps the ``k`` leading right singular
vectors of the augmented matrix ``[A | b]`` and is evaluated in closed form; its
filter-factor representation is provided for the factorization indicator and
for diagnostics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_square_operator, check_vector
from .exceptions import DomainError, NonGenericTLSError, ZeroOperatorError

SCHEMES = ("tikhonov", "spectral_cutoff", "ttls")

#: Singular values below ``TRIM_RTOL * s_1`` are treated as zero.
TRIM_RTOL = 1e-15
#: TTLS filter terms with ``|sbar_m^2 - t^2| < POLE_RTOL * sbar_1^2`` are skipped.
POLE_RTOL = 1e-12
_TAIL_FLOOR = 1e-300


@dataclass(frozen=True, eq=False)
class SpectralSystem:
    """Trimmed SVD ``A = U diag(s) V^T`` of an operator matrix."""

    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray
    matrix: np.ndarray

    def __len__(self):
        return self.singular_values.size

    @property
    def size(self):
        return self.matrix.shape[0]

    def coefficients(self, B):
        """Inner products ``<u_n, b>`` for a vector or a stack of row vectors."""
        return np.asarray(B) @ self.left_vectors


@dataclass(frozen=True)
class FilterSpec:
    """Regularization scheme and its parameter.

    ``param`` is the real ``alpha >= 0`` for ``tikhonov`` and
    ``spectral_cutoff`` and the integer truncation index ``k >= 1`` for ``ttls``.
    ``alpha = 0`` means no regularization.
    """

    scheme: str
    param: float

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise DomainError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.scheme == "ttls":
            if isinstance(self.param, bool) or float(self.param) != int(self.param) or self.param < 1:
                raise DomainError(f"ttls truncation index must be an integer >= 1, got {self.param!r}")
            object.__setattr__(self, "param", int(self.param))
        else:
            alpha = float(self.param)
            if not math.isfinite(alpha) or alpha < 0:
                raise DomainError(f"alpha must be finite and nonnegative, got {self.param!r}")
            object.__setattr__(self, "param", alpha)

    @property
    def alpha(self):
        return self.param

    @property
    def label(self):
        if self.scheme == "ttls":
            return f"ttls_k{self.param}"
        return f"{self.scheme}_{self.param:.0e}".replace("+", "")

    def check_truncation(self, n):
        if self.scheme == "ttls" and not 1 <= self.param <= n - 1:
            raise DomainError(f"ttls truncation index must lie in [1, {n - 1}], got {self.param}")


@dataclass(frozen=True, eq=False)
class AugmentedSpectrum:
    """Singular values and last row of ``V`` for the augmented matrix ``[A | b]``."""

    singular_values: np.ndarray
    v_last_row: np.ndarray


def decompose(A):
    """Singular triplets of ``A`` with numerically zero values trimmed.

    Raises
    ------
    DomainError
        If ``A`` is not a finite square matrix.
    """
    A = check_square_operator(A, "A")
    U, s, Vt = np.linalg.svd(A)
    keep = s > TRIM_RTOL * s[0] if s.size and s[0] > 0 else np.zeros(s.size, dtype=bool)
    return SpectralSystem(s[keep], U[:, keep], Vt[keep].T, A)


def augmented_spectrum(A, b):
    A = check_square_operator(A, "A")
    b = check_vector(b, A.shape[0])
    _, sbar, Vbar_t = np.linalg.svd(np.column_stack([A, b]))
    return AugmentedSpectrum(sbar, Vbar_t[:, -1].copy())


def ttls_filter_factors(t, aug, k):
    """TTLS filter factors at ``t`` and the number of pole-guarded terms skipped.

    ``phi(t) = sum_{m<=k} vbar_m^2 / ||vbar_{k+1:}||^2 * t^2 / (sbar_m^2 - t^2)``
    where ``vbar`` is the last row of the augmented right singular vectors.
    """
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    phi, skipped = _ttls_filters(
        t[None, :], aug.singular_values[None, :], aug.v_last_row[None, :], k
    )
    return phi[0], int(skipped[0])


def _ttls_filters(t, sbar, vlast, k):
    """Batched TTLS filter factors.

    ``t`` is ``(P, r)``, ``sbar`` and ``vlast`` are ``(P, N + 1)``.  Returns the
    ``(P, r)`` filter values and a ``(P,)`` count of skipped pole terms.
    """
    tail = np.sum(vlast[:, k:] ** 2, axis=1)
    if np.any(tail <= _TAIL_FLOOR):
        raise NonGenericTLSError("last row of the augmented V has a vanishing tail")
    weights = vlast[:, :k] ** 2 / tail[:, None]  # (P, k)
    denom = sbar[:, None, :k] ** 2 - t[:, :, None] ** 2  # (P, r, k)
    pole = np.abs(denom) < POLE_RTOL * sbar[:, None, :1] ** 2
    safe = np.where(pole, 1.0, denom)
    terms = np.where(pole, 0.0, weights[:, None, :] * t[:, :, None] ** 2 / safe)
    return terms.sum(axis=2), pole.sum(axis=(1, 2))


def filter_value(spec, t, aug=None):
    """Evaluate the filter function of ``spec`` at ``t > 0``.

    ``aug`` is required for (and only for) the ``ttls`` scheme.
    """
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(~(t_arr > 0)):
        raise DomainError("filter argument t must be positive")
    if spec.scheme == "tikhonov":
        out = t_arr**2 / (t_arr**2 + spec.alpha)
    elif spec.scheme == "spectral_cutoff":
        out = np.where(t_arr**2 >= spec.alpha, 1.0, 0.0)
    else:
        if aug is None:
            raise DomainError("the ttls filter needs the augmented spectrum")
        out, _ = ttls_filter_factors(t_arr.ravel(), aug, spec.param)
        out = out.reshape(t_arr.shape)
    return float(out) if out.ndim == 0 else out


def _as_system(A):
    return A if isinstance(A, SpectralSystem) else decompose(A)


def spectral_filters(system, spec):
    """Filter values at every retained singular value (non-TTLS schemes)."""
    if spec.scheme == "ttls":
        raise DomainError("ttls filter values depend on the right-hand side")
    return filter_value(spec, system.singular_values)


def ttls_solutions(A, B, k):
    """Closed-form TTLS solutions for each row of ``B``.

    ``x = -Vbar[:N, k:] vbar^T / ||vbar||^2`` with ``vbar = Vbar[N, k:]``.
    """
    A = check_square_operator(A, "A")
    B = np.atleast_2d(np.asarray(B, dtype=np.float64))
    n = A.shape[0]
    C = np.concatenate([np.broadcast_to(A, (B.shape[0], n, n)), B[:, :, None]], axis=2)
    _, _, Vbar_t = np.linalg.svd(C)
    V12 = np.swapaxes(Vbar_t[:, k:, :n], 1, 2)  # (P, N, N+1-k)
    v22 = Vbar_t[:, k:, n]  # (P, N+1-k)
    tail = np.sum(v22**2, axis=1)
    if np.any(tail <= _TAIL_FLOOR):
        raise NonGenericTLSError("last row of the augmented V has a vanishing tail")
    return -np.einsum("pij,pj->pi", V12, v22) / tail[:, None]


def ttls_filter_matrix(system, B, k):
    """TTLS filter factors at the retained singular values for each row of ``B``.

    Returns ``(phi, skipped)`` of shapes ``(P, r)`` and ``(P,)``.
    """
    A = system.matrix
    B = np.atleast_2d(np.asarray(B, dtype=np.float64))
    n = A.shape[0]
    C = np.concatenate([np.broadcast_to(A, (B.shape[0], n, n)), B[:, :, None]], axis=2)
    _, sbar, Vbar_t = np.linalg.svd(C)
    t = np.broadcast_to(system.singular_values, (B.shape[0], len(system)))
    return _ttls_filters(t, sbar, Vbar_t[:, :, -1], k)


def filtered_solve(A, b, spec):
    """Regularized solution of ``A f = b`` for the filter ``spec``.

    Parameters
    ----------
    A : OperatorMatrix, ndarray or SpectralSystem
    b : GreensTrace or ndarray
    spec : FilterSpec

    Returns
    -------
    ndarray
        The filtered solution ``f_alpha``.
    """
    system = _as_system(A)
    b = check_vector(b, system.size)
    if len(system) == 0:
        raise ZeroOperatorError("operator has an empty spectrum")
    if spec.scheme == "ttls":
        spec.check_truncation(system.size)
        return ttls_solutions(system.matrix, b[None, :], spec.param)[0]
    phi = spectral_filters(system, spec)
    coef = system.coefficients(b)
    return system.right_vectors @ (phi / system.singular_values * coef)


def picard_terms(system, b):
    """``|<u_n, b>|^2 / s_n`` for every retained singular value."""
    coef = system.coefficients(check_vector(b, system.size))
    return coef**2 / system.singular_values


def picard_partial_sums(system, b, m_max=None):
    """Partial sums of ``sum_n |<u_n, b>|^2 / s_n`` for ``m = 1..m_max``."""
    terms = picard_terms(system, b)
    if m_max is None:
        m_max = terms.size
    if not 0 <= m_max <= terms.size:
        raise DomainError(f"m_max must lie in [0, {terms.size}], got {m_max}")
    return np.cumsum(terms[:m_max])


def picard_table(system, b):
    """Rows ``(n, s_n, |<u_n, b>|, partial_sum)`` for a Picard plot."""
    b = check_vector(b, system.size)
    coef = np.abs(system.coefficients(b))
    partial = picard_partial_sums(system, b)
    n = np.arange(1, len(system) + 1)
    return np.column_stack([n, system.singular_values, coef, partial])
