"""scikit-learn style estimators for sampling-type imaging.

An imager is fitted on a measured gap operator (an ``N x N`` matrix sampled on
``N`` equiangular boundary points) and then evaluated on sampling points::

    >>> from robin_eit import LinearSamplingImager, MediumConfig, assemble_operator
    >>> A = assemble_operator(MediumConfig(rho=0.4))
    >>> imager = LinearSamplingImager(regularization="tikhonov", alpha=1e-9).fit(A)
    >>> imager.predict([[0.0, 0.0], [0.8, 0.0]]).tolist()
    [True, False]

Both imagers expose ``get_params``/``set_params`` through ``BaseEstimator`` and
can be cloned or grid-searched like any other estimator.
"""
import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_positive, check_sampling_points, check_square_operator
from .greens import R_MAX
from .imaging import lsm_values, normalize_values, rfm_values
from .regularize import FilterSpec, decompose


class _SamplingImager(BaseEstimator):
    def __init__(self, regularization="tikhonov", alpha=1e-9, sigma=1.0,
                 threshold=0.5, r_max=R_MAX):
        self.regularization = regularization
        self.alpha = alpha
        self.sigma = sigma
        self.threshold = threshold
        self.r_max = r_max

    def fit(self, X, y=None):
        """Fit on the gap operator ``X`` of shape ``(N, N)``; ``y`` is ignored."""
        X = check_square_operator(X)
        check_positive(self.sigma, "sigma")
        self.filter_ = FilterSpec(self.regularization, self.alpha)
        self.filter_.check_truncation(X.shape[0])
        self.spectrum_ = decompose(X)
        self.n_boundary_points_ = X.shape[0]
        return self

    def _raw(self, Z):
        raise NotImplementedError

    def score_samples(self, Z):
        """Raw indicator at each sampling point; flagged points are NaN."""
        check_is_fitted(self, "spectrum_")
        Z = check_sampling_points(Z, self.r_max)
        values, flags = self._raw(Z)
        return np.where(flags, np.nan, values)

    def transform(self, Z):
        """Indicator normalized by its supremum over ``Z`` (flagged points map to 1)."""
        check_is_fitted(self, "spectrum_")
        Z = check_sampling_points(Z, self.r_max)
        values, flags = self._raw(Z)
        return normalize_values(values, flags)

    def predict(self, Z):
        """Membership estimate: normalized indicator ``>= threshold``."""
        return self.transform(Z) >= self.threshold


class LinearSamplingImager(_SamplingImager):
    """Linear sampling indicator ``1 / ||f_alpha^z||``.

    Parameters
    ----------
    regularization : {"tikhonov", "spectral_cutoff", "ttls"}
    alpha : float or int
        Regularization parameter; the truncation index for ``ttls``.
    sigma : float
        Background conductivity used in the Green's function.
    threshold : float
        Level used by :meth:`predict`.
    r_max : float
        Largest admissible sampling radius.
    """

    def _raw(self, Z):
        r, t = np.hypot(Z[:, 0], Z[:, 1]), np.arctan2(Z[:, 1], Z[:, 0])
        return lsm_values(self.spectrum_, r, t, self.sigma, self.filter_)


class FactorizationImager(_SamplingImager):
    """Regularized factorization indicator ``1 / sum phi^2(s_n)/s_n |<u_n, b_z>|^2``.

    Takes the same parameters as :class:`LinearSamplingImager`.  After
    :meth:`score_samples` or :meth:`transform`, ``guard_hits_`` holds the number
    of TTLS pole terms skipped in the last evaluation.
    """

    def __init__(self, regularization="tikhonov", alpha=1e-16, sigma=1.0,
                 threshold=0.5, r_max=R_MAX):
        super().__init__(regularization, alpha, sigma, threshold, r_max)

    def _raw(self, Z):
        r, t = np.hypot(Z[:, 0], Z[:, 1]), np.arctan2(Z[:, 1], Z[:, 0])
        values, flags, self.guard_hits_ = rfm_values(self.spectrum_, r, t, self.sigma, self.filter_)
        return values, flags
