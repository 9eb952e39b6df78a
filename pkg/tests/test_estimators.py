import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from robin_eit import FactorizationImager, LinearSamplingImager
from robin_eit.exceptions import DomainError
from robin_eit.imaging import ImagingGrid, lsm_indicator, normalize_map, rfm_indicator
from robin_eit.regularize import FilterSpec

POINTS = np.array([[0.0, 0.0], [0.2, 0.1], [0.8, 0.0], [-0.5, 0.6]])


@pytest.mark.parametrize("cls", [LinearSamplingImager, FactorizationImager])
class TestImagerApi:
    def test_params_round_trip(self, cls):
        est = cls(regularization="spectral_cutoff", alpha=1e-12, sigma=2.0)
        params = est.get_params()
        assert params["regularization"] == "spectral_cutoff" and params["alpha"] == 1e-12
        copy = clone(est)
        assert copy.get_params() == params
        copy.set_params(alpha=1e-3)
        assert est.alpha == 1e-12

    def test_fit_returns_self(self, cls, reference_operator):
        est = cls()
        assert est.fit(reference_operator) is est
        assert est.n_boundary_points_ == 32

    def test_not_fitted(self, cls):
        with pytest.raises(NotFittedError):
            cls().predict(POINTS)

    def test_predict_separates_inside_from_outside(self, cls, reference_operator):
        est = cls().fit(reference_operator.entries)
        labels = est.predict(POINTS)
        assert labels.dtype == bool
        assert labels[0] and not labels[2] and not labels[3]

    def test_transform_bounded(self, cls, reference_operator):
        W = cls().fit(reference_operator).transform(POINTS)
        assert W.max() == 1.0 and np.all(W > 0)

    def test_bad_inputs(self, cls, reference_operator):
        with pytest.raises(DomainError):
            cls().fit(np.ones((3, 4)))
        with pytest.raises(DomainError):
            cls(sigma=-1.0).fit(reference_operator)
        with pytest.raises(DomainError):
            cls(regularization="ttls", alpha=40).fit(reference_operator)
        est = cls().fit(reference_operator)
        with pytest.raises(DomainError):
            est.predict([[0.99, 0.0]])
        with pytest.raises(ValueError):
            est.predict([[0.0, 0.0, 0.0]])

    def test_flagged_points_are_nan(self, cls, reference_operator):
        s1 = np.linalg.norm(reference_operator.entries, 2)
        est = cls(regularization="spectral_cutoff", alpha=4 * s1**2).fit(reference_operator)
        assert np.all(np.isnan(est.score_samples(POINTS)))


def test_linear_sampling_matches_map(reference_operator):
    grid = ImagingGrid(21)
    spec = FilterSpec("tikhonov", 1e-9)
    expected = normalize_map(lsm_indicator(reference_operator, grid, 1.0, spec)).values
    got = LinearSamplingImager(alpha=1e-9).fit(reference_operator).transform(grid.points)
    assert np.allclose(got, expected, rtol=1e-12)


def test_factorization_matches_map_and_counts_guards(reference_operator):
    grid = ImagingGrid(21)
    spec = FilterSpec("ttls", 5)
    raw = rfm_indicator(reference_operator, grid, 1.0, spec)
    est = FactorizationImager(regularization="ttls", alpha=5).fit(reference_operator)
    assert np.allclose(est.transform(grid.points), normalize_map(raw).values, rtol=1e-12)
    assert est.guard_hits_ == raw.guard_hits


def test_docstring_example():
    import doctest

    import robin_eit.estimators

    result = doctest.testmod(robin_eit.estimators)
    assert result.attempted >= 1 and result.failed == 0
