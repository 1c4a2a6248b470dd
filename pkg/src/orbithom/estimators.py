"""scikit-learn style estimators over partition ensembles.

These wrap the functional API so ensembles, means and homogeneity fit into
``get_params``/``set_params``, ``clone`` and grid-search tooling.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, OutlierMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .asymmetry import alpha_squared, in_ball_squared
from .clustering import KMeansConfig, ensemble
from .frechet import frechet_value, mean_partition
from .homogeneity import alpha_homogeneity, select_clusters
from .partitions import apply_permutation, delta_squared, optimal_alignment
from .sample import check_sample


class KMeansEnsemble(BaseEstimator):
    """Repeated k-means on one dataset.

    Attributes
    ----------
    sample_ : EnsembleSample
    labels_ : ndarray of shape (n_runs, n_points)
    """

    def __init__(self, n_clusters=4, n_runs=100, max_iter=100, n_init=1, random_state=0):
        self.n_clusters = n_clusters
        self.n_runs = n_runs
        self.max_iter = max_iter
        self.n_init = n_init
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        config = KMeansConfig(self.n_clusters, self.max_iter, self.random_state, n_init=self.n_init)
        self.sample_ = ensemble(X, config, self.n_runs)
        self.labels_ = self.sample_.labels()
        return self


class MeanPartition(BaseEstimator):
    """Mean partition by alternating alignment and averaging.

    Parameters
    ----------
    init : {"medoid", "all"} or Partition, default="medoid"
        ``"all"`` restarts from every sample member.
    tol : float, default=1e-10
    max_iter : int, default=100

    Attributes
    ----------
    mean_ : Partition
    value_ : float
        Fréchet function at ``mean_``.
    n_iter_ : int
    converged_ : bool
    alignments_ : tuple of PermutationMap
    """

    def __init__(self, init="medoid", tol=1e-10, max_iter=100):
        self.init = init
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, sample, y=None):
        result = mean_partition(check_sample(sample), self.init, self.tol, self.max_iter)
        self.result_ = result
        self.mean_ = result.mean
        self.value_ = result.value
        self.n_iter_ = result.iterations
        self.converged_ = result.converged
        self.alignments_ = result.alignments
        return self

    def transform(self, sample):
        """Representations of every member in optimal position with the mean."""
        check_is_fitted(self)
        sample = check_sample(sample)
        return np.stack([apply_permutation(X, optimal_alignment(self.mean_, X)[0]) for X in sample])

    def score(self, sample, y=None):
        """Negative Fréchet value of ``mean_`` on ``sample``."""
        check_is_fitted(self)
        return -frechet_value(check_sample(sample), self.mean_)


class AlphaHomogeneity(OutlierMixin, BaseEstimator):
    """Alpha-homogeneity of a sample and outlier partitions.

    After fitting, the best center's asymmetry ball defines the inliers:
    ``predict`` returns 1 for partitions inside it and -1 otherwise.

    Attributes
    ----------
    report_ : HomogeneityReport
    h_star_ : float
    center_ : Partition
    outliers_ : tuple of int
    alphas_ : ndarray
    """

    def __init__(self, strict=False):
        self.strict = strict

    def fit(self, sample, y=None):
        sample = check_sample(sample)
        report = alpha_homogeneity(sample)
        self.report_ = report
        self.h_star_ = report.h_star
        self.center_ = sample[report.best_center]
        self.outliers_ = report.outliers
        self.alphas_ = report.alphas
        self._center_a2 = alpha_squared(self.center_)
        return self

    def predict(self, sample):
        check_is_fitted(self)
        sample = check_sample(sample)
        inside = [in_ball_squared(delta_squared(self.center_, X), self._center_a2, self.strict) for X in sample]
        return np.where(inside, 1, -1)

    def score_samples(self, sample):
        """``alpha(center)/4 - delta(center, X)``; non-negative inside the ball."""
        check_is_fitted(self)
        sample = check_sample(sample)
        radius = np.sqrt(self._center_a2) / 4
        return np.array([radius - np.sqrt(delta_squared(self.center_, X)) for X in sample])


class HomogeneityModelSelector(BaseEstimator):
    """Choose the number of clusters maximizing alpha-homogeneity of k-means ensembles.

    Attributes
    ----------
    profile_ : StabilityProfile
    n_clusters_ : int
    samples_ : dict mapping k to EnsembleSample
    """

    def __init__(self, ks=(2, 3, 4, 5, 6, 7, 8, 9, 10), n_runs=50, max_iter=100, n_init=1, random_state=0):
        self.ks = ks
        self.n_runs = n_runs
        self.max_iter = max_iter
        self.n_init = n_init
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        self.samples_ = {
            k: ensemble(X, KMeansConfig(k, self.max_iter, self.random_state, n_init=self.n_init), self.n_runs)
            for k in self.ks
        }
        self.profile_ = select_clusters(self.samples_)
        self.n_clusters_ = self.profile_.selected
        return self

