import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from orbithom import (
    AlphaHomogeneity,
    GeneratorConfig,
    HomogeneityModelSelector,
    KMeansEnsemble,
    LloydKMeans,
    MeanPartition,
    from_labels,
    generate,
)
from orbithom.sample import EnsembleSample


@pytest.fixture
def blobs():
    return generate(GeneratorConfig("G4", sigma=0.05, m_c=15, seed=2)).points


@pytest.mark.parametrize("est", [
    LloydKMeans(n_clusters=3),
    KMeansEnsemble(n_clusters=3, n_runs=7),
    MeanPartition(init="all"),
    AlphaHomogeneity(strict=True),
    HomogeneityModelSelector(ks=(2, 3)),
])
def test_params_round_trip(est):
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    assert twin is not est


def test_ensemble_labels(blobs):
    est = KMeansEnsemble(n_clusters=4, n_runs=6, random_state=1).fit(blobs)
    assert est.labels_.shape == (6, blobs.shape[0])
    assert isinstance(est.sample_, EnsembleSample)


def test_mean_partition_pipeline(blobs):
    sample = KMeansEnsemble(n_clusters=4, n_runs=8, n_init=3).fit(blobs).sample_
    mp = MeanPartition().fit(sample)
    aligned = mp.transform(sample)
    assert aligned.shape == (8, 4, blobs.shape[0])
    assert mp.score(sample) == pytest.approx(-mp.value_)
    assert np.allclose(aligned.mean(axis=0), mp.mean_.matrix) or not mp.converged_


def test_alpha_homogeneity_predict():
    base = from_labels([0] * 8 + [1] * 8, 2)
    near = from_labels([0] * 7 + [1] * 9, 2)
    far = from_labels([0, 1] * 8, 2)
    est = AlphaHomogeneity().fit([base, near, far])
    assert est.h_star_ == pytest.approx(2 / 3)
    assert list(est.predict([base, near, far])) == [1, 1, -1]
    assert list(est.fit_predict([base, near, far])) == [1, 1, -1]
    scores = est.score_samples([base, far])
    assert scores[0] > 0 > scores[1]


def test_not_fitted():
    with pytest.raises(NotFittedError):
        AlphaHomogeneity().predict([from_labels([0, 1], 2)])


def test_model_selector(blobs):
    sel = HomogeneityModelSelector(ks=(2, 3, 4), n_runs=10, n_init=3).fit(blobs)
    assert sel.n_clusters_ == sel.profile_.selected
    assert set(sel.samples_) == {2, 3, 4}
