import numpy as np
import pytest

from orbithom.clustering import (
    G4_MEANS,
    G9_MEANS,
    DataError,
    GeneratorConfig,
    KMeansConfig,
    LloydKMeans,
    ensemble,
    generate,
    kmeans,
    lloyd,
    load_csv,
    make_rng,
)
from orbithom.frechet import frechet_value
from orbithom.partitions import delta


class TestGenerate:
    @pytest.mark.parametrize("kind,means", [("G4", G4_MEANS), ("G9", G9_MEANS)])
    def test_zero_noise_sits_on_means(self, kind, means):
        data = generate(GeneratorConfig(kind, sigma=0.0, m_c=5))
        assert data.n_points == 5 * len(means)
        assert np.array_equal(data.points, np.repeat(means, 5, axis=0))

    def test_uniform_range(self):
        data = generate(GeneratorConfig("UD", sigma=2.0, m_c=400, seed=3))
        assert data.points.min() >= 0.0
        assert data.points.max() <= 2.0
        assert data.points.max() > 1.5

    @pytest.mark.parametrize("kind,count", [("UD", 1), ("G4", 4), ("G9", 9), ("U2", 2), ("U4", 4)])
    def test_components_are_balanced(self, kind, count):
        data = generate(GeneratorConfig(kind, m_c=7))
        assert np.array_equal(np.bincount(data.components), [7] * count)

    def test_u_shapes_follow_arcs(self):
        data = generate(GeneratorConfig("U2", sigma=0.0, m_c=50))
        x, y = data.points.T
        first = data.components == 0
        assert np.allclose(y[first], np.sin(x[first]))
        assert np.allclose(y[~first], 1 - np.sin(x[~first] - np.pi / 2))

    def test_seeded(self):
        a = generate(GeneratorConfig("G4", seed=5))
        assert np.array_equal(a.points, generate(GeneratorConfig("G4", seed=5)).points)
        assert not np.array_equal(a.points, generate(GeneratorConfig("G4", seed=6)).points)

    def test_rejects_bad_config(self):
        with pytest.raises(DataError):
            GeneratorConfig("G5")
        with pytest.raises(DataError):
            GeneratorConfig(sigma=-1.0)


class TestKMeans:
    def test_single_cluster_stops_immediately(self):
        X = generate(GeneratorConfig("G4", m_c=10)).points
        labels, centers, n_iter, _ = lloyd(X, 1, 100, make_rng(0))
        assert n_iter == 1
        assert np.all(labels == 0)
        assert np.allclose(centers[0], X.mean(axis=0))

    def test_recovers_separated_blobs(self):
        data = generate(GeneratorConfig("G4", sigma=0.0, m_c=10))
        for run in range(10):
            P = kmeans(data, KMeansConfig(4, n_init=5), run)
            truth = np.zeros_like(P.matrix)
            truth[data.components, np.arange(data.n_points)] = 1
            assert delta(P, truth) == 0.0

    def test_inertia_is_monotone(self, rng):
        X = rng.normal(size=(200, 2))
        for seed in range(10):
            _, _, _, inertia = lloyd(X, 5, 100, make_rng(seed))
            assert all(b <= a + 1e-9 for a, b in zip(inertia, inertia[1:]))

    def test_forgy_uses_distinct_points(self):
        X = np.array([[0.0, 0.0]] * 20 + [[1.0, 1.0]])
        for seed in range(20):
            _, centers, _, _ = lloyd(X, 2, 1, make_rng(seed))
            assert len({tuple(c) for c in centers}) == 2

    def test_empty_cluster_keeps_centroid(self):
        # the second seed can lose all its points but must not move
        X = np.array([[0.0], [0.1], [0.2], [10.0]])
        labels, centers, _, _ = lloyd(X, 3, 50, make_rng(1))
        assert centers.shape == (3, 1)
        assert np.all(np.isfinite(centers))

    def test_deterministic_ensembles(self):
        data = generate(GeneratorConfig("G4", sigma=0.3, m_c=20))
        a = ensemble(data, KMeansConfig(4, seed=11), 10)
        b = ensemble(data, KMeansConfig(4, seed=11), 10)
        assert np.array_equal(a.stack(), b.stack())

    def test_runs_use_separate_streams(self):
        data = generate(GeneratorConfig("G9", sigma=0.3, m_c=10))
        S = ensemble(data, KMeansConfig(9), 20)
        assert len({X.labels.tobytes() for X in S}) > 1

    def test_pigeonhole(self):
        # the two smallest of k clusters hold at most 2m/k points
        data = generate(GeneratorConfig("UD", m_c=97))
        for k in range(2, 9):
            for X in ensemble(data, KMeansConfig(k), 5):
                sizes = np.sort(X.cluster_sizes())
                assert sizes[0] + sizes[1] <= 2 * X.n_points / k

    def test_rejects_too_many_clusters(self):
        with pytest.raises(ValueError):
            kmeans(np.zeros((3, 2)), KMeansConfig(4))

    def test_estimator_matches_run_zero(self):
        data = generate(GeneratorConfig("G4", sigma=0.2, m_c=15))
        est = LloydKMeans(n_clusters=4, random_state=9).fit(data.points)
        assert est.partition() == kmeans(data, KMeansConfig(4, seed=9), 0)
        assert np.array_equal(est.predict(data.points), est.labels_)
        assert est.inertia_ == est.inertia_history_[-1]

    def test_best_of_restarts_not_worse(self):
        data = generate(GeneratorConfig("G9", sigma=0.1, m_c=15))
        X = data.points

        def inertia(P):
            labels = P.labels
            return sum(((X[labels == c] - X[labels == c].mean(axis=0)) ** 2).sum()
                       for c in np.unique(labels))

        single = kmeans(data, KMeansConfig(9, n_init=1), 0)
        best = kmeans(data, KMeansConfig(9, n_init=8), 0)
        assert inertia(best) <= inertia(single) + 1e-9


class TestLoadCsv:
    def test_iris(self, iris_path):
        data = load_csv(iris_path, header=True, drop_col=-1)
        assert data.points.shape == (150, 4)

    def test_standardize(self, iris_path):
        X = load_csv(iris_path, header=True, drop_col=-1, standardize=True).points
        assert np.allclose(X.mean(axis=0), 0, atol=1e-12)
        assert np.allclose(X.std(axis=0), 1)

    def test_non_numeric_cell(self, iris_path):
        with pytest.raises(DataError, match=r":2: non-numeric cell 'setosa'"):
            load_csv(iris_path, header=True)

    def test_ragged(self, tmp_path):
        p = tmp_path / "r.csv"
        p.write_text("1,2\n3,4\n5\n")
        with pytest.raises(DataError, match=r":3: expected 2 columns"):
            load_csv(p)

    def test_missing_and_empty(self, tmp_path):
        with pytest.raises(DataError, match="no such file"):
            load_csv(tmp_path / "nope.csv")
        (tmp_path / "e.csv").write_text("\n")
        with pytest.raises(DataError, match="no data rows"):
            load_csv(tmp_path / "e.csv")
