import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iftrec.errors import InvalidInputError, UndefinedMetricError
from iftrec.learn import (
    Dataset,
    auc,
    classification_report,
    f1_score,
    grid_search,
    normalize_scores,
    predict,
    predict_scores,
    split_dataset,
    stratified_folds,
    train_gbt,
    train_linear_svm,
    train_model,
    train_naive_bayes,
    train_random_forest,
)


def toy_dataset(n=20, d=2, seed=0, rule=None):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, d))
    if rule is None:
        y = (X[:, 0] > 0).astype(np.int64)
    else:
        y = rule(X)
    return Dataset(X=X, y=y, ids=tuple(f"r{i}" for i in range(n)))


def one_d_dataset():
    X = np.array([[-1.0]] * 10 + [[1.0]] * 10)
    y = np.array([0] * 10 + [1] * 10)
    return Dataset(X=X, y=y, ids=tuple(f"p{i}" for i in range(20)))


class TestSplitDataset:
    def test_paper_scale_sizes(self):
        y = np.array([0] * 744 + [1] * 372)
        data = Dataset(X=np.zeros((1116, 1)), y=y, ids=tuple(f"i{i}" for i in range(1116)))
        train, test = split_dataset(data, 0.67, seed=1)
        assert (len(train), len(test)) == (747, 369)

    def test_balanced_ten_half_split(self):
        y = np.array([0, 1] * 5)
        data = Dataset(X=np.zeros((10, 1)), y=y, ids=tuple(f"i{i}" for i in range(10)))
        train, test = split_dataset(data, 0.5, seed=3)
        assert len(train) == len(test) == 5
        assert int(train.y.sum()) == 2 or int(train.y.sum()) == 3
        assert abs(int(train.y.sum()) - 2.5) <= 0.5

    def test_same_seed_identical_split(self):
        data = toy_dataset(40, seed=9)
        a_train, a_test = split_dataset(data, 0.67, seed=5)
        b_train, b_test = split_dataset(data, 0.67, seed=5)
        assert a_train.ids == b_train.ids
        assert a_test.ids == b_test.ids

    def test_disjoint_and_complete(self):
        data = toy_dataset(31, seed=2)
        train, test = split_dataset(data, 0.6, seed=0)
        assert set(train.ids).isdisjoint(test.ids)
        assert set(train.ids) | set(test.ids) == set(data.ids)

    def test_stratification_within_one_item(self):
        rng = np.random.default_rng(8)
        y = (rng.random(101) < 0.3).astype(np.int64)
        data = Dataset(X=np.zeros((101, 1)), y=y, ids=tuple(f"i{i}" for i in range(101)))
        train, _ = split_dataset(data, 0.67, seed=4)
        for c in (0, 1):
            expected = 0.67 * int(np.sum(y == c))
            assert abs(int(np.sum(train.y == c)) - expected) <= 1.0

    def test_tiny_class_rejected(self):
        data = Dataset(X=np.zeros((4, 1)), y=np.array([0, 0, 0, 1]), ids=("a", "b", "c", "d"))
        with pytest.raises(InvalidInputError):
            split_dataset(data, 0.5, seed=0)


class TestNaiveBayes:
    def test_separable_vocabulary(self):
        model = train_naive_bayes([["zoodles"], ["bolognese"]], [1, 0])
        assert predict(model, [["zoodles"]])[0] == 1
        assert predict(model, [["bolognese"]])[0] == 0

    def test_unseen_terms_fall_back_to_prior(self):
        model = train_naive_bayes([["a"], ["a"], ["b"]], [0, 0, 1])
        # "qq" is out of vocabulary; only the priors remain and class 0 dominates
        assert predict(model, [["qq"]])[0] == 0
        assert predict_scores(model, [["qq"]])[0] < 0.5

    def test_six_doc_posteriors_match_hand_computation(self):
        docs = [
            ["zoodles", "green"], ["zoodles", "fresh"], ["green"],
            ["pasta", "beef"], ["pasta"], ["sauce"],
        ]
        labels = [1, 1, 1, 0, 0, 0]
        model = train_naive_bayes(docs, labels)
        # Hand-smoothed counts, V=6: P(zoodles|1)=(2+1)/(5+6), P(green|1)=3/11,
        # P(zoodles|0)=(0+1)/(4+6), P(green|0)=1/10; priors 1/2 cancel.
        p1 = (3 / 11) * (3 / 11)
        p0 = (1 / 10) * (1 / 10)
        scores = predict_scores(model, [["zoodles", "green"]])
        assert scores[0] == pytest.approx(p1 / (p1 + p0))
        assert predict(model, [["zoodles", "green"]])[0] == 1

    def test_single_class_rejected(self):
        with pytest.raises(InvalidInputError):
            train_naive_bayes([["a"], ["b"]], [1, 1])


class TestLinearSvm:
    def test_separable_one_d(self):
        model = train_linear_svm(one_d_dataset(), reg_lambda=0.01, epochs=50, seed=0)
        assert predict(model, np.array([[2.0]]))[0] == 1
        assert predict(model, np.array([[-2.0]]))[0] == 0

    def test_huge_lambda_shrinks_weights_and_collapses_to_prior(self):
        # Regularization-path check: majority class is 0.
        X = np.array([[-1.0]] * 40 + [[1.0]] * 10)
        y = np.array([0] * 40 + [1] * 10)
        data = Dataset(X=X, y=y, ids=tuple(f"p{i}" for i in range(50)))
        model = train_linear_svm(data, reg_lambda=1e4, epochs=50, seed=0)
        assert np.abs(model.model.w).max() < 1e-2
        preds = predict(model, X)
        assert np.all(preds == 0)

    def test_same_seed_identical_weights(self):
        data = toy_dataset(30, seed=1)
        a = train_linear_svm(data, reg_lambda=0.01, epochs=20, seed=7)
        b = train_linear_svm(data, reg_lambda=0.01, epochs=20, seed=7)
        np.testing.assert_array_equal(a.model.w, b.model.w)
        assert a.model.b == b.model.b

    def test_degenerate_features_flagged(self):
        X = np.column_stack([np.linspace(-1, 1, 10), np.full(10, 3.0)])
        data = Dataset(X=X, y=(X[:, 0] > 0).astype(int), ids=tuple(f"p{i}" for i in range(10)))
        model = train_linear_svm(data, reg_lambda=0.01, epochs=10, seed=0)
        assert model.metadata["degenerate_features"] == [1]


class TestRandomForest:
    def test_single_stump_separates(self):
        model = train_random_forest(
            one_d_dataset(), n_trees=1, max_depth=1, seed=0, bootstrap=False
        )
        preds = predict(model, one_d_dataset().X)
        assert np.array_equal(preds, one_d_dataset().y)

    def test_pure_node_becomes_leaf(self):
        X = np.array([[0.0], [1.0], [2.0]])
        data = Dataset(X=X, y=np.array([1, 1, 1]), ids=("a", "b", "c"))
        model = train_random_forest(data, n_trees=1, max_depth=5, seed=0, bootstrap=False)
        assert model.model.trees[0].is_leaf
        assert predict(model, X).tolist() == [1, 1, 1]

    def test_single_tree_matches_exhaustive_split_oracle(self):
        rng = np.random.default_rng(17)
        X = rng.standard_normal((24, 2))
        y = ((X[:, 0] + 0.5 * X[:, 1]) > 0.1).astype(np.int64)
        data = Dataset(X=X, y=y, ids=tuple(f"r{i}" for i in range(24)))
        model = train_random_forest(
            data, n_trees=1, max_depth=4, seed=0, bootstrap=False, max_features=2
        )

        # Oracle: plain-python recursive tree enumerating every midpoint split.
        def gini(labels):
            if not labels:
                return 0.0
            p = sum(labels) / len(labels)
            return 1 - p * p - (1 - p) * (1 - p)

        def best_split(rows, labels):
            best = None
            for f in range(2):
                values = sorted({r[f] for r in rows})
                for lo, hi in zip(values, values[1:]):
                    thr = (lo + hi) / 2
                    left = [l for r, l in zip(rows, labels) if r[f] <= thr]
                    right = [l for r, l in zip(rows, labels) if r[f] > thr]
                    score = (len(left) * gini(left) + len(right) * gini(right)) / len(labels)
                    if best is None or score < best[0] - 1e-12:
                        best = (score, f, thr)
            return best

        def build(rows, labels, depth):
            majority = 1 if sum(labels) > len(labels) - sum(labels) else 0
            if depth >= 4 or gini(labels) == 0.0 or len(labels) < 2:
                return majority
            found = best_split(rows, labels)
            if found is None or found[0] >= gini(labels) - 1e-12:
                return majority
            _, f, thr = found
            left = [(r, l) for r, l in zip(rows, labels) if r[f] <= thr]
            right = [(r, l) for r, l in zip(rows, labels) if r[f] > thr]
            return (f, thr, build(*zip(*left), depth + 1), build(*zip(*right), depth + 1))

        def oracle_predict(node, row):
            while not isinstance(node, int):
                f, thr, left, right = node
                node = left if row[f] <= thr else right
            return node

        oracle_tree = build([tuple(r) for r in X], y.tolist(), 0)
        probe = rng.standard_normal((60, 2))
        expected = [oracle_predict(oracle_tree, tuple(r)) for r in probe]
        assert predict(model, probe).tolist() == expected

    def test_same_seed_identical_predictions(self):
        data = toy_dataset(40, seed=3)
        probe = np.random.default_rng(0).standard_normal((25, 2))
        a = train_random_forest(data, n_trees=12, max_depth=4, seed=11)
        b = train_random_forest(data, n_trees=12, max_depth=4, seed=11)
        np.testing.assert_array_equal(predict_scores(a, probe), predict_scores(b, probe))

    def test_empty_dataset_rejected(self):
        data = Dataset(X=np.zeros((0, 2)), y=np.zeros(0, dtype=int), ids=())
        with pytest.raises(InvalidInputError):
            train_random_forest(data, n_trees=3)


class TestGradientBoosting:
    def test_zero_rounds_balanced_scores_half(self):
        data = one_d_dataset()
        model = train_gbt(data, n_rounds=0, shrinkage=0.1)
        np.testing.assert_allclose(predict_scores(model, data.X), 0.5)

    def test_separable_reaches_perfect_train_accuracy(self):
        data = one_d_dataset()
        model = train_gbt(data, n_rounds=20, shrinkage=0.1, max_depth=2)
        assert np.array_equal(predict(model, data.X), data.y)

    def test_training_loss_decreases_every_round(self):
        data = toy_dataset(60, d=3, seed=5)
        model = train_gbt(data, n_rounds=25, shrinkage=0.1, max_depth=3)
        losses = model.metadata["staged_loss"]
        assert len(losses) == 26
        assert all(a > b for a, b in zip(losses, losses[1:]))

    def test_single_class_rejected(self):
        data = Dataset(X=np.zeros((4, 1)), y=np.ones(4, dtype=int), ids=("a", "b", "c", "d"))
        with pytest.raises(InvalidInputError):
            train_gbt(data, n_rounds=5)


class TestGridSearch:
    def test_singleton_grid_returns_that_point(self):
        data = toy_dataset(30, seed=2)
        result = grid_search("linear_svm", data, {"reg_lambda": [0.01]}, folds=3, seed=0)
        assert result.best_params == {"reg_lambda": 0.01}
        assert len(result.cv_table) == 1

    def test_picks_separating_lambda(self):
        data = toy_dataset(40, seed=6)
        result = grid_search(
            "linear_svm", data, {"reg_lambda": [0.01, 1e6]}, folds=4, seed=1
        )
        assert result.best_params == {"reg_lambda": 0.01}

    def test_same_seed_identical_cv_table(self):
        data = toy_dataset(30, seed=4)
        grid = {"n_trees": [3, 6], "max_depth": [2]}
        a = grid_search("random_forest", data, grid, folds=3, seed=5)
        b = grid_search("random_forest", data, grid, folds=3, seed=5)
        assert a.cv_table == b.cv_table
        assert a.best_params == b.best_params

    def test_fold_count_larger_than_class_rejected(self):
        data = Dataset(
            X=np.zeros((6, 1)), y=np.array([0, 0, 0, 0, 1, 1]), ids=tuple("abcdef")
        )
        with pytest.raises(InvalidInputError):
            grid_search("linear_svm", data, {"reg_lambda": [0.1]}, folds=3, seed=0)

    def test_stratified_folds_cover_everything(self):
        y = np.array([0] * 9 + [1] * 6)
        folds = stratified_folds(y, 3, seed=2)
        together = np.concatenate(folds)
        assert sorted(together.tolist()) == list(range(15))
        for fold in folds:
            assert np.sum(y[fold] == 0) == 3
            assert np.sum(y[fold] == 1) == 2


class TestMetrics:
    def test_f1_matches_reported_rows(self):
        rows = [
            (0.77, 0.85, 0.81),
            (0.80, 0.89, 0.84),
            (0.81, 0.70, 0.75),
            (0.85, 0.74, 0.79),
            (0.81, 0.62, 0.70),
            (0.47, 0.53, 0.50),
        ]
        for precision, recall, expected in rows:
            assert f1_score(precision, recall) == pytest.approx(expected, abs=0.005)

    def test_perfect_f1(self):
        assert f1_score(1.0, 1.0) == 1.0

    def test_zero_division_convention(self):
        assert f1_score(0.0, 0.0) == 0.0
        # nothing predicted positive: precision/1 is 0/0 -> 0, and flagged
        report = classification_report([0, 0, 1], [0, 0, 0], [0.1, 0.2, 0.3])
        assert report.per_class[1].precision == 0.0
        assert "precision/1" in report.zero_division

    def test_report_counts_and_flags(self):
        y_true = [0, 0, 1, 1, 1]
        y_pred = [0, 1, 1, 1, 0]
        scores = [0.1, 0.6, 0.9, 0.8, 0.3]
        report = classification_report(y_true, y_pred, scores)
        assert report.confusion == ((1, 1), (1, 2))
        assert report.per_class[1].precision == pytest.approx(2 / 3)
        assert report.per_class[1].recall == pytest.approx(2 / 3)
        assert report.per_class[0].support == 2
        assert report.per_class[1].support == 3
        d = report.to_dict(model="gs-svm", seed=4, hyperparameters={"reg_lambda": 0.01})
        assert set(d) == {"model", "classes", "auc", "confusion", "seed", "hyperparameters", "metadata"}
        assert set(d["classes"]["0"]) == {"precision", "recall", "f1", "support"}

    @given(
        st.floats(min_value=0, max_value=1, allow_nan=False),
        st.floats(min_value=0, max_value=1, allow_nan=False),
    )
    @settings(max_examples=80, deadline=None)
    def test_f1_symmetric_and_below_arithmetic_mean(self, p, r):
        assert f1_score(p, r) == pytest.approx(f1_score(r, p))
        assert f1_score(p, r) <= (p + r) / 2 + 1e-12


class TestAuc:
    def test_perfect_ranking(self):
        assert auc([1, 1, 0, 0], [0.9, 0.8, 0.2, 0.1]) == 1.0

    def test_all_ties_half(self):
        assert auc([1, 0, 1, 0], [0.5, 0.5, 0.5, 0.5]) == 0.5

    def test_single_class_undefined(self):
        with pytest.raises(UndefinedMetricError):
            auc([1, 1], [0.5, 0.6])

    def test_matches_brute_force_pair_counting(self):
        rng = random.Random(23)
        for _ in range(25):
            n = rng.randint(4, 20)
            y = [rng.randint(0, 1) for _ in range(n)]
            if len(set(y)) < 2:
                y[0], y[1] = 0, 1
            scores = [rng.choice([0.0, 0.25, 0.5, 0.75, 1.0]) for _ in range(n)]
            wins = ties = 0
            pos = [s for s, label in zip(scores, y) if label == 1]
            neg = [s for s, label in zip(scores, y) if label == 0]
            for sp in pos:
                for sn in neg:
                    if sp > sn:
                        wins += 1
                    elif sp == sn:
                        ties += 1
            expected = (wins + 0.5 * ties) / (len(pos) * len(neg))
            assert auc(y, scores) == expected

    def test_invariant_under_monotone_transform(self):
        rng = np.random.default_rng(2)
        y = rng.integers(0, 2, size=30)
        y[:2] = [0, 1]
        s = rng.random(30)
        base = auc(y, s)
        assert auc(y, 3.0 * s + 7.0) == pytest.approx(base)
        assert auc(y, np.exp(s)) == pytest.approx(base)

    def test_label_swap_complements(self):
        rng = np.random.default_rng(3)
        y = np.array([0] * 10 + [1] * 10)
        s = rng.permutation(np.linspace(0, 1, 20))  # distinct scores: tie-free
        assert auc(1 - y, s) == pytest.approx(1.0 - auc(y, s))


class TestPredictScores:
    def test_stump_vote_fraction_one_in_region(self):
        model = train_random_forest(
            one_d_dataset(), n_trees=5, max_depth=1, seed=0, bootstrap=False
        )
        assert predict_scores(model, np.array([[3.0]]))[0] == 1.0

    def test_zero_margin_normalizes_to_half(self):
        scores = normalize_scores(np.array([-2.0, 0.0, 4.0]))
        assert scores[1] == 0.5
        assert scores[0] == pytest.approx(0.25)
        assert scores[2] == 1.0

    def test_batch_equals_single_calls(self):
        data = toy_dataset(30, seed=8)
        model = train_gbt(data, n_rounds=10, shrinkage=0.1)
        probe = np.random.default_rng(1).standard_normal((10, 2))
        batch = predict_scores(model, probe)
        singles = [predict_scores(model, row.reshape(1, -1))[0] for row in probe]
        np.testing.assert_allclose(batch, singles)

    def test_dimension_mismatch_rejected(self):
        model = train_gbt(toy_dataset(20, d=3, seed=0), n_rounds=3)
        with pytest.raises(InvalidInputError):
            predict_scores(model, np.zeros((2, 5)))


class TestEveryFamilyLearnsThresholdRule:
    def test_threshold_rule_reaches_full_train_accuracy(self):
        rng = np.random.default_rng(31)
        X = rng.standard_normal((40, 3))
        # place feature 1 a clear margin away from the 0.3 threshold
        side = rng.integers(0, 2, size=40)
        X[:, 1] = 0.3 + (2 * side - 1) * (0.25 + np.abs(rng.standard_normal(40)) * 0.5)
        y = (X[:, 1] > 0.3).astype(np.int64)
        docs = tuple(
            ("f1hi",) if X[i, 1] > 0.3 else ("f1lo",) for i in range(40)
        )
        data = Dataset(X=X, y=y, ids=tuple(f"r{i}" for i in range(40)), docs=docs)

        nb = train_model("naive_bayes", data)
        assert np.array_equal(predict(nb, list(docs)), y)
        svm = train_model("linear_svm", data, reg_lambda=0.001, epochs=200, seed=0)
        assert np.array_equal(predict(svm, X), y)
        rf = train_model("random_forest", data, n_trees=15, max_depth=6, seed=0)
        assert np.array_equal(predict(rf, X), y)
        gbt = train_model("gbt", data, n_rounds=30, shrinkage=0.2, max_depth=2, seed=0)
        assert np.array_equal(predict(gbt, X), y)
