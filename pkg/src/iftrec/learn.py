"""Interest classification: splits, four classifier families, grid search, metrics.

All trainers are deterministic given (data, hyperparameters, seed) and are
implemented directly on numpy so per-tree seeding and tie-breaking behave
exactly as documented.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import InvalidInputError, UndefinedMetricError

MODEL_KINDS = ("naive_bayes", "linear_svm", "random_forest", "gbt")


@dataclass
class Dataset:
    """Feature matrix, binary labels, image ids, and optional term-list docs."""

    X: np.ndarray
    y: np.ndarray
    ids: tuple[str, ...]
    docs: tuple[tuple[str, ...], ...] | None = None

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.X.ndim != 2:
            raise InvalidInputError("feature matrix must be 2-D")
        if self.X.shape[0] != self.y.size or self.y.size != len(self.ids):
            raise InvalidInputError("feature matrix, labels, and ids disagree on row count")
        if self.docs is not None and len(self.docs) != self.y.size:
            raise InvalidInputError("docs and labels disagree on row count")

    def __len__(self) -> int:
        return self.y.size

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx, dtype=np.int64)
        return Dataset(
            X=self.X[idx],
            y=self.y[idx],
            ids=tuple(self.ids[i] for i in idx),
            docs=None if self.docs is None else tuple(self.docs[i] for i in idx),
        )


@dataclass
class TrainedModel:
    kind: str
    model: object
    hyperparameters: dict
    seed: int | None = None
    metadata: dict = field(default_factory=dict)


def split_dataset(data: Dataset, train_frac: float, seed: int) -> tuple[Dataset, Dataset]:
    """Stratified train/test split with train size floor(train_frac * N).

    Per-class train counts start at floor(train_frac * n_c); the remainder up
    to the exact total is dealt to classes by largest fractional part, keeping
    every class proportion within one item.
    """
    n = len(data)
    if not (0.0 < train_frac < 1.0):
        raise InvalidInputError(f"train_frac must be in (0,1), got {train_frac}")
    if n < 2:
        raise InvalidInputError("need at least 2 rows to split")
    classes, counts = np.unique(data.y, return_counts=True)
    if np.any(counts < 2):
        small = classes[counts < 2].tolist()
        raise InvalidInputError(f"stratification impossible: classes {small} have < 2 members")

    total_train = int(math.floor(train_frac * n))
    quota = {int(c): math.floor(train_frac * cnt) for c, cnt in zip(classes, counts)}
    remainders = sorted(
        ((train_frac * cnt) % 1.0, int(c)) for c, cnt in zip(classes, counts)
    )
    leftover = total_train - sum(int(q) for q in quota.values())
    for _, c in sorted(remainders, key=lambda rc: (-rc[0], rc[1])):
        if leftover <= 0:
            break
        quota[c] = int(quota[c]) + 1
        leftover -= 1

    rng = np.random.default_rng(seed)
    train_idx: list[int] = []
    for c in sorted(quota):
        members = np.flatnonzero(data.y == c)
        picked = rng.permutation(members.size)[: int(quota[c])]
        train_idx.extend(members[picked].tolist())
    train_mask = np.zeros(n, dtype=bool)
    train_mask[train_idx] = True
    return data.subset(np.flatnonzero(train_mask)), data.subset(np.flatnonzero(~train_mask))


# --- Naive Bayes ------------------------------------------------------------


class _NaiveBayes:
    """Multinomial NB over term lists with Laplace smoothing."""

    def __init__(self, alpha: float):
        self.alpha = alpha
        self.log_prior: dict[int, float] = {}
        self.log_prob: dict[int, dict[str, float]] = {}
        self.default_log_prob: dict[int, float] = {}
        self.vocabulary: frozenset[str] = frozenset()

    def fit(self, docs, labels):
        labels = np.asarray(labels, dtype=np.int64)
        vocab: set[str] = set()
        for doc in docs:
            vocab.update(doc)
        self.vocabulary = frozenset(vocab)
        v = len(vocab)
        for c in (0, 1):
            members = [docs[i] for i in np.flatnonzero(labels == c)]
            self.log_prior[c] = math.log(len(members) / labels.size)
            counts: Counter[str] = Counter()
            for doc in members:
                counts.update(doc)
            total = sum(counts.values())
            denom = total + self.alpha * v
            self.log_prob[c] = {t: math.log((counts[t] + self.alpha) / denom) for t in counts}
            self.default_log_prob[c] = math.log(self.alpha / denom)
        return self

    def _log_posterior(self, doc) -> tuple[float, float]:
        scores = []
        for c in (0, 1):
            lp = self.log_prior[c]
            table = self.log_prob[c]
            for term in doc:
                if term in self.vocabulary:
                    lp += table.get(term, self.default_log_prob[c])
            scores.append(lp)
        return scores[0], scores[1]

    def predict(self, docs) -> np.ndarray:
        out = np.empty(len(docs), dtype=np.int64)
        for i, doc in enumerate(docs):
            lp0, lp1 = self._log_posterior(doc)
            out[i] = 1 if lp1 > lp0 else 0
        return out

    def predict_scores(self, docs) -> np.ndarray:
        out = np.empty(len(docs), dtype=np.float64)
        for i, doc in enumerate(docs):
            lp0, lp1 = self._log_posterior(doc)
            m = max(lp0, lp1)
            p1 = math.exp(lp1 - m) / (math.exp(lp0 - m) + math.exp(lp1 - m))
            out[i] = p1
        return out


def train_naive_bayes(docs, labels, alpha: float = 1.0) -> TrainedModel:
    """Multinomial Naive Bayes over keyword lists; ties predict class 0."""
    labels = np.asarray(labels, dtype=np.int64)
    if len(docs) != labels.size:
        raise InvalidInputError("docs and labels disagree on length")
    if len(np.unique(labels)) < 2:
        raise InvalidInputError("training data must contain both classes")
    model = _NaiveBayes(alpha=alpha).fit(list(docs), labels)
    return TrainedModel(kind="naive_bayes", model=model, hyperparameters={"alpha": alpha})


# --- Linear SVM -------------------------------------------------------------


class _LinearSvm:
    def __init__(self, w: np.ndarray, b: float):
        self.w = w
        self.b = b

    def margins(self, X) -> np.ndarray:
        return X @ self.w + self.b

    def predict(self, X) -> np.ndarray:
        return (self.margins(X) > 0).astype(np.int64)


def train_linear_svm(
    data: Dataset, reg_lambda: float = 0.01, epochs: int = 50, seed: int = 0
) -> TrainedModel:
    """Hinge loss + L2, minimized by seeded per-example subgradient descent.

    Step size 1/(reg_lambda * t) with a global step counter; the bias is
    updated but not regularized. Constant features are flagged, not rejected.
    """
    if reg_lambda <= 0:
        raise InvalidInputError(f"reg_lambda must be > 0, got {reg_lambda}")
    if len(np.unique(data.y)) < 2:
        raise InvalidInputError("training data must contain both classes")
    X, y = data.X, data.y
    signs = 2.0 * y - 1.0
    degenerate = np.flatnonzero(np.ptp(X, axis=0) == 0).tolist()

    rng = np.random.default_rng(seed)
    w = np.zeros(X.shape[1])
    b = 0.0
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(len(y)):
            t += 1
            eta = 1.0 / (reg_lambda * t)
            if signs[i] * (X[i] @ w + b) < 1.0:
                w *= 1.0 - eta * reg_lambda
                w += eta * signs[i] * X[i]
                b += eta * signs[i]
            else:
                w *= 1.0 - eta * reg_lambda
    model = _LinearSvm(w=w, b=b)
    return TrainedModel(
        kind="linear_svm",
        model=model,
        hyperparameters={"reg_lambda": reg_lambda, "epochs": epochs},
        seed=seed,
        metadata={"degenerate_features": degenerate} if degenerate else {},
    )


# --- Decision trees ---------------------------------------------------------


@dataclass
class _Node:
    feature: int = -1
    threshold: float = 0.0
    left: "_Node | None" = None
    right: "_Node | None" = None
    value: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def predict_one(self, x) -> float:
        node = self
        while not node.is_leaf:
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node.value


def _predict_tree(root: _Node, X: np.ndarray) -> np.ndarray:
    return np.array([root.predict_one(x) for x in X])


def _gini(y: np.ndarray) -> float:
    if y.size == 0:
        return 0.0
    p1 = float(np.mean(y))
    return 1.0 - p1 * p1 - (1.0 - p1) * (1.0 - p1)


def _best_split(x: np.ndarray, target: np.ndarray, criterion: str):
    """Best threshold for one feature; returns (score, threshold) or None.

    Scores are the weighted child impurity (gini) or total child SSE; lower is
    better. Ties go to the smallest threshold.
    """
    order = np.argsort(x, kind="mergesort")
    xs, ts = x[order], target[order]
    n = xs.size
    cuts = np.flatnonzero(xs[:-1] < xs[1:])
    if cuts.size == 0:
        return None
    nl = (cuts + 1).astype(np.float64)
    nr = n - nl
    csum = np.cumsum(ts)
    lsum = csum[cuts]
    rsum = csum[-1] - lsum
    if criterion == "gini":
        pl = lsum / nl
        pr = rsum / nr
        score = (nl * (1 - pl**2 - (1 - pl) ** 2) + nr * (1 - pr**2 - (1 - pr) ** 2)) / n
    else:
        csq = np.cumsum(ts * ts)
        lsq = csq[cuts]
        rsq = csq[-1] - lsq
        score = (lsq - lsum**2 / nl) + (rsq - rsum**2 / nr)
    best = int(np.argmin(score))
    threshold = (xs[cuts[best]] + xs[cuts[best] + 1]) / 2.0
    return float(score[best]), float(threshold)


def _majority(y: np.ndarray) -> float:
    ones = int(np.sum(y))
    return 1.0 if ones > y.size - ones else 0.0


def _build_clf_tree(X, y, depth, max_depth, rng, max_features):
    node = _Node(value=_majority(y))
    if y.size < 2 or (max_depth is not None and depth >= max_depth) or _gini(y) == 0.0:
        return node
    d = X.shape[1]
    if max_features < d:
        candidates = np.sort(rng.choice(d, size=max_features, replace=False))
    else:
        candidates = np.arange(d)
    best = None
    for f in candidates:
        found = _best_split(X[:, f], y.astype(np.float64), "gini")
        if found is None:
            continue
        score, threshold = found
        if best is None or score < best[0] - 1e-12:
            best = (score, int(f), threshold)
    if best is None or best[0] >= _gini(y) - 1e-12:
        return node
    _, f, threshold = best
    mask = X[:, f] <= threshold
    node.feature = f
    node.threshold = threshold
    node.left = _build_clf_tree(X[mask], y[mask], depth + 1, max_depth, rng, max_features)
    node.right = _build_clf_tree(X[~mask], y[~mask], depth + 1, max_depth, rng, max_features)
    return node


class _RandomForest:
    def __init__(self, trees: list[_Node], n_features: int):
        self.trees = trees
        self.n_features = n_features

    def vote_fraction(self, X) -> np.ndarray:
        votes = np.stack([_predict_tree(t, X) for t in self.trees])
        return votes.mean(axis=0)

    def predict(self, X) -> np.ndarray:
        return (self.vote_fraction(X) > 0.5).astype(np.int64)


def train_random_forest(
    data: Dataset,
    n_trees: int = 50,
    max_depth: int | None = 8,
    seed: int = 0,
    bootstrap: bool = True,
    max_features: int | None = None,
) -> TrainedModel:
    """Bagged Gini trees; tree i draws from a generator seeded with seed + i.

    Each split considers ceil(sqrt(D)) features unless ``max_features``
    overrides it; prediction is the majority vote with ties going to class 0.
    """
    if n_trees < 1:
        raise InvalidInputError(f"n_trees must be >= 1, got {n_trees}")
    if len(data) == 0:
        raise InvalidInputError("empty dataset")
    X, y = data.X, data.y
    d = X.shape[1]
    m = max_features if max_features is not None else math.ceil(math.sqrt(d))
    trees = []
    for i in range(n_trees):
        rng = np.random.default_rng(seed + i)
        if bootstrap:
            idx = rng.integers(0, len(y), size=len(y))
            xb, yb = X[idx], y[idx]
        else:
            xb, yb = X, y
        trees.append(_build_clf_tree(xb, yb, 0, max_depth, rng, m))
    model = _RandomForest(trees=trees, n_features=d)
    return TrainedModel(
        kind="random_forest",
        model=model,
        hyperparameters={
            "n_trees": n_trees,
            "max_depth": max_depth,
            "bootstrap": bootstrap,
            "max_features": m,
        },
        seed=seed,
    )


def _build_reg_tree(X, residual, hessian, depth, max_depth):
    node = _Node()
    if residual.size < 2 or depth >= max_depth or np.all(residual == residual[0]):
        node.value = float(residual.sum() / (hessian.sum() + 1e-12))
        return node
    best = None
    for f in range(X.shape[1]):
        found = _best_split(X[:, f], residual, "sse")
        if found is None:
            continue
        score, threshold = found
        if best is None or score < best[0] - 1e-12:
            best = (score, f, threshold)
    if best is None:
        node.value = float(residual.sum() / (hessian.sum() + 1e-12))
        return node
    _, f, threshold = best
    mask = X[:, f] <= threshold
    node.feature = f
    node.threshold = threshold
    node.left = _build_reg_tree(X[mask], residual[mask], hessian[mask], depth + 1, max_depth)
    node.right = _build_reg_tree(X[~mask], residual[~mask], hessian[~mask], depth + 1, max_depth)
    return node


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


def _log_loss(y: np.ndarray, p: np.ndarray) -> float:
    p = np.clip(p, 1e-12, 1 - 1e-12)
    return float(-np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)))


class _GradientBoostedTrees:
    def __init__(self, f0: float, trees: list[_Node], shrinkage: float, n_features: int):
        self.f0 = f0
        self.trees = trees
        self.shrinkage = shrinkage
        self.n_features = n_features

    def raw(self, X) -> np.ndarray:
        f = np.full(X.shape[0], self.f0)
        for tree in self.trees:
            f += self.shrinkage * _predict_tree(tree, X)
        return f

    def predict_scores(self, X) -> np.ndarray:
        return _sigmoid(self.raw(X))

    def predict(self, X) -> np.ndarray:
        return (self.predict_scores(X) > 0.5).astype(np.int64)


def train_gbt(
    data: Dataset,
    n_rounds: int = 100,
    shrinkage: float = 0.1,
    max_depth: int = 3,
    seed: int = 0,
) -> TrainedModel:
    """Logistic-loss boosting: regression trees on residuals with Newton leaves.

    The initial score is the base-rate log-odds, so zero rounds predict 0.5 on
    balanced labels. Training records the per-round log loss for diagnostics.
    """
    if n_rounds < 0:
        raise InvalidInputError(f"n_rounds must be >= 0, got {n_rounds}")
    if not (0.0 < shrinkage <= 1.0):
        raise InvalidInputError(f"shrinkage must be in (0,1], got {shrinkage}")
    if len(np.unique(data.y)) < 2:
        raise InvalidInputError("training data must contain both classes")
    X = data.X
    y = data.y.astype(np.float64)
    p = float(y.mean())
    f0 = math.log(p / (1 - p))
    f = np.full(len(y), f0)
    trees: list[_Node] = []
    staged_loss = [_log_loss(y, _sigmoid(f))]
    for _ in range(n_rounds):
        prob = _sigmoid(f)
        residual = y - prob
        hessian = prob * (1 - prob)
        tree = _build_reg_tree(X, residual, hessian, 0, max_depth)
        f = f + shrinkage * _predict_tree(tree, X)
        trees.append(tree)
        staged_loss.append(_log_loss(y, _sigmoid(f)))
    model = _GradientBoostedTrees(f0=f0, trees=trees, shrinkage=shrinkage, n_features=X.shape[1])
    return TrainedModel(
        kind="gbt",
        model=model,
        hyperparameters={"n_rounds": n_rounds, "shrinkage": shrinkage, "max_depth": max_depth},
        seed=seed,
        metadata={"staged_loss": staged_loss},
    )


# --- Prediction dispatch ----------------------------------------------------


def _check_features(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    expected = model.model.n_features if hasattr(model.model, "n_features") else len(model.model.w)
    if X.shape[1] != expected:
        raise InvalidInputError(
            f"feature dimension {X.shape[1]} does not match training dimension {expected}"
        )
    return X


def predict(model: TrainedModel, features) -> np.ndarray:
    """Class labels; for naive_bayes ``features`` is a list of term lists."""
    if model.kind == "naive_bayes":
        return model.model.predict(features)
    return model.model.predict(_check_features(model, features))


def predict_scores(model: TrainedModel, features) -> np.ndarray:
    """Higher-is-more-interested scores: posteriors, vote fractions, sigmoids, or margins."""
    if model.kind == "naive_bayes":
        return model.model.predict_scores(features)
    X = _check_features(model, features)
    if model.kind == "linear_svm":
        return model.model.margins(X)
    if model.kind == "random_forest":
        return model.model.vote_fraction(X)
    return model.model.predict_scores(X)


def normalize_scores(scores: np.ndarray) -> np.ndarray:
    """Map margins into [0,1] symmetrically so a zero margin lands on 0.5.

    AUC is invariant under this (strictly monotone) rescaling.
    """
    scores = np.asarray(scores, dtype=np.float64)
    peak = float(np.max(np.abs(scores))) if scores.size else 0.0
    if peak == 0.0:
        return np.full(scores.shape, 0.5)
    return 0.5 + 0.5 * scores / peak


# --- Metrics ----------------------------------------------------------------


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class ClassificationReport:
    per_class: dict[int, ClassMetrics]
    auc: float
    confusion: tuple[tuple[int, int], tuple[int, int]]
    zero_division: list[str] = field(default_factory=list)

    def to_dict(self, model: str, seed, hyperparameters: dict) -> dict:
        return {
            "model": model,
            "classes": {
                str(c): {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                }
                for c, m in sorted(self.per_class.items())
            },
            "auc": self.auc,
            "confusion": [list(row) for row in self.confusion],
            "seed": seed,
            "hyperparameters": hyperparameters,
            "metadata": {"zero_division": self.zero_division},
        }


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def auc(y_true, scores) -> float:
    """Mann-Whitney AUC from midranks; ties between classes count half."""
    y = np.asarray(y_true, dtype=np.int64)
    s = np.asarray(scores, dtype=np.float64)
    if y.size != s.size or y.size == 0:
        raise InvalidInputError("labels and scores must have equal non-zero length")
    pos = int(np.sum(y == 1))
    neg = int(np.sum(y == 0))
    if pos == 0 or neg == 0:
        raise UndefinedMetricError("AUC is undefined when only one class is present")
    order = np.argsort(s, kind="mergesort")
    ranks = np.empty(y.size, dtype=np.float64)
    sorted_s = s[order]
    i = 0
    while i < y.size:
        j = i
        while j + 1 < y.size and sorted_s[j + 1] == sorted_s[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + 1 + j + 1) / 2.0
        i = j + 1
    rank_sum = float(ranks[y == 1].sum())
    u = rank_sum - pos * (pos + 1) / 2.0
    return u / (pos * neg)


def classification_report(y_true, y_pred, scores) -> ClassificationReport:
    """Per-class precision/recall/F1/support plus AUC and confusion counts."""
    y = np.asarray(y_true, dtype=np.int64)
    p = np.asarray(y_pred, dtype=np.int64)
    if y.size != p.size or y.size == 0:
        raise InvalidInputError("labels and predictions must have equal non-zero length")
    tp = int(np.sum((y == 1) & (p == 1)))
    tn = int(np.sum((y == 0) & (p == 0)))
    fp = int(np.sum((y == 0) & (p == 1)))
    fn = int(np.sum((y == 1) & (p == 0)))
    flagged: list[str] = []

    def _ratio(num: int, den: int, name: str) -> float:
        if den == 0:
            flagged.append(name)
            return 0.0
        return num / den

    per_class = {}
    for c, (tp_c, fp_c, fn_c) in {0: (tn, fn, fp), 1: (tp, fp, fn)}.items():
        precision = _ratio(tp_c, tp_c + fp_c, f"precision/{c}")
        recall = _ratio(tp_c, tp_c + fn_c, f"recall/{c}")
        per_class[c] = ClassMetrics(
            precision=precision,
            recall=recall,
            f1=f1_score(precision, recall),
            support=int(np.sum(y == c)),
        )
    return ClassificationReport(
        per_class=per_class,
        auc=auc(y, scores),
        confusion=((tn, fp), (fn, tp)),
        zero_division=flagged,
    )


def _macro_f1(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    scores = []
    for c in (0, 1):
        tp = int(np.sum((y_true == c) & (y_pred == c)))
        fp = int(np.sum((y_true != c) & (y_pred == c)))
        fn = int(np.sum((y_true == c) & (y_pred != c)))
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        scores.append(f1_score(precision, recall))
    return float(np.mean(scores))


# --- Grid search ------------------------------------------------------------


def train_model(kind: str, data: Dataset, seed: int = 0, **params) -> TrainedModel:
    """Uniform entry point over the four trainer families."""
    if kind == "naive_bayes":
        if data.docs is None:
            raise InvalidInputError("naive_bayes requires term-list docs on the dataset")
        return train_naive_bayes(list(data.docs), data.y, **params)
    if kind == "linear_svm":
        return train_linear_svm(data, seed=seed, **params)
    if kind == "random_forest":
        return train_random_forest(data, seed=seed, **params)
    if kind == "gbt":
        return train_gbt(data, seed=seed, **params)
    raise InvalidInputError(f"unknown model kind {kind!r}")


def _model_inputs(model_kind: str, data: Dataset):
    return list(data.docs) if model_kind == "naive_bayes" else data.X


def stratified_folds(y: np.ndarray, folds: int, seed: int) -> list[np.ndarray]:
    """Deal each class round-robin into folds after a seeded shuffle."""
    if folds < 2:
        raise InvalidInputError(f"folds must be >= 2, got {folds}")
    classes, counts = np.unique(y, return_counts=True)
    if int(counts.min()) < folds:
        raise InvalidInputError(
            f"cannot build {folds} stratified folds: smallest class has {int(counts.min())} members"
        )
    rng = np.random.default_rng(seed)
    assignments: list[list[int]] = [[] for _ in range(folds)]
    for c in sorted(int(x) for x in classes):
        members = np.flatnonzero(y == c)
        members = members[rng.permutation(members.size)]
        for pos, idx in enumerate(members):
            assignments[pos % folds].append(int(idx))
    return [np.array(sorted(fold), dtype=np.int64) for fold in assignments]


@dataclass
class GridSearchResult:
    best_params: dict
    cv_table: list[dict]
    model: TrainedModel


def grid_search(
    kind: str, data: Dataset, grid: dict[str, list], folds: int = 5, seed: int = 0
) -> GridSearchResult:
    """Stratified k-fold selection by mean macro-F1; ties keep enumeration order."""
    if not grid:
        raise InvalidInputError("grid must not be empty")
    fold_indices = stratified_folds(data.y, folds, seed)
    all_idx = np.arange(len(data))
    keys = list(grid)
    cv_table: list[dict] = []
    best: tuple[float, int] | None = None
    for combo_idx, values in enumerate(product(*(grid[k] for k in keys))):
        params = dict(zip(keys, values))
        fold_scores = []
        for held in fold_indices:
            train_idx = np.setdiff1d(all_idx, held)
            model = train_model(kind, data.subset(train_idx), seed=seed, **params)
            val = data.subset(held)
            preds = predict(model, _model_inputs(kind, val))
            fold_scores.append(_macro_f1(val.y, preds))
        mean_score = float(np.mean(fold_scores))
        cv_table.append(
            {"params": params, "mean_macro_f1": mean_score, "fold_scores": fold_scores}
        )
        if best is None or mean_score > best[0]:
            best = (mean_score, combo_idx)
    best_params = cv_table[best[1]]["params"]
    refit = train_model(kind, data, seed=seed, **best_params)
    return GridSearchResult(best_params=dict(best_params), cv_table=cv_table, model=refit)
