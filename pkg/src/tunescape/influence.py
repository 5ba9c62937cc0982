"""Option influence analysis: ablate, re-model, and cluster features.

Dropping one option from the dataset collapses now-identical rows; a
surrogate re-trained on the reduced data emulates a landscape whose
features shift when the dropped option mattered. Clustering the
per-option feature vectors against the all-options vector separates
influential options from the rest.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import AnalysisError, IncompleteMatrixError
from .landscape import ALL_FEATURES, compute_feature, random_walks
from .space import ConfigurationSpace, PerformanceDataset, split_train_test
from .surrogate import emulated_view, train


def ablate_option(dataset: PerformanceDataset, option_name: str) -> PerformanceDataset:
    """Remove one option; collapse rows that became identical.

    Each collapsed group keeps its most frequent performance value, ties
    resolved to the lowest value, so ablation is deterministic.
    """
    space = dataset.space
    if space.n_options < 2:
        raise ValueError("cannot ablate the only option")
    j = space.option_index(option_name)
    reduced_space = ConfigurationSpace(
        [opt for i, opt in enumerate(space.options) if i != j],
        direction=space.direction,
    )
    groups: dict[tuple, list[float]] = {}
    order = []
    for config, perf in dataset:
        reduced = config.values[:j] + config.values[j + 1 :]
        if reduced not in groups:
            groups[reduced] = []
            order.append(reduced)
        groups[reduced].append(float(perf))
    rows = []
    for reduced in order:
        counts = Counter(groups[reduced])
        top = max(counts.values())
        perf = min(v for v, c in counts.items() if c == top)
        rows.append((reduced_space.configuration(reduced), perf))
    return PerformanceDataset(
        reduced_space,
        rows,
        performance_name=dataset.performance_name,
        provenance=dataset.provenance,
    )


@dataclass(frozen=True)
class FeatureMatrix:
    """One landscape feature of every model under every single-option ablation.

    Rows are models, columns are the ablated option plus a final "all"
    column computed on the unablated dataset.
    """

    feature: str
    models: tuple[str, ...]
    columns: tuple[str, ...]
    values: np.ndarray
    seed: int
    walk_length: int
    n_walks: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (len(self.models), len(self.columns)):
            raise ValueError("matrix shape must be (models, columns)")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def column_index(self, name: str) -> int:
        return self.columns.index(name)

    def to_record(self) -> dict:
        return {
            "feature": self.feature,
            "models": list(self.models),
            "columns": list(self.columns),
            "values": [[float(x) for x in row] for row in self.values],
            "seed": self.seed,
            "walk_length": self.walk_length,
            "n_walks": self.n_walks,
        }


def build_matrices(
    dataset: PerformanceDataset,
    model_kinds,
    features=ALL_FEATURES,
    split="binary-5n",
    seed: int = 0,
    model_params=None,
    walk_length: int = 50,
    n_walks: int = 30,
) -> dict:
    """Build feature matrices for several features with shared training.

    Every cell shares the same split seed and walk parameters, so cells
    are comparable across columns. A cell whose feature is undefined
    raises IncompleteMatrixError naming the model and column.
    """
    model_kinds = list(model_kinds)
    if not model_kinds:
        raise ValueError("at least one model kind is required")
    if len(set(model_kinds)) != len(model_kinds):
        raise ValueError("model kinds must be unique")
    features = list(features)
    for f in features:
        if f not in ALL_FEATURES:
            raise KeyError(f"unknown feature {f!r}")
    columns = list(dataset.space.option_names) + ["all"]
    values = {f: np.empty((len(model_kinds), len(columns))) for f in features}
    params = model_params or {}
    for col_i, column in enumerate(columns):
        ds = dataset if column == "all" else ablate_option(dataset, column)
        train_ds, test_ds = split_train_test(ds, split, seed)
        test_points = test_ds.configurations
        for m_i, kind in enumerate(model_kinds):
            model = train(kind, train_ds, seed=seed, params=params.get(kind))
            view = emulated_view(model, test_points, ds.space.direction)
            try:
                walks = random_walks(view, walk_length, n_walks, seed)
            except AnalysisError as exc:
                raise IncompleteMatrixError(kind, column, str(exc))
            for f in features:
                try:
                    values[f][m_i, col_i] = compute_feature(view, f, walks=walks)
                except AnalysisError as exc:
                    raise IncompleteMatrixError(kind, column, getattr(exc, "reason", str(exc)))
    return {
        f: FeatureMatrix(
            feature=f,
            models=tuple(model_kinds),
            columns=tuple(columns),
            values=values[f],
            seed=int(seed),
            walk_length=walk_length,
            n_walks=n_walks,
        )
        for f in features
    }


def build_matrix(dataset, model_kinds, feature, split="binary-5n", seed=0, model_params=None, walk_length=50, n_walks=30) -> FeatureMatrix:
    """Build the model-feature matrix for a single feature."""
    return build_matrices(
        dataset,
        model_kinds,
        [feature],
        split=split,
        seed=seed,
        model_params=model_params,
        walk_length=walk_length,
        n_walks=n_walks,
    )[feature]


@dataclass(frozen=True)
class KMeansResult:
    labels: np.ndarray
    inertia: float
    degenerate: bool

    def __post_init__(self):
        l = np.asarray(self.labels, dtype=np.int64)
        l.setflags(write=False)
        object.__setattr__(self, "labels", l)


def _wcss(x: np.ndarray, labels: np.ndarray) -> float:
    total = 0.0
    for lab in (0, 1):
        side = x[labels == lab]
        if len(side):
            total += float(((side - side.mean(axis=0)) ** 2).sum())
    return total


def _kmeans_exhaustive(x: np.ndarray) -> KMeansResult:
    n = len(x)
    best = None
    for mask in range(1, 1 << (n - 1)):
        labels = np.zeros(n, dtype=np.int64)
        for i in range(1, n):
            labels[i] = (mask >> (i - 1)) & 1
        inertia = _wcss(x, labels)
        if best is None or inertia < best[0] - 1e-12:
            best = (inertia, labels)
    return KMeansResult(labels=best[1], inertia=best[0], degenerate=False)


def _kmeans_plusplus(x: np.ndarray, seed: int, restarts: int) -> KMeansResult:
    n = len(x)
    best = None
    for r in range(restarts):
        rng = np.random.default_rng([int(seed), r])
        centers = np.empty((2, x.shape[1]))
        centers[0] = x[int(rng.integers(n))]
        d2 = ((x - centers[0]) ** 2).sum(axis=1)
        probs = d2 / d2.sum()
        centers[1] = x[int(rng.choice(n, p=probs))]
        labels = None
        for _ in range(100):
            dist = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            new_labels = dist.argmin(axis=1).astype(np.int64)
            for lab in (0, 1):
                if not np.any(new_labels == lab):
                    far = int(np.argmax(dist.min(axis=1)))
                    new_labels[far] = lab
            if labels is not None and np.array_equal(new_labels, labels):
                break
            labels = new_labels
            for lab in (0, 1):
                centers[lab] = x[labels == lab].mean(axis=0)
        inertia = _wcss(x, labels)
        if best is None or inertia < best[0] - 1e-12:
            best = (inertia, labels)
    return KMeansResult(labels=best[1], inertia=best[0], degenerate=False)


def kmeans2(vectors, seed: int = 0, restarts: int = 10) -> KMeansResult:
    """Two-means clustering with a deterministic outcome.

    Identical inputs are flagged degenerate (a single cluster). Small
    instances (up to 16 vectors) are solved by exhaustive two-partition
    search, which realizes the k-means objective exactly; larger ones use
    k-means++ seeding with `restarts` independent restarts, keeping the
    best within-cluster sum of squares. Labels are normalized so the
    first vector gets label 0; only the partition is meaningful.
    """
    x = np.asarray(vectors, dtype=float)
    if x.ndim != 2 or len(x) < 2:
        raise ValueError("need at least 2 vectors of equal dimension")
    if np.all(x == x[0]):
        return KMeansResult(labels=np.zeros(len(x), dtype=np.int64), inertia=0.0, degenerate=True)
    if len(x) <= 16:
        result = _kmeans_exhaustive(x)
    else:
        result = _kmeans_plusplus(x, seed, restarts)
    labels = result.labels
    if labels[0] == 1:
        labels = 1 - labels
    return KMeansResult(labels=labels, inertia=result.inertia, degenerate=False)


@dataclass(frozen=True)
class InfluenceResult:
    """Options judged influential for one feature, with clustering detail."""

    feature: str
    options: tuple[str, ...]
    degenerate: bool
    labels: dict
    inverted: bool

    def to_record(self) -> dict:
        return {
            "feature": self.feature,
            "options": list(self.options),
            "degenerate": self.degenerate,
            "labels": dict(self.labels),
            "inverted": self.inverted,
        }


def influential_options(matrix: FeatureMatrix, seed: int = 0, invert: bool = False) -> InfluenceResult:
    """Cluster the matrix columns and pick out the influential options.

    Rows are standardized (z-score per model across columns) so models
    with different feature scales weigh equally, then the column vectors
    are 2-means clustered. By default the options falling in the opposite
    cluster from the "all" column are influential; `invert` selects the
    same-cluster reading instead. A degenerate clustering yields no
    influential options and sets the flag.
    """
    v = np.array(matrix.values, dtype=float)
    means = v.mean(axis=1, keepdims=True)
    stds = v.std(axis=1, keepdims=True)
    stds[stds == 0.0] = 1.0
    standardized = (v - means) / stds
    result = kmeans2(standardized.T, seed=seed)
    labels = {col: int(lab) for col, lab in zip(matrix.columns, result.labels)}
    if result.degenerate:
        return InfluenceResult(
            feature=matrix.feature,
            options=(),
            degenerate=True,
            labels=labels,
            inverted=invert,
        )
    all_label = labels["all"]
    picked = []
    for col in matrix.columns:
        if col == "all":
            continue
        same = labels[col] == all_label
        if same == invert:
            picked.append(col)
    return InfluenceResult(
        feature=matrix.feature,
        options=tuple(picked),
        degenerate=result.degenerate,
        labels=labels,
        inverted=invert,
    )
