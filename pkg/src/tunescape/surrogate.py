"""Surrogate performance models over configuration spaces.

Four built-in regressors (linear least squares, CART, bagged random
forest, and Hamming k-nearest-neighbors) share one training interface.
Models fit raw measured performance; orientation to minimized fitness
happens when an emulated landscape view is built from the predictions.

All models are deterministic given (kind, params, training rows, seed).
Externally produced predictions can be loaded from file and analyzed the
same way.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DataFormatError
from .landscape import LandscapeView
from .space import (
    ConfigurationSpace,
    Configuration,
    PerformanceDataset,
    space_from_doc,
    space_to_doc,
)

MODEL_KINDS = ("linear", "cart", "forest", "knn")

MODEL_FORMAT_VERSION = 1


def encode_configs(space: ConfigurationSpace, configs) -> np.ndarray:
    """Encode configurations as a float feature matrix.

    Binary options become a single 0/1 column, numeric options their
    min-max scaled level value, enumerated options a one-hot block.
    """
    configs = list(configs)
    columns = []
    for j, opt in enumerate(space.options):
        idx = np.array([c.values[j] for c in configs], dtype=np.int64)
        if opt.kind == "binary":
            columns.append(idx.astype(float))
        elif opt.kind == "numeric":
            levels = np.array([float(v) for v in opt.values])
            span = levels[-1] - levels[0]
            if span == 0.0:
                columns.append(np.zeros(len(configs)))
            else:
                columns.append((levels[idx] - levels[0]) / span)
        else:
            onehot = np.zeros((len(configs), opt.cardinality))
            onehot[np.arange(len(configs)), idx] = 1.0
            for k in range(opt.cardinality):
                columns.append(onehot[:, k])
    return np.column_stack(columns) if columns else np.zeros((len(configs), 0))


def _fingerprint(space: ConfigurationSpace, matrix: np.ndarray, y: np.ndarray) -> str:
    h = hashlib.sha256()
    h.update(repr(space.option_names).encode())
    order = np.lexsort(matrix.T[::-1])
    for i in order:
        h.update(matrix[i].tobytes())
        h.update(repr(float(y[i])).encode())
    return h.hexdigest()[:16]


class SurrogateModel:
    """Base class: a fitted regressor bound to its space and provenance."""

    kind = "base"

    def __init__(self, space: ConfigurationSpace, params: dict, train_fingerprint: str):
        self.space = space
        self.params = dict(params)
        self.train_fingerprint = train_fingerprint

    @property
    def model_id(self) -> str:
        return f"{self.kind}:{self.train_fingerprint}"

    def predict_values(self, configs) -> np.ndarray:
        raise NotImplementedError

    def _state(self) -> dict:
        raise NotImplementedError


class LinearModel(SurrogateModel):
    """Ordinary least squares on the encoded features."""

    kind = "linear"

    def __init__(self, space, params, train_fingerprint, coef):
        super().__init__(space, params, train_fingerprint)
        self.coef = np.asarray(coef, dtype=float)

    @classmethod
    def fit(cls, space, params, x, y, fingerprint, rng):
        design = np.column_stack([np.ones(len(x)), x])
        coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
        if rank < design.shape[1]:
            warnings.warn(
                "linear model: rank-deficient design, using the pseudo-inverse solution"
            )
        return cls(space, params, fingerprint, coef)

    def predict_values(self, configs):
        x = encode_configs(self.space, configs)
        return np.column_stack([np.ones(len(x)), x]) @ self.coef

    def _state(self):
        return {"coef": self.coef.tolist()}


def _fit_tree(x, y, features, max_depth, min_leaf, depth=0):
    n = len(y)
    if (
        n < 2 * min_leaf
        or (max_depth is not None and depth >= max_depth)
        or float(y.max() - y.min()) == 0.0
    ):
        return {"value": float(y.mean())}
    best = None
    for j in features:
        xs = x[:, j]
        order = np.argsort(xs, kind="stable")
        xv = xs[order]
        yv = y[order]
        pos = np.nonzero(xv[1:] > xv[:-1])[0] + 1
        pos = pos[(pos >= min_leaf) & (n - pos >= min_leaf)]
        if pos.size == 0:
            continue
        csum = np.cumsum(yv)
        csq = np.cumsum(yv * yv)
        left_sum = csum[pos - 1]
        left_sq = csq[pos - 1]
        sse_left = left_sq - left_sum * left_sum / pos
        right_sum = csum[-1] - left_sum
        right_sq = csq[-1] - left_sq
        sse_right = right_sq - right_sum * right_sum / (n - pos)
        sse = sse_left + sse_right
        k = int(np.argmin(sse))
        if best is None or sse[k] < best[0] - 1e-12:
            threshold = (xv[pos[k] - 1] + xv[pos[k]]) / 2.0
            best = (float(sse[k]), j, threshold)
    if best is None:
        return {"value": float(y.mean())}
    _, j, threshold = best
    mask = x[:, j] <= threshold
    return {
        "feature": int(j),
        "threshold": float(threshold),
        "left": _fit_tree(x[mask], y[mask], features, max_depth, min_leaf, depth + 1),
        "right": _fit_tree(x[~mask], y[~mask], features, max_depth, min_leaf, depth + 1),
    }


def _tree_predict(node, x, out, rows):
    if "value" in node:
        out[rows] = node["value"]
        return
    mask = x[rows, node["feature"]] <= node["threshold"]
    left = rows[mask]
    right = rows[~mask]
    if left.size:
        _tree_predict(node["left"], x, out, left)
    if right.size:
        _tree_predict(node["right"], x, out, right)


class CartModel(SurrogateModel):
    """Regression tree with variance-reduction splits."""

    kind = "cart"

    def __init__(self, space, params, train_fingerprint, tree):
        super().__init__(space, params, train_fingerprint)
        self.tree = tree

    @classmethod
    def fit(cls, space, params, x, y, fingerprint, rng):
        max_depth = params.get("max_depth")
        min_leaf = int(params.get("min_leaf", 2))
        if min_leaf < 1:
            raise ValueError("min_leaf must be >= 1")
        tree = _fit_tree(x, y, range(x.shape[1]), max_depth, min_leaf)
        return cls(space, params, fingerprint, tree)

    def predict_values(self, configs):
        x = encode_configs(self.space, configs)
        out = np.empty(len(x))
        _tree_predict(self.tree, x, out, np.arange(len(x)))
        return out

    def _state(self):
        return {"tree": self.tree}


class ForestModel(SurrogateModel):
    """Bagged CART ensemble with per-tree feature subsampling."""

    kind = "forest"

    def __init__(self, space, params, train_fingerprint, trees):
        super().__init__(space, params, train_fingerprint)
        self.trees = trees

    @classmethod
    def fit(cls, space, params, x, y, fingerprint, rng_seed):
        n_trees = int(params.get("n_trees", 100))
        if n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        max_depth = params.get("max_depth")
        min_leaf = int(params.get("min_leaf", 1))
        max_features = float(params.get("max_features", 1.0 / 3.0))
        d = x.shape[1]
        n_feat = max(1, min(d, round(max_features * d)))
        n = len(y)
        trees = []
        for t in range(n_trees):
            rng = np.random.default_rng([int(rng_seed), t])
            rows = rng.integers(0, n, n)
            feats = np.sort(rng.choice(d, size=n_feat, replace=False))
            trees.append(_fit_tree(x[rows], y[rows], feats, max_depth, min_leaf))
        return cls(space, params, fingerprint, trees)

    def tree_predictions(self, configs) -> np.ndarray:
        """Per-tree prediction matrix (n_trees x n_configs)."""
        x = encode_configs(self.space, configs)
        rows = np.arange(len(x))
        out = np.empty((len(self.trees), len(x)))
        for t, tree in enumerate(self.trees):
            _tree_predict(tree, x, out[t], rows)
        return out

    def predict_values(self, configs):
        return self.tree_predictions(configs).mean(axis=0)

    def _state(self):
        return {"trees": self.trees}


class KnnModel(SurrogateModel):
    """k-nearest-neighbor regression under Hamming distance.

    Distance ties are broken by training row order, so predictions are
    reproducible regardless of how the training set was assembled.
    """

    kind = "knn"

    def __init__(self, space, params, train_fingerprint, train_matrix, train_y):
        super().__init__(space, params, train_fingerprint)
        self.train_matrix = np.asarray(train_matrix, dtype=np.int64)
        self.train_y = np.asarray(train_y, dtype=float)

    @classmethod
    def fit(cls, space, params, x, y, fingerprint, rng, matrix=None):
        k = int(params.get("k", 3))
        if k < 1:
            raise ValueError("k must be >= 1")
        return cls(space, params, fingerprint, matrix, y)

    def predict_values(self, configs):
        configs = list(configs)
        q = np.array([c.values for c in configs], dtype=np.int64)
        n_train = len(self.train_y)
        k = min(int(self.params.get("k", 3)), n_train)
        out = np.empty(len(configs))
        step = max(1, (1 << 22) // max(1, self.train_matrix.size))
        for lo in range(0, len(configs), step):
            block = q[lo : lo + step]
            dist = (block[:, None, :] != self.train_matrix[None, :, :]).sum(axis=2)
            # one key per cell: distance-major, training-row-minor, so ties
            # resolve to the earliest training row
            keyed = dist * n_train + np.arange(n_train)[None, :]
            nearest = np.argsort(keyed, axis=1)[:, :k]
            out[lo : lo + block.shape[0]] = self.train_y[nearest].mean(axis=1)
        return out

    def _state(self):
        return {
            "train_matrix": self.train_matrix.tolist(),
            "train_y": self.train_y.tolist(),
        }


_MODEL_CLASSES = {
    "linear": LinearModel,
    "cart": CartModel,
    "forest": ForestModel,
    "knn": KnnModel,
}


def train(kind: str, dataset: PerformanceDataset, seed: int = 0, params: dict | None = None) -> SurrogateModel:
    """Fit a surrogate of the given kind on a training dataset.

    Training consumes raw measured performance. The returned model
    carries a fingerprint of its training rows for provenance checks.
    """
    if kind not in _MODEL_CLASSES:
        raise ValueError(f"unknown model kind {kind!r}; choose from {MODEL_KINDS}")
    params = dict(params or {})
    y = np.asarray(dataset.performances, dtype=float)
    x = encode_configs(dataset.space, dataset.configurations)
    fingerprint = _fingerprint(dataset.space, dataset.matrix, y)
    if kind == "knn":
        return KnnModel.fit(
            dataset.space, params, x, y, fingerprint, seed, matrix=dataset.matrix
        )
    return _MODEL_CLASSES[kind].fit(dataset.space, params, x, y, fingerprint, seed)


@dataclass(frozen=True)
class PredictionSet:
    """Predicted performance at a set of configurations."""

    configurations: tuple[Configuration, ...]
    predicted: np.ndarray
    model_id: str

    def __post_init__(self):
        p = np.asarray(self.predicted, dtype=float)
        if p.shape != (len(self.configurations),):
            raise ValueError("predictions must align one-to-one with configurations")
        p.setflags(write=False)
        object.__setattr__(self, "predicted", p)


def predict(model: SurrogateModel, configs) -> PredictionSet:
    configs = tuple(configs)
    return PredictionSet(
        configurations=configs,
        predicted=model.predict_values(configs),
        model_id=model.model_id,
    )


def emulated_view(model, test_points, direction: str, radius: int = 1, source=None) -> LandscapeView:
    """Landscape view of a model's predictions at the test points.

    Accepts either a fitted model or a PredictionSet (for externally
    produced predictions). Maximizing objectives are negated so the view
    minimizes fitness like every other view.
    """
    if direction not in ("minimize", "maximize"):
        raise ValueError(f"direction must be minimize or maximize, got {direction!r}")
    if isinstance(model, PredictionSet):
        if test_points is not None and tuple(test_points) != model.configurations:
            raise ValueError("test_points must match the prediction set")
        points = model.configurations
        predicted = model.predicted
        space = None
        tag = model.model_id
    else:
        points = tuple(test_points)
        predicted = model.predict_values(points)
        space = model.space
        tag = model.model_id
    fitness = predicted if direction == "minimize" else -predicted
    return LandscapeView(
        space, points, fitness, source=f"model:{tag}" if source is None else source, radius=radius
    )


def load_external_predictions(path, space: ConfigurationSpace, model_id=None) -> PredictionSet:
    """Load predictions from a CSV with option columns plus `predicted`."""
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataFormatError(f"cannot read predictions: {exc}", path=path)
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError("prediction file is empty", path=path)
        expected = set(space.option_names) | {"predicted"}
        if set(header) != expected or len(set(header)) != len(header):
            raise DataFormatError(
                f"prediction columns must be exactly {sorted(expected)}", path=path
            )
        option_cols = [header.index(name) for name in space.option_names]
        pred_col = header.index("predicted")
        configs = []
        values = []
        for rownum, cells in enumerate(reader, start=2):
            if len(cells) != len(header):
                raise DataFormatError(
                    f"expected {len(header)} cells, got {len(cells)}", path=path, row=rownum
                )
            try:
                configs.append(space.from_raw([cells[j] for j in option_cols]))
            except ValueError as exc:
                raise DataFormatError(str(exc), path=path, row=rownum)
            try:
                v = float(cells[pred_col])
            except ValueError:
                raise DataFormatError(
                    f"cannot parse prediction {cells[pred_col]!r}", path=path, row=rownum
                )
            if not math.isfinite(v):
                raise DataFormatError("predictions must be finite", path=path, row=rownum)
            values.append(v)
    if not configs:
        raise DataFormatError("prediction file has a header but no rows", path=path)
    if len(set(configs)) != len(configs):
        raise DataFormatError("duplicate configurations in prediction file", path=path)
    return PredictionSet(
        configurations=tuple(configs),
        predicted=np.array(values),
        model_id="external" if model_id is None else model_id,
    )


def write_predictions(space: ConfigurationSpace, predictions: PredictionSet, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(space.option_names) + ["predicted"])
        for config, value in zip(predictions.configurations, predictions.predicted):
            writer.writerow(
                [str(v) for v in space.raw_values(config)] + [repr(float(value))]
            )


def save_model(model: SurrogateModel, path):
    """Serialize a fitted model to a versioned JSON document."""
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "kind": model.kind,
        "params": model.params,
        "train_fingerprint": model.train_fingerprint,
        "space": space_to_doc(model.space),
        "state": model._state(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")


def load_model(path) -> SurrogateModel:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataFormatError(f"cannot read model: {exc}", path=path)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"model file is not valid JSON: {exc}", path=path)
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise DataFormatError(
            f"unsupported model format version {doc.get('format_version')!r}", path=path
        )
    kind = doc.get("kind")
    if kind not in _MODEL_CLASSES:
        raise DataFormatError(f"unknown model kind {kind!r}", path=path)
    space = space_from_doc(doc["space"])
    params = doc.get("params", {})
    fingerprint = doc.get("train_fingerprint", "unknown")
    state = doc["state"]
    if kind == "linear":
        return LinearModel(space, params, fingerprint, state["coef"])
    if kind == "cart":
        return CartModel(space, params, fingerprint, state["tree"])
    if kind == "forest":
        return ForestModel(space, params, fingerprint, state["trees"])
    return KnnModel(space, params, fingerprint, state["train_matrix"], state["train_y"])
