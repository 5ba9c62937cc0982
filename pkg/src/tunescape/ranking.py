"""Learning to rank (model, tuner) pairs across systems.

Each record describes one (model, tuner) pair on one system: signed
landscape deviations, accuracy metrics, and a one-hot encoding of the
tuner's characteristics. A gradient-boosted tree ensemble trained with
LambdaRank pairwise gradients scores unseen records; leave-one-system-out
evaluation compares the learned ordering against random ranking.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataFormatError, UndefinedMetricError
from .landscape import FeatureProfile
from .metrics import AccuracyReport, wilcoxon_rank_sum
from .surrogate import _fit_tree, _tree_predict

SEQ_REDUCTION = ("lasso", "gini", "multi-sensitivity", "none")
SEQ_ACQUISITION = ("ei", "ucb", "hedge", "max-mean")
SEQ_HEURISTIC = ("greedy", "gradient-descent", "local-search", "selective-exploration")
BATCH_DOMAIN = ("database", "hyperparameter", "design-models", "general")
BATCH_HEURISTIC = ("evolutionary", "local-search", "sampling", "random")

DEFAULT_FEATURES = {"sequential": ("kur", "mie"), "batch": ("ske", "plo")}

RANKER_FORMAT_VERSION = 1


@dataclass(frozen=True)
class TunerCharacteristics:
    """Published traits of a tuner, per workflow pattern.

    Sequential tuners are described by their dimension-reduction method,
    acquisition function, and search heuristic; batch tuners by their
    target domain, whether they model incrementally, and their heuristic.
    """

    pattern: str
    heuristic: str
    reduction: str | None = None
    acquisition: str | None = None
    domain: str | None = None
    incremental: bool | None = None

    def __post_init__(self):
        if self.pattern == "sequential":
            if self.reduction not in SEQ_REDUCTION:
                raise ValueError(f"reduction must be one of {SEQ_REDUCTION}")
            if self.acquisition not in SEQ_ACQUISITION:
                raise ValueError(f"acquisition must be one of {SEQ_ACQUISITION}")
            if self.heuristic not in SEQ_HEURISTIC:
                raise ValueError(f"sequential heuristic must be one of {SEQ_HEURISTIC}")
            if self.domain is not None or self.incremental is not None:
                raise ValueError("sequential tuners take no domain/incremental traits")
        elif self.pattern == "batch":
            if self.domain not in BATCH_DOMAIN:
                raise ValueError(f"domain must be one of {BATCH_DOMAIN}")
            if not isinstance(self.incremental, bool):
                raise ValueError("incremental must be a bool for batch tuners")
            if self.heuristic not in BATCH_HEURISTIC:
                raise ValueError(f"batch heuristic must be one of {BATCH_HEURISTIC}")
            if self.reduction is not None or self.acquisition is not None:
                raise ValueError("batch tuners take no reduction/acquisition traits")
        else:
            raise ValueError(f"pattern must be sequential or batch, got {self.pattern!r}")


def segment_layout(pattern: str):
    """Ordered (segment name, vocabulary) pairs for one pattern's encoding."""
    if pattern == "sequential":
        return (
            ("reduction", SEQ_REDUCTION),
            ("acquisition", SEQ_ACQUISITION),
            ("heuristic", SEQ_HEURISTIC),
        )
    if pattern == "batch":
        return (
            ("domain", BATCH_DOMAIN),
            ("incremental", ("true",)),
            ("heuristic", BATCH_HEURISTIC),
        )
    raise ValueError(f"pattern must be sequential or batch, got {pattern!r}")


def encode_tuner(tc: TunerCharacteristics) -> tuple[int, ...]:
    """One-hot encode tuner characteristics, segments in layout order."""
    bits: list[int] = []
    if tc.pattern == "sequential":
        for vocab, value in (
            (SEQ_REDUCTION, tc.reduction),
            (SEQ_ACQUISITION, tc.acquisition),
            (SEQ_HEURISTIC, tc.heuristic),
        ):
            bits.extend(1 if v == value else 0 for v in vocab)
    else:
        bits.extend(1 if v == tc.domain else 0 for v in BATCH_DOMAIN)
        bits.append(1 if tc.incremental else 0)
        bits.extend(1 if v == tc.heuristic else 0 for v in BATCH_HEURISTIC)
    return tuple(bits)


def decode_tuner(bits, pattern: str) -> TunerCharacteristics:
    """Invert encode_tuner; rejects malformed segment encodings."""
    bits = tuple(int(b) for b in bits)

    def pick(segment, vocab):
        if sum(segment) != 1:
            raise ValueError(f"segment {segment} is not one-hot")
        return vocab[segment.index(1)]

    if pattern == "sequential":
        if len(bits) != 12:
            raise ValueError(f"sequential encodings have 12 bits, got {len(bits)}")
        return TunerCharacteristics(
            pattern="sequential",
            reduction=pick(list(bits[0:4]), SEQ_REDUCTION),
            acquisition=pick(list(bits[4:8]), SEQ_ACQUISITION),
            heuristic=pick(list(bits[8:12]), SEQ_HEURISTIC),
        )
    if pattern == "batch":
        if len(bits) != 9:
            raise ValueError(f"batch encodings have 9 bits, got {len(bits)}")
        if bits[4] not in (0, 1):
            raise ValueError("incremental bit must be 0 or 1")
        return TunerCharacteristics(
            pattern="batch",
            domain=pick(list(bits[0:4]), BATCH_DOMAIN),
            incremental=bool(bits[4]),
            heuristic=pick(list(bits[5:9]), BATCH_HEURISTIC),
        )
    raise ValueError(f"pattern must be sequential or batch, got {pattern!r}")


@dataclass(frozen=True)
class RankingRecord:
    """One (system, model, tuner) example for the ranker.

    f_l holds the signed deviations of the global and local landscape
    features (model minus system), f_a the accuracy pair (mape, murd),
    f_t the one-hot tuner characteristics, and y the ground-truth rank
    within the system (1 is best; None for prediction-time records).
    """

    system: str
    model: str
    tuner: str
    f_l: tuple[float, float]
    f_a: tuple[float, float]
    f_t: tuple[int, ...]
    y: float | None = None

    def features(self) -> np.ndarray:
        return np.array(
            [self.f_l[0], self.f_l[1], self.f_a[0], self.f_a[1], *self.f_t],
            dtype=float,
        )


def assemble_records(
    system: str,
    ranks,
    model_profiles,
    system_profile: FeatureProfile,
    accuracy,
    characteristics,
    pattern: str,
    g_feature: str | None = None,
    l_feature: str | None = None,
) -> list[RankingRecord]:
    """Join profiles, accuracy, tuner traits, and ranks into records.

    `ranks` maps (model, tuner) to the ground-truth rank; the landscape
    deviation features default per pattern (sequential: kur/mie, batch:
    ske/plo). Missing inputs raise with the offending record named.
    """
    if pattern not in DEFAULT_FEATURES:
        raise ValueError(f"pattern must be sequential or batch, got {pattern!r}")
    g_feature = g_feature or DEFAULT_FEATURES[pattern][0]
    l_feature = l_feature or DEFAULT_FEATURES[pattern][1]
    records = []
    for (model, tuner), y in ranks.items():
        where = f"record ({system!r}, {model!r}, {tuner!r})"
        try:
            mp = model_profiles[model]
        except KeyError:
            raise KeyError(f"{where}: no profile for model {model!r}")
        try:
            acc = accuracy[model]
        except KeyError:
            raise KeyError(f"{where}: no accuracy report for model {model!r}")
        if not isinstance(acc, AccuracyReport):
            raise ValueError(f"{where}: accuracy must be an AccuracyReport")
        if acc.mape is None:
            raise ValueError(f"{where}: mape is undefined; records need both accuracy values")
        try:
            tc = characteristics[tuner]
        except KeyError:
            raise KeyError(f"{where}: no characteristics for tuner {tuner!r}")
        if tc.pattern != pattern:
            raise ValueError(f"{where}: tuner pattern {tc.pattern!r} != {pattern!r}")
        f_l = (
            mp.value(g_feature) - system_profile.value(g_feature),
            mp.value(l_feature) - system_profile.value(l_feature),
        )
        records.append(
            RankingRecord(
                system=system,
                model=model,
                tuner=tuner,
                f_l=f_l,
                f_a=(float(acc.mape), float(acc.murd)),
                f_t=encode_tuner(tc),
                y=float(y),
            )
        )
    return records


@dataclass(frozen=True)
class RankerParams:
    rounds: int = 100
    max_depth: int = 4
    learning_rate: float = 0.1
    min_leaf: int = 5
    seed: int = 0

    def to_record(self) -> dict:
        return {
            "rounds": self.rounds,
            "max_depth": self.max_depth,
            "learning_rate": self.learning_rate,
            "min_leaf": self.min_leaf,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class RankModel:
    """A boosted-tree scorer for one workflow pattern."""

    pattern: str
    params: RankerParams
    trees: tuple
    feature_layout: tuple[str, ...]
    training_loss: tuple[float, ...]
    n_records: int
    n_queries: int


def feature_layout(pattern: str) -> tuple[str, ...]:
    names = ["f_l_global", "f_l_local", "mape", "murd"]
    for segment, vocab in segment_layout(pattern):
        if segment == "incremental":
            names.append("incremental")
        else:
            names.extend(f"{segment}:{v}" for v in vocab)
    return tuple(names)


def _pattern_of_records(records) -> str:
    widths = {len(r.f_t) for r in records}
    if widths == {12}:
        return "sequential"
    if widths == {9}:
        return "batch"
    raise ValueError(
        "records must share one tuner encoding width (12 sequential, 9 batch); "
        f"saw widths {sorted(widths)}"
    )


def _relevance(y: np.ndarray) -> np.ndarray:
    return y.max() - y


def _query_lambdas(scores, rel, idcg):
    n = len(rel)
    order = np.lexsort((np.arange(n), -scores))
    pos = np.empty(n, dtype=np.int64)
    pos[order] = np.arange(1, n + 1)
    disc = 1.0 / np.log2(pos + 1.0)
    gain_gap = rel[:, None] - rel[None, :]
    mask = gain_gap > 0
    if not mask.any() or idcg == 0.0:
        zero = np.zeros(n)
        return zero, zero.copy(), 0.0, 0
    delta = np.abs(gain_gap) * np.abs(disc[:, None] - disc[None, :]) / idcg
    margin = np.clip(scores[:, None] - scores[None, :], -35.0, 35.0)
    rho = 1.0 / (1.0 + np.exp(margin))
    contrib = np.where(mask, rho * delta, 0.0)
    curvature = np.where(mask, rho * (1.0 - rho) * delta, 0.0)
    lam = contrib.sum(axis=1) - contrib.sum(axis=0)
    w = curvature.sum(axis=1) + curvature.sum(axis=0)
    return lam, w, float(contrib.sum()), int(mask.sum())


def _newton_leaves(node, x, rows, lam, w, lr):
    if "value" in node:
        sw = float(w[rows].sum())
        node["value"] = lr * float(lam[rows].sum()) / sw if sw > 0.0 else 0.0
        return
    mask = x[rows, node["feature"]] <= node["threshold"]
    _newton_leaves(node["left"], x, rows[mask], lam, w, lr)
    _newton_leaves(node["right"], x, rows[~mask], lam, w, lr)


def train_ranker(records, params: RankerParams | None = None) -> RankModel:
    """Fit the LambdaRank boosted-tree scorer on labeled records.

    Records group into queries by system; at least two systems with at
    least two records each are required, so a single-query corpus is
    rejected. Each boosting round fits a regression tree to the pairwise
    lambdas (graded by |delta NDCG| under the current scores) and applies
    a Newton step per leaf. Training is deterministic for fixed inputs.
    """
    params = params or RankerParams()
    records = list(records)
    if not records:
        raise ValueError("no records to train on")
    for r in records:
        if r.y is None:
            raise ValueError(f"record ({r.system!r}, {r.model!r}, {r.tuner!r}) has no rank")
    pattern = _pattern_of_records(records)
    queries: dict[str, list[int]] = {}
    for i, r in enumerate(records):
        queries.setdefault(r.system, []).append(i)
    if len(queries) < 2:
        raise ValueError("training needs at least 2 systems (single-query corpora are degenerate)")
    for system, rows in queries.items():
        if len(rows) < 2:
            raise ValueError(f"system {system!r} has fewer than 2 records")
    x = np.array([r.features() for r in records])
    y = np.array([r.y for r in records], dtype=float)
    rel = np.empty(len(records))
    idcg = {}
    for system, rows in queries.items():
        rows = np.array(rows)
        rel[rows] = _relevance(y[rows])
        ideal = np.sort(rel[rows])[::-1]
        idcg[system] = float((ideal / np.log2(np.arange(2, len(rows) + 2))).sum())
    scores = np.zeros(len(records))
    trees = []
    losses = []
    for _ in range(int(params.rounds)):
        lam = np.zeros(len(records))
        w = np.zeros(len(records))
        loss_sum = 0.0
        loss_n = 0
        for system, rows in queries.items():
            rows = np.array(rows)
            ql, qw, qsum, qn = _query_lambdas(scores[rows], rel[rows], idcg[system])
            lam[rows] = ql
            w[rows] = qw
            loss_sum += qsum
            loss_n += qn
        losses.append(loss_sum / loss_n if loss_n else 0.0)
        tree = _fit_tree(
            x, lam, range(x.shape[1]), params.max_depth, int(params.min_leaf)
        )
        _newton_leaves(tree, x, np.arange(len(records)), lam, w, params.learning_rate)
        step = np.empty(len(records))
        _tree_predict(tree, x, step, np.arange(len(records)))
        scores += step
        trees.append(tree)
    return RankModel(
        pattern=pattern,
        params=params,
        trees=tuple(trees),
        feature_layout=feature_layout(pattern),
        training_loss=tuple(losses),
        n_records=len(records),
        n_queries=len(queries),
    )


def predict_ranker(model: RankModel, records) -> np.ndarray:
    """Score records with a trained model (higher score = ranked better)."""
    records = list(records)
    if not records:
        raise ValueError("no records to score")
    width = len(model.feature_layout)
    x = np.empty((len(records), width))
    for i, r in enumerate(records):
        f = r.features()
        if f.size != width:
            raise ValueError(
                f"record ({r.system!r}, {r.model!r}, {r.tuner!r}) has {f.size} features, "
                f"model expects {width}"
            )
        x[i] = f
    scores = np.zeros(len(records))
    step = np.empty(len(records))
    rows = np.arange(len(records))
    for tree in model.trees:
        _tree_predict(tree, x, step, rows)
        scores += step
    return scores


def rank_by_scores(scores) -> list[int]:
    """Item indices from best to worst score, ties kept in input order."""
    scores = np.asarray(scores, dtype=float)
    return [int(i) for i in np.lexsort((np.arange(scores.size), -scores))]


def _check_order(order, n):
    order = [int(i) for i in order]
    if sorted(order) != list(range(n)):
        raise ValueError("order must be a permutation of all item indices")
    return order


def _clip_k(k, n):
    if k is None:
        return n
    k = int(k)
    if k < 1:
        raise ValueError("k must be >= 1")
    return min(k, n)


def ndcg_at_k(order, y, k=None) -> float:
    """NDCG of a predicted order against true ranks `y` (1 = best).

    Gains are linear relevances max(y) - y; the discount is
    log2(position + 1); k beyond the list is truncated.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    order = _check_order(order, n)
    k = _clip_k(k, n)
    rel = _relevance(y)
    if np.all(rel == 0.0):
        raise UndefinedMetricError("ndcg is undefined when every item is equally relevant")
    disc = 1.0 / np.log2(np.arange(2, k + 2))
    dcg = float((rel[order[:k]] * disc).sum())
    ideal = np.sort(rel)[::-1]
    idcg = float((ideal[:k] * disc).sum())
    return dcg / idcg


def top_half_relevance(y) -> np.ndarray:
    """Indicator of the true top half by rank (ties widen the set)."""
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        raise ValueError("empty rank vector")
    k = max(1, y.size // 2)
    threshold = np.sort(y)[k - 1]
    return y <= threshold


def ap_at_k(order, relevant, k=None) -> float:
    """Average precision at k against a binary relevance vector."""
    relevant = np.asarray(relevant, dtype=bool)
    n = relevant.size
    order = _check_order(order, n)
    k = _clip_k(k, n)
    total_relevant = int(relevant.sum())
    if total_relevant == 0:
        raise UndefinedMetricError("ap is undefined when no item is relevant")
    hits = 0
    precision_sum = 0.0
    for pos, idx in enumerate(order[:k], start=1):
        if relevant[idx]:
            hits += 1
            precision_sum += hits / pos
    return precision_sum / min(total_relevant, k)


@dataclass(frozen=True)
class MetricSummary:
    mean: float
    baseline: float
    improvement_pct: float | None
    p_value: float
    small_sample: bool
    per_repeat: tuple[float, ...]
    random_per_repeat: tuple[float, ...]

    def to_record(self) -> dict:
        return {
            "mean": self.mean,
            "baseline": self.baseline,
            "improvement_pct": self.improvement_pct,
            "p_value": self.p_value,
            "small_sample": self.small_sample,
        }


@dataclass(frozen=True)
class FoldReport:
    system: str
    n_records: int
    metrics: dict

    def to_record(self) -> dict:
        return {
            "system": self.system,
            "n_records": self.n_records,
            "metrics": {name: m.to_record() for name, m in sorted(self.metrics.items())},
        }


@dataclass(frozen=True)
class LooReport:
    folds: tuple[FoldReport, ...]
    summary: dict
    repeats: int
    seed: int

    def to_record(self) -> dict:
        return {
            "folds": [f.to_record() for f in self.folds],
            "summary": dict(sorted(self.summary.items())),
            "repeats": self.repeats,
            "seed": self.seed,
        }


def _metric_name(prefix, k):
    return f"{prefix}@{'all' if k is None else k}"


def _fold_metrics(order, y, ks):
    out = {}
    relevant = top_half_relevance(y)
    for k in ks:
        out[_metric_name("ndcg", k)] = ndcg_at_k(order, y, k)
        out[_metric_name("ap", k)] = ap_at_k(order, relevant, k)
    return out


def loo_evaluate(
    records_by_system,
    params: RankerParams | None = None,
    repeats: int = 30,
    seed: int = 0,
    ks=(1, 10, 20, None),
    baseline_permutations: int = 1000,
) -> LooReport:
    """Leave-one-system-out evaluation against a random-ranking baseline.

    For each held-out system the model trains on all other systems (the
    held-out query never enters training; this is checked) and its
    NDCG@k / AP@k are averaged over `repeats` seeded runs. The baseline
    is the Monte-Carlo mean over `baseline_permutations` random orders,
    and each metric carries a rank-sum p-value of the repeated model
    metrics against one random draw per repeat.
    """
    params = params or RankerParams()
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    systems = sorted(records_by_system)
    if len(systems) < 3:
        raise ValueError("leave-one-system-out needs at least 3 systems")
    folds = []
    pooled: dict[str, list[list[float]]] = {}
    for fold_i, held in enumerate(systems):
        test_records = list(records_by_system[held])
        if len(test_records) < 2:
            raise ValueError(f"system {held!r} has fewer than 2 records")
        train_records = []
        for s in systems:
            if s != held:
                train_records.extend(records_by_system[s])
        leaked = [r for r in train_records if r.system == held]
        if leaked:
            raise RuntimeError(f"held-out system {held!r} appears in the training queries")
        y = np.array([r.y for r in test_records], dtype=float)
        n = y.size
        model_values: dict[str, list[float]] = {}
        random_values: dict[str, list[float]] = {}
        for rep in range(repeats):
            rep_params = RankerParams(
                rounds=params.rounds,
                max_depth=params.max_depth,
                learning_rate=params.learning_rate,
                min_leaf=params.min_leaf,
                seed=int(np.random.default_rng([seed, fold_i, rep]).integers(2 ** 31)),
            )
            model = train_ranker(train_records, rep_params)
            order = rank_by_scores(predict_ranker(model, test_records))
            for name, value in _fold_metrics(order, y, ks).items():
                model_values.setdefault(name, []).append(value)
            rng = np.random.default_rng([seed, fold_i, rep, 1])
            random_order = [int(i) for i in rng.permutation(n)]
            for name, value in _fold_metrics(random_order, y, ks).items():
                random_values.setdefault(name, []).append(value)
        baseline_values: dict[str, list[float]] = {}
        rng = np.random.default_rng([seed, fold_i, 2])
        for _ in range(baseline_permutations):
            perm = [int(i) for i in rng.permutation(n)]
            for name, value in _fold_metrics(perm, y, ks).items():
                baseline_values.setdefault(name, []).append(value)
        metrics = {}
        for name in model_values:
            mean = float(np.mean(model_values[name]))
            baseline = float(np.mean(baseline_values[name]))
            test = wilcoxon_rank_sum(model_values[name], random_values[name])
            metrics[name] = MetricSummary(
                mean=mean,
                baseline=baseline,
                improvement_pct=(100.0 * (mean - baseline) / baseline) if baseline else None,
                p_value=test.p_value,
                small_sample=test.small_sample,
                per_repeat=tuple(model_values[name]),
                random_per_repeat=tuple(random_values[name]),
            )
            pooled.setdefault(name, [[], []])
            pooled[name][0].append(mean)
            pooled[name][1].append(baseline)
        folds.append(FoldReport(system=held, n_records=n, metrics=metrics))
    summary = {}
    for name, (means, baselines) in pooled.items():
        summary[name] = {
            "mean": float(np.mean(means)),
            "baseline": float(np.mean(baselines)),
            "folds_above_baseline": int(
                sum(1 for m, b in zip(means, baselines) if m > b)
            ),
            "n_folds": len(means),
        }
    return LooReport(folds=tuple(folds), summary=summary, repeats=repeats, seed=seed)


def _segment_bits(record: RankingRecord, pattern: str):
    bits = record.f_t
    out = []
    start = 0
    for segment, vocab in segment_layout(pattern):
        width = len(vocab)
        out.append((segment, "".join(str(b) for b in bits[start : start + width])))
        start += width
    return out


def record_columns(pattern: str) -> list[str]:
    """CSV header for record files of one pattern."""
    names = ["system", "model", "tuner", "f_l_global", "f_l_local", "mape", "murd"]
    names.extend(segment for segment, _ in segment_layout(pattern))
    names.append("y")
    return names


def write_records(records, path):
    """Write records as CSV; the y cell is left empty when unranked."""
    import csv

    records = list(records)
    if not records:
        raise ValueError("no records to write")
    pattern = _pattern_of_records(records)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(record_columns(pattern))
        for r in records:
            row = [
                r.system,
                r.model,
                r.tuner,
                repr(float(r.f_l[0])),
                repr(float(r.f_l[1])),
                repr(float(r.f_a[0])),
                repr(float(r.f_a[1])),
            ]
            row.extend(bits for _, bits in _segment_bits(r, pattern))
            row.append("" if r.y is None else repr(float(r.y)))
            writer.writerow(row)


def read_records(path) -> list[RankingRecord]:
    """Load a record CSV, inferring the pattern from the header."""
    import csv

    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            rows = list(reader)
    except OSError as exc:
        raise DataFormatError(f"cannot read record file: {exc}", path=path)
    except UnicodeDecodeError as exc:
        raise DataFormatError(f"record file is not UTF-8: {exc}", path=path)
    if not rows:
        raise DataFormatError("record file is empty", path=path)
    header = rows[0]
    pattern = None
    for candidate in ("sequential", "batch"):
        if header == record_columns(candidate):
            pattern = candidate
            break
    if pattern is None:
        raise DataFormatError(
            f"unrecognized record header {header!r}; expected the column layout of "
            "a sequential or batch record file",
            path=path,
        )
    layout = segment_layout(pattern)
    records = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DataFormatError(
                f"expected {len(header)} cells, found {len(row)}", path=path, row=i
            )
        def _float(cell, column):
            try:
                return float(cell)
            except ValueError:
                raise DataFormatError(
                    f"cannot parse {cell!r} as a number", path=path, row=i, column=column
                )
        bits: list[int] = []
        for offset, (segment, vocab) in enumerate(layout):
            cell = row[7 + offset]
            if len(cell) != len(vocab) or any(c not in "01" for c in cell):
                raise DataFormatError(
                    f"segment {segment!r} must be {len(vocab)} bits, got {cell!r}",
                    path=path,
                    row=i,
                    column=segment,
                )
            bits.extend(int(c) for c in cell)
        try:
            decode_tuner(bits, pattern)
        except ValueError as exc:
            raise DataFormatError(str(exc), path=path, row=i)
        y_cell = row[7 + len(layout)]
        records.append(
            RankingRecord(
                system=row[0],
                model=row[1],
                tuner=row[2],
                f_l=(_float(row[3], "f_l_global"), _float(row[4], "f_l_local")),
                f_a=(_float(row[5], "mape"), _float(row[6], "murd")),
                f_t=tuple(bits),
                y=None if y_cell == "" else _float(y_cell, "y"),
            )
        )
    if not records:
        raise DataFormatError("record file has a header but no rows", path=path)
    return records


def save_ranker(model: RankModel, path):
    doc = {
        "format_version": RANKER_FORMAT_VERSION,
        "pattern": model.pattern,
        "params": model.params.to_record(),
        "feature_layout": list(model.feature_layout),
        "trees": list(model.trees),
        "training_loss": list(model.training_loss),
        "n_records": model.n_records,
        "n_queries": model.n_queries,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")


def load_ranker(path) -> RankModel:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataFormatError(f"cannot read ranker model: {exc}", path=path)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"ranker model is not valid JSON: {exc}", path=path)
    if doc.get("format_version") != RANKER_FORMAT_VERSION:
        raise DataFormatError(
            f"unsupported ranker format version {doc.get('format_version')!r}", path=path
        )
    return RankModel(
        pattern=doc["pattern"],
        params=RankerParams(**doc["params"]),
        trees=tuple(doc["trees"]),
        feature_layout=tuple(doc["feature_layout"]),
        training_loss=tuple(doc["training_loss"]),
        n_records=doc["n_records"],
        n_queries=doc["n_queries"],
    )
