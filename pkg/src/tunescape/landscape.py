"""Landscape views over measured data and the eight landscape features.

A view is an immutable set of configurations with a fitness value per
point, where fitness is always minimized: maximizing objectives are
negated when the view is built. Neighborhoods connect points of the view
itself (never unmeasured configurations), so every feature is computed on
exactly the data a surrogate model or a measured dataset can offer.

Global features: fitness distance correlation (fdc), fitness-best
distance (fbd), skewness (ske), kurtosis (kur). Local features: ratio of
local optima (plo), correlation length (cl), maximal information entropy
(mie), and the nearest-better ratio (nbc).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SparseLandscapeError, UndefinedFeatureError
from .space import Configuration, PerformanceDataset

GLOBAL_FEATURES = ("fdc", "fbd", "ske", "kur")
LOCAL_FEATURES = ("plo", "cl", "mie", "nbc")
ALL_FEATURES = GLOBAL_FEATURES + LOCAL_FEATURES

DEFAULT_WALK_LENGTH = 50
DEFAULT_WALKS = 30

_LOG6 = math.log(6.0)


class LandscapeView:
    """An immutable minimized-fitness view over a finite point set."""

    def __init__(self, space, points, fitness, source="exact", radius=1):
        points = tuple(points)
        fitness = np.asarray(fitness, dtype=float)
        if len(points) == 0:
            raise ValueError("a landscape view needs at least one point")
        if fitness.shape != (len(points),):
            raise ValueError("fitness must align one-to-one with points")
        if not np.all(np.isfinite(fitness)):
            raise ValueError("fitness values must be finite")
        if radius < 1:
            raise ValueError("neighborhood radius must be >= 1")
        if len(set(points)) != len(points):
            raise ValueError("view points must be unique")
        self.space = space
        self.points = points
        self.fitness = fitness
        self.fitness.setflags(write=False)
        self.source = source
        self.radius = int(radius)
        self._row_of = {c: i for i, c in enumerate(points)}
        self._matrix = None
        self._neighbor_lists = None

    def __len__(self):
        return len(self.points)

    def __contains__(self, config):
        return config in self._row_of

    def row_index(self, config: Configuration) -> int:
        try:
            return self._row_of[config]
        except KeyError:
            raise KeyError(f"configuration {config.values} is not in the view")

    def fitness_of(self, config: Configuration) -> float:
        return float(self.fitness[self.row_index(config)])

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            m = np.array([c.values for c in self.points], dtype=np.int64)
            m.setflags(write=False)
            self._matrix = m
        return self._matrix

    @property
    def neighbor_lists(self) -> tuple[np.ndarray, ...]:
        """Per-point arrays of in-view neighbor row indices (distance <= radius)."""
        if self._neighbor_lists is None:
            m = self.matrix
            lists = []
            for lo, dist in _distance_chunks(m, m):
                for r in range(dist.shape[0]):
                    row = dist[r]
                    hits = np.nonzero((row >= 1) & (row <= self.radius))[0]
                    lists.append(hits.astype(np.int64))
            self._neighbor_lists = tuple(lists)
        return self._neighbor_lists

    @property
    def degrees(self) -> np.ndarray:
        return np.array([len(nb) for nb in self.neighbor_lists])

    @property
    def coverage(self) -> float:
        """Fraction of points with at least one in-view neighbor."""
        return float(np.count_nonzero(self.degrees)) / len(self)


def _distance_chunks(a: np.ndarray, b: np.ndarray, budget: int = 1 << 23):
    """Yield (row offset, Hamming distance block) for rows of `a` against `b`."""
    step = max(1, budget // max(1, b.shape[0] * b.shape[1]))
    for lo in range(0, a.shape[0], step):
        block = a[lo : lo + step]
        dist = (block[:, None, :] != b[None, :, :]).sum(axis=2)
        yield lo, dist


def build_view(dataset: PerformanceDataset, subset=None, source="exact", radius=1) -> LandscapeView:
    """Build a minimized-fitness view from a dataset.

    `subset` restricts the view to the given rows (indices or
    configurations); by default every row is included. Maximizing
    objectives are negated so that lower fitness is always better.
    """
    if subset is None:
        rows = range(len(dataset))
    else:
        rows = [
            r if isinstance(r, (int, np.integer)) else dataset.row_index(r)
            for r in subset
        ]
    points = [dataset.configurations[r] for r in rows]
    perf = np.array([dataset.performances[r] for r in rows], dtype=float)
    fitness = perf if dataset.space.direction == "minimize" else -perf
    return LandscapeView(dataset.space, points, fitness, source=source, radius=radius)


def local_optima(view: LandscapeView) -> tuple[Configuration, ...]:
    """Points no in-view neighbor strictly improves on.

    Points without any neighbor are excluded; a view with no
    neighborhood structure at all has no defined optima.
    """
    if view.coverage == 0.0:
        raise SparseLandscapeError(
            "no point has an in-view neighbor; local structure is undefined"
        )
    f = view.fitness
    out = []
    for i, nbrs in enumerate(view.neighbor_lists):
        if len(nbrs) == 0:
            continue
        if np.all(f[nbrs] >= f[i]):
            out.append(view.points[i])
    return tuple(out)


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    dx = x - x.mean()
    dy = y - y.mean()
    sx = math.sqrt(float((dx * dx).sum()))
    sy = math.sqrt(float((dy * dy).sum()))
    if sx == 0.0 or sy == 0.0:
        raise ZeroDivisionError
    return float((dx * dy).sum()) / (sx * sy)


def _distance_to_set(matrix: np.ndarray, targets: np.ndarray) -> np.ndarray:
    best = np.full(matrix.shape[0], np.iinfo(np.int64).max)
    for lo, dist in _distance_chunks(matrix, targets):
        best[lo : lo + dist.shape[0]] = dist.min(axis=1)
    return best


def global_optima(view: LandscapeView) -> tuple[Configuration, ...]:
    """The view's minimum-fitness point set."""
    f = view.fitness
    hits = np.nonzero(f == f.min())[0]
    return tuple(view.points[i] for i in hits)


def fdc(view: LandscapeView, reference_optima=None) -> float:
    """Fitness distance correlation.

    Pearson correlation between each point's fitness and its Hamming
    distance to the nearest global optimum. By default the optima are the
    view's own minimizers; a caller holding ground truth (for example a
    planted optimum of a synthetic system) may pass `reference_optima`
    explicitly.
    """
    if len(view) < 2:
        raise UndefinedFeatureError("fdc", "needs at least 2 points")
    if reference_optima is None:
        targets = [view.points[i] for i in np.nonzero(view.fitness == view.fitness.min())[0]]
    else:
        targets = list(reference_optima)
        if not targets:
            raise ValueError("reference_optima must be non-empty")
        for c in targets:
            if len(c.values) != view.space.n_options:
                raise ValueError("reference optimum does not match the space")
    target_matrix = np.array([c.values for c in targets], dtype=np.int64)
    d = _distance_to_set(view.matrix, target_matrix).astype(float)
    try:
        return _pearson(view.fitness, d)
    except ZeroDivisionError:
        raise UndefinedFeatureError("fdc", "fitness or distance has zero variance")


def fbd(view: LandscapeView, sample) -> float:
    """Hamming distance from the sample's best point(s) to the global optima.

    `sample` is a point selection within the view (for example the points
    touched by random walks). Zero means the sample already contains a
    global optimum.
    """
    sample = list(sample)
    if not sample:
        raise ValueError("sample must be non-empty")
    rows = [view.row_index(c) for c in sample]
    f = view.fitness
    sample_fit = f[rows]
    best_rows = [rows[i] for i in np.nonzero(sample_fit == sample_fit.min())[0]]
    optima = np.array(
        [view.points[i].values for i in np.nonzero(f == f.min())[0]], dtype=np.int64
    )
    best_matrix = view.matrix[best_rows]
    return float(_distance_to_set(best_matrix, optima).min())


def skewness(view: LandscapeView) -> float:
    """Population skewness of the fitness values."""
    y = view.fitness
    d = y - y.mean()
    m2 = float((d * d).mean())
    if m2 == 0.0:
        raise UndefinedFeatureError("ske", "fitness has zero variance")
    m3 = float((d ** 3).mean())
    return m3 / m2 ** 1.5


def kurtosis(view: LandscapeView) -> float:
    """Population kurtosis (non-excess; the normal distribution scores 3)."""
    y = view.fitness
    d = y - y.mean()
    m2 = float((d * d).mean())
    if m2 == 0.0:
        raise UndefinedFeatureError("kur", "fitness has zero variance")
    m4 = float((d ** 4).mean())
    return m4 / (m2 * m2)


def plo(view: LandscapeView) -> float:
    """Ratio of local optima among points with at least one neighbor."""
    covered = int(np.count_nonzero(view.degrees))
    if covered == 0:
        raise SparseLandscapeError(
            "no point has an in-view neighbor; plo is undefined"
        )
    return len(local_optima(view)) / covered


@dataclass(frozen=True)
class WalkSequence:
    """One random walk: visited row indices and their fitness values."""

    indices: tuple[int, ...]
    fitness: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.fitness, dtype=float)
        f.setflags(write=False)
        object.__setattr__(self, "fitness", f)


def random_walks(view: LandscapeView, walk_length=DEFAULT_WALK_LENGTH, n_walks=DEFAULT_WALKS, seed=0):
    """Neighborhood random walks over the view.

    Each step moves to a uniformly chosen neighbor other than the point
    visited in the previous step. Dead ends restart from a fresh uniform
    point and the sequence keeps growing, so every walk has exactly
    `walk_length` entries. Walk `w` draws from its own generator seeded by
    `(seed, w)`, making results independent of evaluation order.
    """
    if walk_length < 2:
        raise ValueError("walk_length must be >= 2")
    if n_walks < 1:
        raise ValueError("n_walks must be >= 1")
    if view.coverage == 0.0:
        raise SparseLandscapeError("no point has an in-view neighbor; walks cannot move")
    adjacency = view.neighbor_lists
    n = len(view)
    walks = []
    for w in range(n_walks):
        rng = np.random.default_rng([int(seed), w])
        current = int(rng.integers(n))
        prev = -1
        indices = [current]
        while len(indices) < walk_length:
            cands = adjacency[current]
            if prev >= 0 and len(cands):
                cands = cands[cands != prev]
            if len(cands) == 0:
                current = int(rng.integers(n))
                prev = -1
                indices.append(current)
                continue
            nxt = int(cands[int(rng.integers(len(cands)))])
            prev, current = current, nxt
            indices.append(current)
        walks.append(WalkSequence(tuple(indices), view.fitness[indices]))
    return walks


def lag1_autocorrelation(values) -> float:
    """Lag-1 autocorrelation of a fitness sequence.

    Returns NaN when the sequence has zero variance (the coefficient is
    undefined there).
    """
    y = np.asarray(values, dtype=float)
    if y.size < 2:
        raise ValueError("a sequence needs at least 2 values")
    d = y - y.mean()
    denom = float((d * d).sum())
    if denom == 0.0:
        return math.nan
    return float((d[:-1] * d[1:]).sum()) / denom


def sequence_correlation_length(values) -> float:
    """Correlation length -1/ln|r1| of one fitness sequence.

    NaN when r1 is undefined, 0 when r1 is 0, +inf when |r1| is 1.
    """
    r1 = lag1_autocorrelation(values)
    if math.isnan(r1):
        return math.nan
    a = abs(r1)
    if a == 0.0:
        return 0.0
    if a >= 1.0:
        return math.inf
    return -1.0 / math.log(a)


def correlation_length(
    view: LandscapeView,
    walk_length=DEFAULT_WALK_LENGTH,
    n_walks=DEFAULT_WALKS,
    seed=0,
    walks=None,
) -> float:
    """Mean correlation length over random walks with a defined r1."""
    if walks is None:
        walks = random_walks(view, walk_length, n_walks, seed)
    per_walk = [sequence_correlation_length(w.fitness) for w in walks]
    defined = [c for c in per_walk if not math.isnan(c)]
    if not defined:
        raise UndefinedFeatureError("cl", "no walk had a defined autocorrelation")
    return float(np.mean(defined))


def symbolize(diffs, eps: float) -> np.ndarray:
    """Map fitness differences to symbols -1/0/1 with dead band `eps`."""
    diffs = np.asarray(diffs, dtype=float)
    return np.where(diffs < -eps, -1, np.where(diffs > eps, 1, 0))


def pair_entropy(symbol_sequences) -> float:
    """Entropy (base 6) of consecutive unequal symbol pairs.

    Probabilities are relative to all consecutive pairs; only the six
    ordered unequal pairs contribute terms, so the value lies in [0, 1].
    """
    counts: dict[tuple[int, int], int] = {}
    total = 0
    for seq in symbol_sequences:
        seq = np.asarray(seq)
        for p, q in zip(seq[:-1], seq[1:]):
            total += 1
            key = (int(p), int(q))
            counts[key] = counts.get(key, 0) + 1
    if total == 0:
        raise UndefinedFeatureError("mie", "no consecutive symbol pairs; walks too short")
    h = 0.0
    for (p, q), c in counts.items():
        if p == q:
            continue
        prob = c / total
        h -= prob * math.log(prob) / _LOG6
    return h


def mie_from_walks(walks) -> float:
    """Maximal information entropy over the candidate dead bands.

    Candidates are 0 plus the interior deciles of the pooled absolute
    fitness differences.
    """
    diff_seqs = [np.diff(w.fitness) for w in walks]
    pooled = np.abs(np.concatenate(diff_seqs)) if diff_seqs else np.array([])
    if pooled.size == 0:
        raise UndefinedFeatureError("mie", "walks produced no fitness differences")
    eps_set = {0.0}
    for q in np.arange(0.1, 1.0, 0.1):
        eps_set.add(float(np.quantile(pooled, q)))
    best = 0.0
    for eps in sorted(eps_set):
        h = pair_entropy([symbolize(d, eps) for d in diff_seqs])
        best = max(best, h)
    return best


def mie(
    view: LandscapeView,
    walk_length=DEFAULT_WALK_LENGTH,
    n_walks=DEFAULT_WALKS,
    seed=0,
    walks=None,
) -> float:
    if walks is None:
        walks = random_walks(view, walk_length, n_walks, seed)
    return mie_from_walks(walks)


def nbc(view: LandscapeView) -> float:
    """Mean ratio of nearest-better to nearest-neighbor distance.

    Points with no strictly better point in the view (the global optima)
    are excluded from the mean.
    """
    n = len(view)
    if n < 2:
        raise UndefinedFeatureError("nbc", "needs at least 2 points")
    f = view.fitness
    m = view.matrix
    big = np.iinfo(np.int64).max
    d_nn = np.full(n, big)
    d_nb = np.full(n, big)
    for lo, dist in _distance_chunks(m, m):
        rows = np.arange(lo, lo + dist.shape[0])
        dist[np.arange(dist.shape[0]), rows] = big
        d_nn[rows] = dist.min(axis=1)
        better = f[None, :] < f[rows, None]
        masked = np.where(better, dist, big)
        d_nb[rows] = masked.min(axis=1)
    has_better = d_nb < big
    if not np.any(has_better):
        raise UndefinedFeatureError("nbc", "no point has a strictly better point")
    ratios = d_nb[has_better] / d_nn[has_better]
    return float(ratios.mean())


@dataclass(frozen=True)
class FeatureProfile:
    """The eight landscape features of one view, with typed absences.

    Features that are undefined on the view are None here, with the
    reason recorded in `absent`.
    """

    fdc: float | None
    fbd: float | None
    ske: float | None
    kur: float | None
    plo: float | None
    cl: float | None
    mie: float | None
    nbc: float | None
    coverage: float
    n_points: int
    source: str
    walk_length: int
    n_walks: int
    seed: int
    absent: dict = field(default_factory=dict)

    def value(self, feature: str) -> float:
        if feature not in ALL_FEATURES:
            raise KeyError(f"unknown feature {feature!r}")
        v = getattr(self, feature)
        if v is None:
            raise UndefinedFeatureError(feature, self.absent.get(feature, "absent"))
        return v

    def has(self, feature: str) -> bool:
        return getattr(self, feature) is not None

    def to_record(self) -> dict:
        features = {}
        for name in ALL_FEATURES:
            v = getattr(self, name)
            if v is None:
                features[name] = {"absent": self.absent.get(name, "absent")}
            else:
                features[name] = v
        return {
            "features": features,
            "coverage": self.coverage,
            "n_points": self.n_points,
            "source": self.source,
            "walk_length": self.walk_length,
            "n_walks": self.n_walks,
            "seed": self.seed,
        }


def feature_profile(
    view: LandscapeView,
    walk_length=DEFAULT_WALK_LENGTH,
    n_walks=DEFAULT_WALKS,
    seed=0,
) -> FeatureProfile:
    """Compute all eight features on one view with shared random walks.

    The walk-based features (cl, mie) and the walk-sampled fbd reuse the
    same walk set, so a profile is reproducible from (view, walk
    parameters, seed) alone. Undefined features are recorded as absent
    with a reason; only a view with no neighborhood at all fails outright.
    """
    if view.coverage == 0.0:
        raise SparseLandscapeError(
            "no point has an in-view neighbor; profile is undefined"
        )
    walks = random_walks(view, walk_length, n_walks, seed)
    walk_points = sorted({i for w in walks for i in w.indices})
    sample = [view.points[i] for i in walk_points]

    values: dict[str, float | None] = {}
    absent: dict[str, str] = {}

    def compute(name, thunk):
        try:
            values[name] = float(thunk())
        except (UndefinedFeatureError, SparseLandscapeError) as exc:
            values[name] = None
            absent[name] = getattr(exc, "reason", str(exc))

    compute("fdc", lambda: fdc(view))
    compute("fbd", lambda: fbd(view, sample))
    compute("ske", lambda: skewness(view))
    compute("kur", lambda: kurtosis(view))
    compute("plo", lambda: plo(view))
    compute("cl", lambda: correlation_length(view, walks=walks))
    compute("mie", lambda: mie(view, walks=walks))
    compute("nbc", lambda: nbc(view))

    if all(v is None for v in values.values()):
        raise UndefinedFeatureError("profile", "all eight features are undefined")
    return FeatureProfile(
        coverage=view.coverage,
        n_points=len(view),
        source=view.source,
        walk_length=walk_length,
        n_walks=n_walks,
        seed=seed,
        absent=absent,
        **values,
    )


def compute_feature(
    view: LandscapeView,
    feature: str,
    walk_length=DEFAULT_WALK_LENGTH,
    n_walks=DEFAULT_WALKS,
    seed=0,
    walks=None,
) -> float:
    """Compute a single named feature (walk-based ones accept shared walks)."""
    if feature in ("cl", "mie", "fbd") and walks is None:
        walks = random_walks(view, walk_length, n_walks, seed)
    if feature == "fdc":
        return fdc(view)
    if feature == "fbd":
        points = sorted({i for w in walks for i in w.indices})
        return fbd(view, [view.points[i] for i in points])
    if feature == "ske":
        return skewness(view)
    if feature == "kur":
        return kurtosis(view)
    if feature == "plo":
        return plo(view)
    if feature == "cl":
        return correlation_length(view, walks=walks)
    if feature == "mie":
        return mie(view, walks=walks)
    if feature == "nbc":
        return nbc(view)
    raise KeyError(f"unknown feature {feature!r}")


def orient_local(feature: str, value: float) -> float:
    """Orient a local feature so that lower always means easier terrain.

    Correlation length grows with smoothness, so it is negated; the other
    local features already point downward.
    """
    if feature not in LOCAL_FEATURES:
        raise KeyError(f"{feature!r} is not a local feature")
    if feature == "cl":
        return -value
    return value
