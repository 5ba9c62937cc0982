"""Configuration spaces, measured datasets, and Hamming neighborhoods.

A configuration space is an ordered list of options, each with a finite
ordered value domain. Configurations store value *indices* into those
domains, which makes Hamming distance and neighborhood enumeration
independent of the raw value types.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DataFormatError

OPTION_KINDS = ("binary", "numeric", "enumerated")

DIRECTIONS = ("minimize", "maximize")


@dataclass(frozen=True)
class OptionSchema:
    """One configurable option: a name, a kind, and its ordered domain."""

    name: str
    kind: str
    values: tuple
    category: str | None = None

    def __post_init__(self):
        if not self.name:
            raise ValueError("option name must be non-empty")
        if self.kind not in OPTION_KINDS:
            raise ValueError(f"unknown option kind {self.kind!r}")
        values = tuple(self.values)
        object.__setattr__(self, "values", values)
        if not values:
            raise ValueError(f"option {self.name!r} has an empty domain")
        if len(set(map(str, values))) != len(values):
            raise ValueError(f"option {self.name!r} has duplicate values")
        if self.kind == "binary" and len(values) != 2:
            raise ValueError(f"binary option {self.name!r} must have exactly 2 values")
        if self.kind == "numeric":
            try:
                levels = [float(v) for v in values]
            except (TypeError, ValueError):
                raise ValueError(f"numeric option {self.name!r} has non-numeric values")
            if any(b <= a for a, b in zip(levels, levels[1:])):
                raise ValueError(f"numeric option {self.name!r} values must be strictly ascending")

    @property
    def cardinality(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Configuration:
    """A point in a configuration space, stored as value indices."""

    values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))

    def __len__(self):
        return len(self.values)


class ConfigurationSpace:
    """An ordered option list plus the objective direction."""

    def __init__(self, options, direction="minimize"):
        options = tuple(options)
        if not options:
            raise ValueError("a configuration space needs at least one option")
        names = [o.name for o in options]
        if len(set(names)) != len(names):
            raise ValueError("option names must be unique")
        if direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
        self.options = options
        self.direction = direction
        self._index = {name: i for i, name in enumerate(names)}

    @property
    def n_options(self) -> int:
        return len(self.options)

    @property
    def option_names(self) -> tuple[str, ...]:
        return tuple(o.name for o in self.options)

    def option_index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown option {name!r}")

    def configuration(self, indices) -> Configuration:
        """Build a configuration from value indices, validating ranges."""
        indices = tuple(int(v) for v in indices)
        if len(indices) != self.n_options:
            raise ValueError(
                f"expected {self.n_options} values, got {len(indices)}"
            )
        for opt, idx in zip(self.options, indices):
            if not 0 <= idx < opt.cardinality:
                raise ValueError(
                    f"value index {idx} out of range for option {opt.name!r}"
                )
        return Configuration(indices)

    def from_raw(self, raw_values) -> Configuration:
        """Build a configuration from raw option values."""
        raw_values = tuple(raw_values)
        if len(raw_values) != self.n_options:
            raise ValueError(
                f"expected {self.n_options} values, got {len(raw_values)}"
            )
        return Configuration(
            tuple(
                _match_value(opt, raw) for opt, raw in zip(self.options, raw_values)
            )
        )

    def raw_values(self, config: Configuration) -> tuple:
        return tuple(
            opt.values[idx] for opt, idx in zip(self.options, config.values)
        )

    def __eq__(self, other):
        return (
            isinstance(other, ConfigurationSpace)
            and self.options == other.options
            and self.direction == other.direction
        )

    def __repr__(self):
        return (
            f"ConfigurationSpace({self.n_options} options, {self.direction})"
        )


def _match_value(opt: OptionSchema, raw) -> int:
    if opt.kind == "numeric":
        try:
            level = float(raw)
        except (TypeError, ValueError):
            raise ValueError(
                f"option {opt.name!r}: cannot parse {raw!r} as a number"
            )
        for i, v in enumerate(opt.values):
            if float(v) == level:
                return i
        raise ValueError(f"option {opt.name!r}: value {raw!r} not in declared domain")
    text = str(raw)
    for i, v in enumerate(opt.values):
        if str(v) == text:
            return i
    raise ValueError(f"option {opt.name!r}: value {raw!r} not in declared domain")


class PerformanceDataset:
    """Measured (configuration, performance) rows over one space.

    Rows are unique by configuration and immutable after construction.
    Performance values are stored exactly as measured; orientation to a
    minimized fitness happens when a landscape view is built.
    """

    def __init__(self, space, rows, performance_name="performance", provenance="measured"):
        self.space = space
        configs = []
        perfs = []
        for config, perf in rows:
            if len(config.values) != space.n_options:
                raise ValueError("configuration length does not match the space")
            perf = float(perf)
            if not math.isfinite(perf):
                raise ValueError(f"non-finite performance value {perf!r}")
            configs.append(config)
            perfs.append(perf)
        if not configs:
            raise ValueError("a dataset needs at least one row")
        self.configurations = tuple(configs)
        self.performances = np.asarray(perfs, dtype=float)
        self.performances.setflags(write=False)
        self.performance_name = performance_name
        self.provenance = provenance
        self._row_of = {}
        for i, c in enumerate(self.configurations):
            if c in self._row_of:
                raise ValueError(f"duplicate configuration at rows {self._row_of[c]} and {i}")
            self._row_of[c] = i
        self._matrix = None

    def __len__(self):
        return len(self.configurations)

    def __iter__(self):
        return iter(zip(self.configurations, self.performances))

    def __contains__(self, config):
        return config in self._row_of

    def row_index(self, config: Configuration) -> int:
        try:
            return self._row_of[config]
        except KeyError:
            raise KeyError(f"configuration {config.values} is not in the dataset")

    def performance_of(self, config: Configuration) -> float:
        return float(self.performances[self.row_index(config)])

    @property
    def matrix(self) -> np.ndarray:
        """Row-major matrix of value indices, one row per configuration."""
        if self._matrix is None:
            m = np.array([c.values for c in self.configurations], dtype=np.int64)
            m.setflags(write=False)
            self._matrix = m
        return self._matrix

    def subset(self, row_indices, provenance=None) -> "PerformanceDataset":
        rows = [
            (self.configurations[i], float(self.performances[i]))
            for i in row_indices
        ]
        return PerformanceDataset(
            self.space,
            rows,
            performance_name=self.performance_name,
            provenance=self.provenance if provenance is None else provenance,
        )


def hamming(a: Configuration, b: Configuration) -> int:
    """Number of options on which two configurations differ."""
    if len(a.values) != len(b.values):
        raise ValueError("configurations come from different spaces")
    return sum(x != y for x, y in zip(a.values, b.values))


def neighbors(dataset: PerformanceDataset, config: Configuration, radius: int = 1):
    """In-dataset points within Hamming distance `radius` of `config`.

    The point itself is excluded. `config` must be a dataset row.
    """
    if radius < 1:
        raise ValueError("radius must be >= 1")
    row = dataset.row_index(config)
    distances = np.count_nonzero(dataset.matrix != dataset.matrix[row], axis=1)
    hits = np.nonzero((distances >= 1) & (distances <= radius))[0]
    return tuple(dataset.configurations[i] for i in hits)


def split_train_test(dataset: PerformanceDataset, train_size="binary-5n", seed: int = 0):
    """Disjoint train/test split by uniform permutation of the rows.

    `train_size` is either an absolute row count or the rule name
    "binary-5n" (five rows per option).
    """
    if train_size == "binary-5n":
        size = 5 * dataset.space.n_options
    else:
        size = int(train_size)
    if not 1 <= size < len(dataset):
        raise ValueError(
            f"train size {size} must be in [1, {len(dataset) - 1}] for {len(dataset)} rows"
        )
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(dataset))
    train = dataset.subset(sorted(order[:size]))
    test = dataset.subset(sorted(order[size:]))
    return train, test


_META_FIELDS = {"options", "performance_column", "direction"}
_OPTION_FIELDS = {"name", "kind", "values", "category"}


def load_metadata(meta_path):
    """Parse a metadata document into a space plus the performance column name."""
    try:
        with open(meta_path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataFormatError(f"cannot read metadata: {exc}", path=meta_path)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"metadata is not valid JSON: {exc}", path=meta_path)
    if not isinstance(doc, dict):
        raise DataFormatError("metadata must be a JSON object", path=meta_path)
    unknown = set(doc) - _META_FIELDS
    if unknown:
        raise DataFormatError(
            f"unknown metadata fields: {sorted(unknown)}", path=meta_path
        )
    missing = _META_FIELDS - set(doc)
    if missing:
        raise DataFormatError(
            f"missing metadata fields: {sorted(missing)}", path=meta_path
        )
    if doc["direction"] not in DIRECTIONS:
        raise DataFormatError(
            f"direction must be one of {list(DIRECTIONS)}, got {doc['direction']!r}",
            path=meta_path,
        )
    if not isinstance(doc["performance_column"], str) or not doc["performance_column"]:
        raise DataFormatError("performance_column must be a non-empty string", path=meta_path)
    if not isinstance(doc["options"], list) or not doc["options"]:
        raise DataFormatError("options must be a non-empty list", path=meta_path)
    options = []
    for i, entry in enumerate(doc["options"]):
        if not isinstance(entry, dict):
            raise DataFormatError(f"options[{i}] must be an object", path=meta_path)
        unknown = set(entry) - _OPTION_FIELDS
        if unknown:
            raise DataFormatError(
                f"options[{i}] has unknown fields: {sorted(unknown)}", path=meta_path
            )
        if "name" not in entry or "kind" not in entry:
            raise DataFormatError(
                f"options[{i}] needs at least 'name' and 'kind'", path=meta_path
            )
        values = entry.get("values")
        if values is None:
            if entry["kind"] != "binary":
                raise DataFormatError(
                    f"options[{i}] ({entry['name']!r}): non-binary options must declare values",
                    path=meta_path,
                )
            values = [0, 1]
        try:
            options.append(
                OptionSchema(
                    name=entry["name"],
                    kind=entry["kind"],
                    values=tuple(values),
                    category=entry.get("category"),
                )
            )
        except ValueError as exc:
            raise DataFormatError(str(exc), path=meta_path)
    try:
        space = ConfigurationSpace(options, direction=doc["direction"])
    except ValueError as exc:
        raise DataFormatError(str(exc), path=meta_path)
    return space, doc["performance_column"]


def load_dataset(data_path, meta_path) -> PerformanceDataset:
    """Load a measured dataset from a CSV file plus its metadata document.

    The CSV must carry exactly one column per option plus the performance
    column; duplicate configurations collapse to their median performance
    with a warning.
    """
    space, perf_column = load_metadata(meta_path)
    try:
        fh = open(data_path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataFormatError(f"cannot read dataset: {exc}", path=data_path)
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError("dataset file is empty", path=data_path)
        expected = set(space.option_names) | {perf_column}
        seen = set()
        for j, col in enumerate(header):
            if col not in expected:
                raise DataFormatError(
                    f"unexpected column {col!r}", path=data_path, column=j
                )
            if col in seen:
                raise DataFormatError(
                    f"duplicate column {col!r}", path=data_path, column=j
                )
            seen.add(col)
        missing = expected - seen
        if missing:
            raise DataFormatError(
                f"missing columns: {sorted(missing)}", path=data_path
            )
        col_of = {name: header.index(name) for name in header}
        option_cols = [col_of[name] for name in space.option_names]
        perf_col = col_of[perf_column]
        groups: dict[Configuration, list[float]] = {}
        order: list[Configuration] = []
        for rownum, cells in enumerate(reader, start=2):
            if len(cells) != len(header):
                raise DataFormatError(
                    f"expected {len(header)} cells, got {len(cells)}",
                    path=data_path,
                    row=rownum,
                )
            try:
                config = space.from_raw([cells[j] for j in option_cols])
            except ValueError as exc:
                raise DataFormatError(str(exc), path=data_path, row=rownum)
            try:
                perf = float(cells[perf_col])
            except ValueError:
                raise DataFormatError(
                    f"cannot parse performance {cells[perf_col]!r}",
                    path=data_path,
                    row=rownum,
                    column=perf_col,
                )
            if not math.isfinite(perf):
                raise DataFormatError(
                    "performance must be finite", path=data_path, row=rownum
                )
            if config not in groups:
                groups[config] = []
                order.append(config)
            groups[config].append(perf)
    if not order:
        raise DataFormatError("dataset has a header but no rows", path=data_path)
    n_dupes = sum(1 for v in groups.values() if len(v) > 1)
    if n_dupes:
        warnings.warn(
            f"{data_path}: {n_dupes} duplicate configuration group(s) collapsed to median performance"
        )
    rows = [(c, float(np.median(groups[c]))) for c in order]
    return PerformanceDataset(
        space, rows, performance_name=perf_column, provenance=str(data_path)
    )


def space_to_doc(space: ConfigurationSpace) -> dict:
    """JSON-safe description of a space (used by model serialization)."""
    options = []
    for opt in space.options:
        entry = {"name": opt.name, "kind": opt.kind, "values": list(opt.values)}
        if opt.category is not None:
            entry["category"] = opt.category
        options.append(entry)
    return {"options": options, "direction": space.direction}


def space_from_doc(doc: dict) -> ConfigurationSpace:
    options = [
        OptionSchema(
            name=entry["name"],
            kind=entry["kind"],
            values=tuple(entry["values"]),
            category=entry.get("category"),
        )
        for entry in doc["options"]
    ]
    return ConfigurationSpace(options, direction=doc["direction"])


def write_metadata(space: ConfigurationSpace, performance_name: str, meta_path):
    doc = {
        "options": [],
        "performance_column": performance_name,
        "direction": space.direction,
    }
    for opt in space.options:
        entry = {"name": opt.name, "kind": opt.kind, "values": list(opt.values)}
        if opt.category is not None:
            entry["category"] = opt.category
        doc["options"].append(entry)
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_dataset(dataset: PerformanceDataset, data_path, meta_path=None):
    """Write a dataset back to CSV (and optionally its metadata document)."""
    space = dataset.space
    with open(data_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(space.option_names) + [dataset.performance_name])
        for config, perf in dataset:
            writer.writerow(
                [_format_cell(v) for v in space.raw_values(config)]
                + [repr(float(perf))]
            )
    if meta_path is not None:
        write_metadata(space, dataset.performance_name, meta_path)


def _format_cell(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)
