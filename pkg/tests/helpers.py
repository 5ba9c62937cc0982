"""Shared builders for test landscapes and datasets."""

import itertools

import numpy as np

from tunescape import ConfigurationSpace, OptionSchema, PerformanceDataset


def binary_space(n, direction="minimize", prefix="x"):
    options = [
        OptionSchema(name=f"{prefix}{i + 1:02d}", kind="binary", values=(0, 1))
        for i in range(n)
    ]
    return ConfigurationSpace(options, direction=direction)


def full_grid(n):
    return list(itertools.product((0, 1), repeat=n))


def make_dataset(space, rows, perf, **kwargs):
    return PerformanceDataset(
        space,
        [(space.configuration(v), float(p)) for v, p in zip(rows, perf)],
        **kwargs,
    )


def full_binary_dataset(n, perf, direction="minimize"):
    return make_dataset(binary_space(n, direction), full_grid(n), perf)


def random_binary_landscape(rng, n_options=None, direction="minimize", tie_prob=0.3):
    """A random in-dataset landscape: a row subset of the grid, random fitness."""
    n = int(n_options if n_options is not None else rng.integers(5, 11))
    total = 2**n
    n_rows = int(rng.integers(min(12, total), total + 1))
    picked = sorted(int(r) for r in rng.choice(total, size=n_rows, replace=False))
    grid = full_grid(n)
    if rng.random() < tie_prob:
        perf = rng.integers(0, 5, size=n_rows).astype(float)
    else:
        perf = rng.normal(size=n_rows)
    space = binary_space(n, direction)
    return make_dataset(space, [grid[r] for r in picked], perf)
