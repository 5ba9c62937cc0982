"""Probe: per-family planted recovery for the harder features."""
import itertools
import sys
import time
import numpy as np

sys.path.insert(0, "tests")
from helpers import binary_space, make_dataset
from tunescape.influence import build_matrices, influential_options


def grid_s(n):
    grid = list(itertools.product((0, 1), repeat=n))
    x = np.array(grid, float)
    return grid, x - 0.5


def plant(n, seed, family):
    """f = w*s_heavy + residual; the heavy share is exactly 80%."""
    rng = np.random.default_rng(seed)
    heavy = int(rng.integers(n))
    grid, s = grid_s(n)
    others = [i for i in range(n) if i != heavy]
    if family == "skew":
        b = rng.normal(size=len(others))
        g = (s[:, others] @ b) ** 2
    elif family == "noise":
        g = rng.normal(size=len(grid))
    elif family == "rugged":
        pairs = list(itertools.combinations(others, 2))
        c = rng.normal(size=len(pairs))
        g = np.zeros(len(grid))
        for (a1, a2), cc in zip(pairs, c):
            g += cc * s[:, a1] * s[:, a2]
    else:
        raise KeyError(family)
    g = g - g.mean()
    g = g / g.std()
    w = 2.0 * np.sqrt(0.8 / 0.2)
    f = w * s[:, heavy] + g
    space = binary_space(n)
    return make_dataset(space, grid, f), space.option_names[heavy]


def sweep(family, feats, n, split, wl, nw, models, params=None, seeds=10, invert=False):
    hits = {f: 0 for f in feats}
    wrong = {f: [] for f in feats}
    for seed in range(seeds):
        ds, heavy = plant(n, seed, family)
        mats = build_matrices(ds, models, features=feats, split=split, seed=seed,
                              walk_length=wl, n_walks=nw, model_params=params)
        for f in feats:
            res = influential_options(mats[f], seed=seed, invert=invert)
            if res.options == (heavy,):
                hits[f] += 1
            else:
                wrong[f].append((seed, heavy, res.options))
    tag = f"{family} n={n} split={split} w={nw}x{wl} m={models} inv={invert}"
    print(tag, {f: hits[f] for f in feats})
    for f, fl in wrong.items():
        if 0 < len(fl) <= 5:
            print("   ", f, fl[:3])
    return hits


if __name__ == "__main__":
    t0 = time.time()
    sweep("noise", ["plo", "nbc", "cl", "mie"], n=10, split="binary-5n",
          wl=50, nw=30, models=["knn", "cart"])
    print(f"{time.time()-t0:.1f}s")
    t0 = time.time()
    sweep("noise", ["plo", "nbc", "cl", "mie"], n=10, split="binary-5n",
          wl=20, nw=10, models=["knn", "cart"])
    print(f"{time.time()-t0:.1f}s")
