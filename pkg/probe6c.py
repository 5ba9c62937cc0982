"""Probe: true-landscape (no model) feature separation per residual family."""
import itertools
import sys
import numpy as np

sys.path.insert(0, "tests")
from helpers import binary_space, make_dataset
from tunescape.influence import ablate_option
from tunescape.landscape import build_view, compute_feature, random_walks


def grid_s(n):
    grid = list(itertools.product((0, 1), repeat=n))
    return grid, np.array(grid, float) - 0.5


def residual(family, rng, s, others):
    if family == "noise":
        return rng.normal(size=len(s))
    if family == "skew":
        b = rng.normal(size=len(others))
        return (s[:, others] @ b) ** 2
    if family == "bowlmin":
        a = rng.normal(size=len(others))
        z = s[:, others] @ a
        t = rng.normal() * 0.5 * z.std()
        return (z - t) ** 2
    if family == "rugged":
        pairs = list(itertools.combinations(others, 2))
        c = rng.normal(size=len(pairs))
        g = np.zeros(len(s))
        for (a1, a2), cc in zip(pairs, c):
            g += cc * s[:, a1] * s[:, a2]
        return g
    if family == "checker":
        return np.where(s[:, others].sum(axis=1) % 2 == 0, 1.0, -1.0) + 0.01 * rng.normal(size=len(s))
    raise KeyError(family)


def plant(n, seed, family):
    rng = np.random.default_rng(seed)
    heavy = int(rng.integers(n))
    grid, s = grid_s(n)
    others = [i for i in range(n) if i != heavy]
    g = residual(family, rng, s, others)
    g = (g - g.mean()) / g.std()
    w = 2.0 * np.sqrt(0.8 / 0.2)
    f = w * s[:, heavy] + g
    space = binary_space(n)
    return make_dataset(space, grid, f), space.option_names[heavy]


def true_row(family, feats, n=9, seeds=5, wl=50, nw=30):
    """Mean feature value per column class (heavy vs light vs all), true views."""
    agg = {f: {"heavy": [], "light": [], "all": []} for f in feats}
    for seed in range(seeds):
        ds, heavy = plant(n, seed, family)
        for col in list(ds.space.option_names) + ["all"]:
            d = ds if col == "all" else ablate_option(ds, col)
            view = build_view(d)
            walks = random_walks(view, wl, nw, seed)
            cls = "all" if col == "all" else ("heavy" if col == heavy else "light")
            for f in feats:
                agg[f][cls].append(compute_feature(view, f, walks=walks))
    for f in feats:
        h = np.mean(agg[f]["heavy"])
        l, ls = np.mean(agg[f]["light"]), np.std(agg[f]["light"])
        a = np.mean(agg[f]["all"])
        gap = abs(h - l) / (ls + 1e-12)
        print(f"  {family:8s} {f}: heavy={h:8.4f} light={l:8.4f}±{ls:.4f} all={a:8.4f} gap={gap:5.1f}σ")


if __name__ == "__main__":
    feats = ["plo", "nbc", "mie", "fbd"]
    for family in ("noise", "skew", "bowlmin", "rugged", "checker"):
        true_row(family, feats)
