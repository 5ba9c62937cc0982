"""Probe: planted 80%-variance option recovery per feature."""
import itertools
import sys
import numpy as np

sys.path.insert(0, "tests")
from helpers import binary_space, make_dataset
from tunescape.influence import build_matrices, influential_options

N = 9
MODELS = ["knn", "cart"]


def planted(n, seed, mix=0.0):
    rng = np.random.default_rng(seed)
    heavy = int(rng.integers(n))
    grid = list(itertools.product((0, 1), repeat=n))
    x = np.array(grid, float)
    s = x - 0.5
    others = [i for i in range(n) if i != heavy]
    b = rng.normal(size=len(others))
    z = s[:, others] @ b
    g = (1.0 - mix) * z ** 2
    if mix:
        pairs = list(itertools.combinations(range(len(others)), 2))
        c = rng.normal(size=len(pairs))
        r = np.zeros(len(grid))
        for (a1, a2), cc in zip(pairs, c):
            r += cc * s[:, others[a1]] * s[:, others[a2]]
        g = g + mix * r
    g = g - g.mean()
    v = g.var()
    if v > 0:
        g = g * np.sqrt(0.2 / v)
    w = 2.0 * np.sqrt(0.8)
    f = w * s[:, heavy] + g
    share = (w ** 2 / 4) / f.var()
    space = binary_space(n)
    ds = make_dataset(space, grid, f)
    return ds, space.option_names[heavy], share


def sweep(mix, split, wl, nw, seeds=30):
    hits = {f: 0 for f in ("fdc", "fbd", "ske", "kur", "plo", "cl", "mie", "nbc")}
    fails = {f: [] for f in hits}
    for seed in range(seeds):
        ds, heavy_name, share = planted(N, seed, mix=mix)
        assert abs(share - 0.8) < 1e-9, share
        mats = build_matrices(ds, MODELS, split=split, seed=seed,
                              walk_length=wl, n_walks=nw)
        for fname, mat in mats.items():
            res = influential_options(mat, seed=seed)
            if res.options == (heavy_name,):
                hits[fname] += 1
            else:
                fails[fname].append((seed, heavy_name, res.options))
    print(f"mix={mix} split={split} walks={nw}x{wl}: ", {f: hits[f] for f in hits})
    for f, fl in fails.items():
        if fl and len(fl) <= 6:
            print("  ", f, fl[:4])


if __name__ == "__main__":
    import time
    t0 = time.time()
    sweep(mix=0.0, split=160, wl=20, nw=10, seeds=10)
    print(f"{time.time()-t0:.1f}s")
