"""Plot level sets of the distance to a polygon for several norms.

    python3 scripts/plot_levelsets.py --out levelsets.png

Needs matplotlib (``pip install .[plot]``). The points come from the same
ray sampler as ``minkowski levelset``.
"""
import argparse

import numpy as np

from minkowski import EllipsoidalNorm, EuclideanNorm, Polytope, WeightedPNorm
from minkowski.cli import levelset_rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="levelsets.png")
    ap.add_argument("--levels", default="0.25,0.5,1,2")
    ap.add_argument("--rays", type=int, default=360)
    args = ap.parse_args()

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    K = Polytope([[0, 0], [2, 0], [2.5, 1], [0.5, 1.5]])
    norms = [("euclidean", EuclideanNorm(2)), ("p = 1.5", WeightedPNorm(1.5, [1, 1])),
             ("p = 4", WeightedPNorm(4, [1, 1])), ("diag(1, 4)", EllipsoidalNorm(np.diag([1.0, 4.0])))]
    levels = [float(s) for s in args.levels.split(",")]

    fig, axes = plt.subplots(1, len(norms), figsize=(4 * len(norms), 4))
    rel = K.extreme_points - K.interior_point()
    hull = K.extreme_points[np.argsort(np.arctan2(rel[:, 1], rel[:, 0]))]
    for ax, (name, N) in zip(axes, norms):
        rows = np.array(levelset_rows(N, K, levels, rays=args.rays))
        for lv in levels:
            pts = rows[rows[:, 0] == lv, 2:]
            ax.plot(*np.vstack([pts, pts[:1]]).T, lw=1)
        ax.fill(*hull.T, color="0.8")
        ax.set_title(name)
        ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(args.out, dpi=120)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
