"""Ellipse CSVs for every (ensemble, policy) pair, plus an optional figure.

    python scripts/povm_ellipses.py --samples 50 --out results/povm [--plot]

The figure needs matplotlib (``pip install .[plot]``).
"""
import argparse
import math
from pathlib import Path

from adaptive_homodyne.ensemble import builtin
from adaptive_homodyne.policy import PolicySpec
from adaptive_homodyne.povm import sample_povm, write_ellipses_csv
from adaptive_homodyne.trajectory import SimConfig

ENSEMBLES = ("8psk", "16qam", "star")
POLICIES = ("heterodyne", "wiseman", "lmmi")


def plot(results, out: Path):
    import matplotlib.pyplot as plt
    from matplotlib.patches import Ellipse

    fig, axes = plt.subplots(len(ENSEMBLES), len(POLICIES) + 1, figsize=(12, 9))
    for row, name in enumerate(ENSEMBLES):
        ens = builtin(name)
        panels = [("ensemble", [])] + [(k, results[name, k]) for k in POLICIES]
        for col, (title, ellipses) in enumerate(panels):
            ax = axes[row, col]
            for a in ens.amplitudes:
                ax.add_patch(Ellipse((a.real, a.imag), 1.0, 1.0, fill=False, color="0.6"))
            for el in ellipses:
                ax.add_patch(Ellipse(el.center, 2 * el.semi_major, 2 * el.semi_minor,
                                     angle=math.degrees(el.orientation), fill=False, color="C0", lw=0.6))
            ax.set_xlim(-4, 4)
            ax.set_ylim(-4, 4)
            ax.set_aspect("equal")
            ax.set_title(f"{name}: {title}", fontsize=9)
    fig.tight_layout()
    fig.savefig(out / "povm_ellipses.png", dpi=150)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=50)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/povm"))
    ap.add_argument("--plot", action="store_true")
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    cfg = SimConfig(seed=args.seed)
    results = {}
    for name in ENSEMBLES:
        for kind in POLICIES:
            ellipses = sample_povm(builtin(name), PolicySpec(kind), cfg, args.samples)
            results[name, kind] = ellipses
            write_ellipses_csv(ellipses, args.out / f"povm_{name}_{kind}.csv")
            print(f"{name:6s} {kind:10s} max |xi| = {max(abs(e.xi) for e in ellipses):.3f}")
    if args.plot:
        plot(results, args.out)


if __name__ == "__main__":
    main()
