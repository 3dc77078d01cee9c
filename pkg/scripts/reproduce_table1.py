"""Regenerate the policy-comparison table for 8PSK, 16QAM and STAR.

    python scripts/reproduce_table1.py --n 10000 --out results/table1
"""
import argparse
from pathlib import Path

from adaptive_homodyne.cli import format_table, write_json
from adaptive_homodyne.ensemble import builtin
from adaptive_homodyne.montecarlo import compare_policies
from adaptive_homodyne.trajectory import SimConfig


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/table1"))
    args = ap.parse_args()

    cfg = SimConfig(seed=args.seed)
    tables = [
        compare_policies(builtin(name), cfg, args.n, workers=args.workers, crn=True)
        for name in ("8psk", "16qam", "star")
    ]
    args.out.mkdir(parents=True, exist_ok=True)
    text = format_table(tables)
    (args.out / "table1.txt").write_text(text)
    write_json(args.out / "table1.json", {"script": "reproduce_table1", "n": args.n, "seed": args.seed,
                                          "crn": True, "sim": cfg.to_dict()},
               [t.to_dict() for t in tables])
    print(text, end="")


if __name__ == "__main__":
    main()
