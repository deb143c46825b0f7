"""Generate a synthetic population and print the cross-validated leaderboard.

    python3 scripts/leaderboard.py --seed 7 --k 5
"""
import argparse
import time

from impairdetect.dataset import GeneratorConfig, generate_synthetic
from impairdetect.evaluation import leaderboard_text, run_leaderboard


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--overlap", type=float, default=GeneratorConfig.overlap_fraction)
    p.add_argument("--jobs", type=int, default=1)
    args = p.parse_args()

    ds = generate_synthetic(GeneratorConfig(seed=args.seed, overlap_fraction=args.overlap))
    t0 = time.perf_counter()
    reports = run_leaderboard(ds, k=args.k, seed=args.seed, jobs=args.jobs)
    print(leaderboard_text(reports), end="")
    best = next(r for r in reports if r.winner)
    tpr = best.tpr_fnr
    print(f"\nwinner {best.classifier}: recall normal {tpr[0][0]:.3f}, induced {tpr[1][0]:.3f}")
    print(f"{len(reports)} presets in {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
