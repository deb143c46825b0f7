"""Monte-Carlo check of the bracelet pulse estimator across rates and noise levels.

    python3 scripts/pulse_sweep.py --rates 50 72 110 150 --noise 0.1 0.3 --seeds 100
"""
import argparse

import numpy as np

from impairdetect.bracelet import ScenarioConfig, cancel_noise, estimate_pulse_rate, generate_pulse_signal


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--rates", type=float, nargs="+", default=[50, 72, 110, 150])
    p.add_argument("--noise", type=float, nargs="+", default=[0.1])
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--duration", type=float, default=60.0)
    p.add_argument("--tolerance", type=float, default=2.0, help="bpm")
    args = p.parse_args()

    print(f"{'bpm':>6} {'noise':>6} {'within':>8} {'unmeas.':>8} {'median err':>11}")
    for noise in args.noise:
        for bpm in args.rates:
            errs, missing = [], 0
            for seed in range(args.seeds):
                cfg = ScenarioConfig(true_bpm=bpm, duration_s=args.duration, noise_rms=noise, seed=seed)
                for est in estimate_pulse_rate(cancel_noise(generate_pulse_signal(cfg))):
                    if est is None:
                        missing += 1
                    else:
                        errs.append(abs(est - bpm))
            total = len(errs) + missing
            within = sum(e <= args.tolerance for e in errs) / total
            med = float(np.median(errs)) if errs else float("nan")
            print(f"{bpm:6.0f} {noise:6.2f} {100 * within:7.1f}% {missing:8d} {med:11.3f}")


if __name__ == "__main__":
    main()
