"""Median radial distance to the unit circle for Kac polynomials, comparing a
light-tailed law with the sub-log-moment law LogParetoLog across degrees.

    python scripts/convergence_rate.py [--trials 40] [--max-degree 2048]
"""
import argparse

from eqdist import harness


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=40)
    ap.add_argument("--max-degree", type=int, default=2048)
    ap.add_argument("--threads", type=int, default=None)
    args = ap.parse_args()
    degrees = [n for n in (64, 128, 256, 512, 1024, 2048, 4096) if n <= args.max_degree]
    print("dist           n      median    q10       q90")
    for dist in ("gaussian", "logparetolog"):
        cfg = harness.ExperimentConfig.from_json({
            "ensemble": "kac", "dist": dist, "degrees": degrees, "trials": args.trials,
            "statistics": ["radial_ks"], "seed": 5, "write_roots": False})
        for row in harness.run(cfg, threads=args.threads).per_degree():
            s = row["stats"]["radial_ks"]
            print(f"{dist:<14s} {row['n']:<6d} {s['median']:.4f}    {s['q10']:.4f}    {s['q90']:.4f}")


if __name__ == "__main__":
    main()
