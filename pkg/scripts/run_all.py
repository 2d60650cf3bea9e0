"""Run every config in scripts/configs and print the per-degree medians.

    python scripts/run_all.py [--threads N] [--only NAME ...] [--out results]
"""
import argparse
import pathlib
import time

from eqdist import harness

HERE = pathlib.Path(__file__).parent


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--only", nargs="*", default=None)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    for path in sorted((HERE / "configs").glob("*.json")):
        if args.only and path.stem not in args.only:
            continue
        cfg = harness.load_config(path)
        t0 = time.perf_counter()
        result = harness.run(cfg, threads=args.threads)
        harness.emit(result, pathlib.Path(args.out) / path.stem)
        print(f"== {path.stem} ({cfg.ensemble}, {cfg.dist.canonical_name()}) {time.perf_counter() - t0:.1f}s")
        for row in result.per_degree():
            meds = "  ".join(f"{k}={v['median']:.4g}" for k, v in row["stats"].items() if v["median"] is not None)
            fails = sum(row["failures"].values())
            print(f"  n={row['n']:<5d} ok={row['successes']:<4d} failed={fails:<3d} {meds}")


if __name__ == "__main__":
    main()
