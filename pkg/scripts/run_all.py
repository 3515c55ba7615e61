"""Run every catalog scenario and write one JSON report per scenario.

    python3 scripts/run_all.py --out reports --samples 200 --seed 0
"""

import argparse
import time
from pathlib import Path

from minlab.scenarios import CATALOG, ScenarioConfig, run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="reports")
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--mode", choices=("ad", "fd"), default="ad")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    failed = 0
    for name in CATALOG:
        cfg = ScenarioConfig(name, seed=args.seed, samples=args.samples, mode=args.mode, workers=args.workers)
        t0 = time.perf_counter()
        rep = run(cfg)
        dt = time.perf_counter() - t0
        rep.write_json(out / f"{name}.json")
        worst = "-" if rep.max_residual is None else f"{rep.max_residual:.2e}"
        print(f"{name:22s} {rep.verdict:4s} max_residual={worst:>9s} failures={rep.failures:<3d} {dt:6.1f}s")
        failed += rep.verdict != "pass"
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
