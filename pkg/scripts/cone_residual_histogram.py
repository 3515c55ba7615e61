"""Residual distribution of {det = 0} or {pf = 0} at sampled regular points.

Prints log10 quantiles, useful for choosing tolerances.

    python3 scripts/cone_residual_histogram.py det --n 4 --samples 2000
"""

import argparse

import numpy as np

from minlab import implicit
from minlab.scenarios import stream_rng


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("variety", choices=("det", "pf"))
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--mode", choices=("ad", "fd"), default="ad")
    args = ap.parse_args()

    if args.variety == "det":
        field, sample = implicit.det_variety(args.n, args.mode), implicit.sample_det_variety
    else:
        field, sample = implicit.pf_variety(args.n, args.mode), implicit.sample_pf_variety
    res = np.array(
        [
            implicit.level_residual(field, sample(args.n, stream_rng(args.seed, "histogram", i)))
            for i in range(args.samples)
        ]
    )
    logs = np.log10(np.maximum(res, 1e-300))
    print(f"{field.name}: {args.samples} points, mode={args.mode}")
    for q in (0.0, 0.5, 0.9, 0.99, 1.0):
        print(f"  q{q:<4}  log10 residual = {np.quantile(logs, q):7.2f}")


if __name__ == "__main__":
    main()
