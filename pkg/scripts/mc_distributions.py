"""Monte Carlo distributions of switching times, resistances and currents.

    python scripts/mc_distributions.py --trials 1000 --seed 7 --out results/mc
"""

import argparse

from clut.circuit import Flavor
from clut.params import load_device_params, load_tech_params
from clut.report import emit_histograms, write_summary
from clut.variation import VariationSpec, run_monte_carlo


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--flavor", choices=("stt", "she"), default="stt")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/mc")
    args = ap.parse_args()

    s = run_monte_carlo(load_device_params(), load_tech_params(), VariationSpec(), args.trials, args.seed,
                        Flavor(args.flavor.upper()), workers=args.workers)
    write_summary(s, args.out)
    emit_histograms(s, args.out)
    print(f"{'metric':<10}{'mean':>14}{'std':>14}{'min':>14}{'max':>14}")
    for m, st in s.stats.items():
        print(f"{m:<10}{st['mean']:14.4g}{st['std']:14.4g}{st['min']:14.4g}{st['max']:14.4g}")
    print(f"write errors {s.write_errors}, read errors {s.read_errors}, read disturbs {s.read_disturbs}")
    print(f"files in {args.out}")


if __name__ == "__main__":
    main()
