"""How the variation model choices affect Monte Carlo yield.

Runs the same seeds under several VariationSpec variants: lateral-only with a
shared MTJ pair (default), independent pairs, film thickness varied, both,
and the one_sigma convention.

    python scripts/variation_ablation.py --trials 1000 --seed 7
"""

import argparse

from clut.circuit import Flavor
from clut.params import load_device_params, load_tech_params
from clut.variation import VariationSpec, run_monte_carlo

VARIANTS = {
    "default (lateral 10%, shared pair)": VariationSpec(),
    "independent pair": VariationSpec(pair_correlation="independent"),
    "films 10%, shared pair": VariationSpec(film_thickness_variation=0.10),
    "films 10%, independent pair": VariationSpec(film_thickness_variation=0.10, pair_correlation="independent"),
    "lateral 5%, films 5%, independent": VariationSpec(
        mtj_dimension_variation=0.05, film_thickness_variation=0.05, pair_correlation="independent"
    ),
    "one_sigma convention": VariationSpec(convention="one_sigma"),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--flavor", choices=("stt", "she"), default="stt")
    args = ap.parse_args()
    device, tech = load_device_params(), load_tech_params()
    flavor = Flavor(args.flavor.upper())
    print(f"{'variant':<38}{'write err':>10}{'read err':>10}{'disturb':>9}{'max T [ns]':>12}{'mean T_PAP':>12}")
    for name, spec in VARIANTS.items():
        s = run_monte_carlo(device, tech, spec, args.trials, args.seed, flavor)
        print(f"{name:<38}{s.write_errors:>10}{s.read_errors:>10}{s.read_disturbs:>9}"
              f"{s.max_switching_time * 1e9:>12.3f}{s.stats['t_p_ap']['mean'] * 1e9:>12.3f}")


if __name__ == "__main__":
    main()
