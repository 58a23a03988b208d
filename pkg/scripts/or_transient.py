"""Transient traces for a 6-input OR: configure, then read 000000 and 111111.

    python scripts/or_transient.py --out results/trace
"""

import argparse
from pathlib import Path

from clut.circuit import Flavor, LutConfig, Mode, build_clut, transient_trace
from clut.params import load_device_params, load_tech_params

OR_TABLE = "FFFFFFFFFFFFFFFE"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--flavor", choices=("stt", "she"), default="stt")
    ap.add_argument("--out", default="results/trace")
    args = ap.parse_args()
    device, tech = load_device_params(), load_tech_params()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for inputs in ("000000", "111111"):
        circuit = build_clut(LutConfig(Mode.SINGLE6, 0), tech, Flavor(args.flavor.upper()), device)
        trace = transient_trace(circuit, LutConfig.from_hex(OR_TABLE), inputs)
        path = out / f"or_{args.flavor}_{inputs}.csv"
        trace.to_csv(path)
        print(f"{inputs}: OUT1 -> {int(trace.final('OUT1'))}  ({path})")


if __name__ == "__main__":
    main()
