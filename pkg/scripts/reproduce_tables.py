"""Print the architecture comparison next to the reference figures.

    python scripts/reproduce_tables.py [--out DIR]
"""

import argparse
from pathlib import Path

from clut.params import load_device_params, load_tech_params
from clut.report import generate_comparison

# (architecture, attribute, index or None, reference value, unit scale, unit)
REFERENCE = [
    ("STT-CLUT", "read_power", 0, 14.38, 1e6, "uW"),
    ("STT-CLUT", "read_power", 1, 19.91, 1e6, "uW"),
    ("STT-CLUT", "read_power", 2, 17.15, 1e6, "uW"),
    ("STT-CLUT", "write_power", 2, 81.18, 1e6, "uW"),
    ("STT-CLUT", "standby_power", 2, 0.31, 1e6, "uW"),
    ("STT-CLUT", "read_delay", 0, 20.0, 1e12, "ps"),
    ("STT-CLUT", "read_delay", 1, 60.0, 1e12, "ps"),
    ("STT-CLUT", "read_delay", 2, 40.0, 1e12, "ps"),
    ("STT-CLUT", "read_energy", None, 8.58, 1e15, "fJ"),
    ("STT-CLUT", "write_energy", None, 162.36, 1e15, "fJ"),
    ("SHE-CLUT", "write_energy", None, 175.5, 1e15, "fJ"),
    ("SRAM-LUT", "total_mos", None, 1029, 1, "MOS"),
    ("STT-CLUT", "total_mos", None, 1547, 1, "MOS"),
    ("SHE-CLUT", "total_mos", None, 779, 1, "MOS"),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", help="write comparison.json here")
    args = ap.parse_args()
    report = generate_comparison(load_device_params(), load_tech_params())
    print(report.table())
    print()
    print(f"{'quantity':<34}{'model':>12}{'reference':>12}{'error':>9}")
    for arch, attr, idx, ref, scale, unit in REFERENCE:
        v = getattr(report.row(arch), attr)
        v = (v[idx] if idx is not None else v) * scale
        label = f"{arch} {attr}" + (f"[{idx}]" if idx is not None else "") + f" [{unit}]"
        print(f"{label:<34}{v:12.2f}{ref:12.2f}{(v - ref) / ref:+9.1%}")
    r = report.ratios()
    print(f"\nstandby reduction {r['standby_reduction']:.2f} (reference 5.4)")
    print(f"area folds {r['area_fold_sram_over_she']:.2f} / {r['area_fold_stt_over_she']:.2f} (reference 1.3 / 2.0)")
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "comparison.json").write_text(report.to_json())


if __name__ == "__main__":
    main()
