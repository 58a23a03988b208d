"""Architecture comparison tables and Monte Carlo output files."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path

from .circuit import (
    SRAM,
    Architecture,
    Flavor,
    LutConfig,
    build_clut,
    device_count,
    read_delay,
    read_power,
    standby_power,
    write_cell,
    write_power,
)
from .params import DeviceParams, TechParams
from .variation import METRICS, UNITS, McSummary

LEVELS = ("logic0", "logic1", "average")


@dataclass(frozen=True)
class ArchitectureRow:
    """One column of the comparison tables.  Triples are (logic 0, logic 1, average)."""

    architecture: str
    read_power: tuple  # W
    write_power: tuple  # W
    standby_power: tuple  # W
    read_delay: tuple  # s
    write_delay: tuple  # s
    read_energy: float  # J, average
    write_energy: float  # J, average
    storage: int
    write_control: int
    read: int
    total_mos: int
    mtj_count: int


def _triple(a: float, b: float) -> tuple:
    return (a, b, 0.5 * (a + b))


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple
    read_window: float
    write_pulse: float

    def row(self, arch: Architecture | str) -> ArchitectureRow:
        name = Architecture(arch).value
        return next(r for r in self.rows if r.architecture == name)

    @property
    def standby_reduction(self) -> float:
        return self.row("SRAM-LUT").standby_power[2] / self.row("STT-CLUT").standby_power[2]

    @property
    def area_fold_sram(self) -> float:
        return self.row("SRAM-LUT").total_mos / self.row("SHE-CLUT").total_mos

    @property
    def area_fold_stt(self) -> float:
        return self.row("STT-CLUT").total_mos / self.row("SHE-CLUT").total_mos

    @property
    def transistor_savings(self) -> tuple:
        she = self.row("SHE-CLUT").total_mos
        return (self.row("SRAM-LUT").total_mos - she, self.row("STT-CLUT").total_mos - she)

    @property
    def she_write_energy_saving(self) -> float:
        """Relative write-energy change of the SHE cell versus the STT cell."""
        return 1.0 - self.row("SHE-CLUT").write_energy / self.row("STT-CLUT").write_energy

    def ratios(self) -> dict:
        return {
            "standby_reduction": self.standby_reduction,
            "area_fold_sram_over_she": self.area_fold_sram,
            "area_fold_stt_over_she": self.area_fold_stt,
            "transistor_savings_vs_sram": self.transistor_savings[0],
            "transistor_savings_vs_stt": self.transistor_savings[1],
            "she_write_energy_saving": self.she_write_energy_saving,
        }

    def to_dict(self) -> dict:
        return {
            "rows": [asdict(r) for r in self.rows],
            "read_window": self.read_window,
            "write_pulse": self.write_pulse,
            "ratios": self.ratios(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def table(self) -> str:
        """Human-readable table in uW / ps / ns / fJ."""
        head = f"{'metric':<26}" + "".join(f"{r.architecture:>14}" for r in self.rows)
        lines = [head, "-" * len(head)]

        def add(label, values, fmt="{:14.2f}"):
            lines.append(f"{label:<26}" + "".join(fmt.format(v) for v in values))

        for name, scale, unit in (
            ("read_power", 1e6, "uW"),
            ("write_power", 1e6, "uW"),
            ("standby_power", 1e6, "uW"),
            ("read_delay", 1e12, "ps"),
            ("write_delay", 1e9, "ns"),
        ):
            for k, level in enumerate(LEVELS):
                add(f"{name} {level} [{unit}]", [getattr(r, name)[k] * scale for r in self.rows])
        add("read_energy [fJ]", [r.read_energy * 1e15 for r in self.rows])
        add("write_energy [fJ]", [r.write_energy * 1e15 for r in self.rows])
        for name in ("storage", "write_control", "read", "total_mos", "mtj_count"):
            add(name, [getattr(r, name) for r in self.rows], "{:14d}")
        lines.append("")
        for k, v in self.ratios().items():
            lines.append(f"{k:<30}{v:10.3f}")
        return "\n".join(lines)


def _sram_row() -> ArchitectureRow:
    c = device_count(Architecture.SRAM_LUT)
    return ArchitectureRow(
        architecture=Architecture.SRAM_LUT.value,
        read_power=SRAM.read_power,
        write_power=SRAM.write_power,
        standby_power=SRAM.standby_power,
        read_delay=(SRAM.read_delay,) * 3,
        write_delay=(SRAM.write_delay,) * 3,
        read_energy=SRAM.read_energy,
        write_energy=SRAM.write_energy,
        storage=c.storage,
        write_control=c.write_control,
        read=c.read,
        total_mos=c.total_mos_equivalent,
        mtj_count=c.mtj_count,
    )


def _mram_row(arch: Architecture, device: DeviceParams, tech: TechParams) -> ArchitectureRow:
    flavor = Flavor.STT if arch is Architecture.STT_CLUT else Flavor.SHE
    # cell 0 holds 0 and cell 1 holds 1
    circuit = build_clut(LutConfig.from_hex("0000000000000002"), tech, flavor, device)
    rp = _triple(read_power(circuit, 0), read_power(circuit, 1))
    wp = _triple(write_power(circuit, 0), write_power(circuit, 1))
    rd = _triple(read_delay(circuit, 0), read_delay(circuit, 1))
    w1 = write_cell(circuit, 0, 1).delay
    w0 = write_cell(circuit, 0, 0).delay
    wd = _triple(w0, w1)
    standby = standby_power(circuit)
    c = device_count(arch, tech)
    return ArchitectureRow(
        architecture=arch.value,
        read_power=rp,
        write_power=wp,
        standby_power=(standby,) * 3,
        read_delay=rd,
        write_delay=wd,
        read_energy=rp[2] * tech.read_window,
        write_energy=wp[2] * tech.write_pulse,
        storage=c.storage,
        write_control=c.write_control,
        read=c.read,
        total_mos=c.total_mos_equivalent,
        mtj_count=c.mtj_count,
    )


def generate_comparison(device: DeviceParams, tech: TechParams) -> ComparisonReport:
    """All comparison rows: SRAM from fixed constants, MRAM rows from the model."""
    tech.require_calibrated()
    rows = (
        _sram_row(),
        _mram_row(Architecture.STT_CLUT, device, tech),
        _mram_row(Architecture.SHE_CLUT, device, tech),
    )
    return ComparisonReport(rows=rows, read_window=tech.read_window, write_pulse=tech.write_pulse)


# ------------------------------------------------------------------ MC output


def emit_histograms(summary: McSummary, directory) -> list:
    """Write one CSV per metric plus ``manifest.json``; returns the paths."""
    if summary.n_trials < 1:
        raise ValueError("summary has no trials; nothing to histogram")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for metric in METRICS:
        hist = summary.histograms[metric]
        path = directory / f"hist_{metric}.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["metric", "bin_low", "bin_high", "count"])
            for lo, hi, n in zip(hist.edges[:-1], hist.edges[1:], hist.counts):
                w.writerow([metric, repr(lo), repr(hi), n])
            if hist.overflow:
                w.writerow([metric, "nan", "nan", hist.overflow])
        paths.append(path)
    manifest = directory / "manifest.json"
    manifest.write_text(
        json.dumps(
            {
                "n_trials": summary.n_trials,
                "bins": summary.bins,
                "files": {m: p.name for m, p in zip(METRICS, paths)},
                "units": UNITS,
            },
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )
    return paths + [manifest]


def read_histogram_csv(path) -> list:
    with open(path, newline="") as fh:
        return [
            (row["metric"], float(row["bin_low"]), float(row["bin_high"]), int(row["count"]))
            for row in csv.DictReader(fh)
        ]


def write_summary(summary: McSummary, directory) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / "summary.json"
    path.write_text(summary.to_json())
    return path


def load_summary(path) -> McSummary:
    return McSummary.from_dict(json.loads(Path(path).read_text()))

