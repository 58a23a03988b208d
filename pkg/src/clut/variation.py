"""Seeded Monte Carlo over process variation of one C-LUT cell.

Each trial draws its own parameter set from a stream keyed by
``(seed, trial_index)``, so results do not depend on execution order or on
how trials are split across workers.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np
from scipy.stats import truncnorm

from .circuit import (
    Flavor,
    MemoryCell,
    cell_read_margin,
    divider,
    nominal_cell,
    write_pair,
)
from .devices import MtjDevice, State, TransistorKind, TransistorParams
from .dynamics import Mechanism, TorqueDrive, switching_time
from .params import DeviceParams, TechParams

TRUNCATION = 3.0
METRICS = ("t_p_ap", "t_ap_p", "r_p", "r_ap", "i_read", "i_write")
UNITS = {"t_p_ap": "s", "t_ap_p": "s", "r_p": "ohm", "r_ap": "ohm", "i_read": "A", "i_write": "A"}


@dataclass(frozen=True)
class VariationSpec:
    """Relative variation magnitudes.

    ``mtj_dimension_variation`` applies to the junction's lateral size
    (length, width) and ``film_thickness_variation`` to deposited films
    (free layer, oxide, SHE channel thickness).  With
    ``pair_correlation="shared"`` both MTJs of a cell take the same geometry
    draw; ``"independent"`` draws each separately.  The SHE channel's lateral
    size uses ``she_channel_variation`` (defaults to the MTJ lateral
    fraction).
    """

    mtj_dimension_variation: float = 0.10
    film_thickness_variation: float = 0.0
    transistor_vth_variation: float = 0.10
    transistor_dimension_variation: float = 0.01
    she_channel_variation: float | None = None
    convention: str = "three_sigma"
    pair_correlation: str = "shared"

    def __post_init__(self):
        for name in (
            "mtj_dimension_variation",
            "film_thickness_variation",
            "transistor_vth_variation",
            "transistor_dimension_variation",
        ):
            v = getattr(self, name)
            if not 0 <= v < 1:
                raise ValueError(f"{name} must lie in [0, 1)")
        if self.she_channel_variation is not None and not 0 <= self.she_channel_variation < 1:
            raise ValueError("she_channel_variation must lie in [0, 1)")
        if self.convention not in ("three_sigma", "one_sigma"):
            raise ValueError("convention must be three_sigma or one_sigma")
        if self.pair_correlation not in ("shared", "independent"):
            raise ValueError("pair_correlation must be shared or independent")

    def sigma(self, fraction: float, nominal: float) -> float:
        scale = fraction / TRUNCATION if self.convention == "three_sigma" else fraction
        return scale * abs(nominal)

    @property
    def channel_fraction(self) -> float:
        if self.she_channel_variation is None:
            return self.mtj_dimension_variation
        return self.she_channel_variation

    @classmethod
    def from_dict(cls, data: dict) -> "VariationSpec":
        known = {f for f in cls.__dataclass_fields__}
        unknown = sorted(set(data) - known)
        if unknown:
            from .params import ParamError

            raise ParamError(unknown[0], "unknown key")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


def trial_rng(seed: int, trial_index: int, cell: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial_index, cell)))


def draw(rng: np.random.Generator, nominal: float, sigma: float) -> float:
    """Gaussian around ``nominal`` truncated at +-3 sigma and kept positive."""
    if sigma == 0:
        return nominal
    lower = max(-TRUNCATION, -(1 - 1e-6) * nominal / sigma)
    return float(nominal + sigma * truncnorm.rvs(lower, TRUNCATION, random_state=rng))


@dataclass
class Instance:
    cell: MemoryCell
    pull_up: TransistorParams
    pull_down: TransistorParams
    tech: TechParams
    flavor: Flavor
    cant: float
    trial_index: int = 0


def _vary_transistor(rng, spec: VariationSpec, tech: TechParams, base: TransistorParams) -> TransistorParams:
    """On-resistance scales with overdrive (VDD - Vth)^-1 and L/W."""
    vth0 = base.threshold_voltage
    vth = draw(rng, vth0, spec.sigma(spec.transistor_vth_variation, vth0))
    w = draw(rng, 1.0, spec.sigma(spec.transistor_dimension_variation, 1.0))
    length = draw(rng, 1.0, spec.sigma(spec.transistor_dimension_variation, 1.0))
    factor = (tech.vdd - vth0) / (tech.vdd - vth) * length / w
    return replace(base, threshold_voltage=vth, on_resistance_at_min_size=base.on_resistance_at_min_size * factor)


def _vary_tg(rng, spec, tech: TechParams, width: float) -> TransistorParams:
    n = _vary_transistor(rng, spec, tech, tech.nmos(width))
    p = _vary_transistor(rng, spec, tech, tech.pmos(width))
    rn, rp = n.on_resistance_at_min_size, p.on_resistance_at_min_size
    return TransistorParams(TransistorKind.TG, width, n.threshold_voltage, rn * rp / (rn + rp), n.leakage_current * 2)


def _vary_geometry(rng, spec: VariationSpec, g):
    lateral, film = spec.mtj_dimension_variation, spec.film_thickness_variation
    length = draw(rng, g.length, spec.sigma(lateral, g.length))
    width = draw(rng, g.width, spec.sigma(lateral, g.width))
    t_free = draw(rng, g.free_layer_thickness, spec.sigma(film, g.free_layer_thickness))
    t_ox = draw(rng, g.oxide_thickness, spec.sigma(film, g.oxide_thickness))
    # keep the long axis labelled as length
    return replace(g, length=max(length, width), width=min(length, width), free_layer_thickness=t_free, oxide_thickness=t_ox)


def _vary_channel(rng, spec: VariationSpec, ch):
    f = spec.channel_fraction
    return replace(
        ch,
        length=draw(rng, ch.length, spec.sigma(f, ch.length)),
        width=draw(rng, ch.width, spec.sigma(f, ch.width)),
        thickness=draw(rng, ch.thickness, spec.sigma(spec.film_thickness_variation, ch.thickness)),
    )


def sample_instance(
    device: DeviceParams,
    tech: TechParams,
    spec: VariationSpec,
    seed: int,
    trial_index: int,
    flavor: Flavor = Flavor.STT,
    cell: int = 0,
) -> Instance:
    """Draw one varied cell plus its read pull-up/pull-down.

    Draw order is fixed, so the same (seed, trial_index, cell) always yields
    the same instance.
    """
    rng = trial_rng(seed, trial_index, cell)
    geom_1 = _vary_geometry(rng, spec, device.geometry)
    geom_2 = geom_1 if spec.pair_correlation == "shared" else _vary_geometry(rng, spec, device.geometry)
    width = tech.stt_write_multiplier if flavor is Flavor.STT else tech.she_write_multiplier
    tgw1 = _vary_tg(rng, spec, tech, width)
    tgw2 = _vary_tg(rng, spec, tech, width)
    tgr = _vary_tg(rng, spec, tech, 1.0)
    pull_up = _vary_transistor(rng, spec, tech, tech.pmos(tech.pull_up_multiplier))
    pull_down = _vary_transistor(rng, spec, tech, tech.nmos(1.0))
    ch1 = ch2 = None
    if flavor is Flavor.SHE:
        ch1 = _vary_channel(rng, spec, device.channel)
        ch2 = _vary_channel(rng, spec, device.channel)
    c = MemoryCell(
        mtj=MtjDevice(geom_1, device.material, State.AP),
        mtj_complement=MtjDevice(geom_2, device.material, State.P),
        write_tg_1=tgw1,
        write_tg_2=tgw2,
        read_tg=tgr,
        channel_1=ch1,
        channel_2=ch2,
    )
    return Instance(c, pull_up, pull_down, tech, flavor, device.cant, trial_index)


def nominal_instance(device: DeviceParams, tech: TechParams, flavor: Flavor = Flavor.STT) -> Instance:
    return Instance(
        nominal_cell(device, tech, flavor), tech.pmos(tech.pull_up_multiplier), tech.nmos(1.0), tech, flavor, device.cant
    )


@dataclass
class TrialReport:
    trial_index: int
    t_p_ap: float  # nan when the write failed
    t_ap_p: float
    r_p: float
    r_ap: float
    i_read: float
    i_write: float
    read_margin: float
    write_error: bool
    read_error: bool
    read_disturb: bool = False

    def metric(self, name: str) -> float:
        return getattr(self, name)


def _read_disturbed(inst: Instance, i_read: float) -> bool:
    """True if the read current flips either MTJ within the hold time.

    Read current flows as a write-1 current: it pushes MTJ toward P and the
    complement toward AP.
    """
    hold = inst.tech.read_hold
    cell = inst.cell
    for dev, signed in ((cell.mtj, -i_read), (cell.mtj_complement, i_read)):
        if switching_time(dev, TorqueDrive(Mechanism.STT, signed, hold), inst.cant) is not None:
            return True
    return False


def run_trial(instance: Instance) -> TrialReport:
    """Write 1 then 0 into the cell (starting from 0), reading after each write."""
    inst = instance
    tech = inst.tech
    cell = replace(inst.cell)
    cell.store(0)
    inst = replace(inst, cell=cell)
    currents, reads = [], []
    write_error = read_error = disturbed = False
    times = {}
    for bit in (1, 0):
        res = write_pair(cell, inst.flavor, bit, tech.write_pulse, tech.vdd, inst.cant)
        write_error |= res.write_error
        currents.append(res.current)
        times[bit] = res.switching_times[0]
        v, i_read = divider(cell, inst.pull_up, inst.pull_down, tech.vdd)
        reads.append(i_read)
        if int(v > tech.sense_threshold) != cell.bit:
            read_error = True
        if _read_disturbed(inst, i_read):
            disturbed = read_error = True
    margin = cell_read_margin(cell, inst.pull_up, inst.pull_down, tech.vdd)
    if margin < tech.min_read_margin:
        read_error = True
    return TrialReport(
        trial_index=inst.trial_index,
        t_p_ap=math.nan if times[0] is None else times[0],
        t_ap_p=math.nan if times[1] is None else times[1],
        r_p=cell.mtj.r_p,
        r_ap=cell.mtj.r_ap,
        i_read=float(np.mean(reads)),
        i_write=float(np.mean(currents)),
        read_margin=margin,
        write_error=write_error,
        read_error=read_error,
        read_disturb=disturbed,
    )


# ------------------------------------------------------------------ aggregation


@dataclass
class Histogram:
    edges: list
    counts: list
    overflow: int = 0  # non-finite samples (failed switches)

    @property
    def total(self) -> int:
        return int(sum(self.counts)) + self.overflow


def histogram(values, bins: int = 50) -> Histogram:
    v = np.asarray(values, dtype=float)
    finite = v[np.isfinite(v)]
    if finite.size == 0:
        return Histogram(edges=[], counts=[], overflow=int(v.size))
    counts, edges = np.histogram(finite, bins=bins)
    return Histogram([float(e) for e in edges], [int(c) for c in counts], int(v.size - finite.size))


@dataclass
class McSummary:
    n_trials: int
    seed: int
    flavor: str
    spec: dict
    stats: dict
    histograms: dict
    write_errors: int
    read_errors: int
    read_disturbs: int
    max_switching_time: float
    bins: int = 50

    def to_dict(self) -> dict:
        d = asdict(self)
        d["histograms"] = {k: asdict(h) for k, h in self.histograms.items()}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "McSummary":
        d = dict(d)
        d["histograms"] = {k: Histogram(**h) for k, h in d["histograms"].items()}
        return cls(**d)


def summarize(reports, seed: int, spec: VariationSpec, flavor: Flavor, bins: int = 50) -> McSummary:
    reports = sorted(reports, key=lambda r: r.trial_index)
    stats, hists = {}, {}
    for m in METRICS:
        v = np.array([r.metric(m) for r in reports], dtype=float)
        f = v[np.isfinite(v)]
        stats[m] = {
            "mean": float(f.mean()) if f.size else math.nan,
            "std": float(f.std()) if f.size else math.nan,
            "min": float(f.min()) if f.size else math.nan,
            "max": float(f.max()) if f.size else math.nan,
            "count": int(f.size),
        }
        hists[m] = histogram(v, bins)
    switching = [r.t_p_ap for r in reports] + [r.t_ap_p for r in reports]
    worst = max((t if math.isfinite(t) else math.inf) for t in switching) if reports else math.nan
    return McSummary(
        n_trials=len(reports),
        seed=seed,
        flavor=flavor.value,
        spec=spec.to_dict(),
        stats=stats,
        histograms=hists,
        write_errors=sum(r.write_error for r in reports),
        read_errors=sum(r.read_error for r in reports),
        read_disturbs=sum(r.read_disturb for r in reports),
        max_switching_time=worst,
        bins=bins,
    )


def _run_one(args) -> TrialReport:
    device, tech, spec, seed, index, flavor, whole_lut = args
    report = run_trial(sample_instance(device, tech, spec, seed, index, flavor))
    if whole_lut:
        for c in range(1, 64):
            other = run_trial(sample_instance(device, tech, spec, seed, index, flavor, cell=c))
            report.write_error |= other.write_error
            report.read_error |= other.read_error
            report.read_disturb |= other.read_disturb
    return report


def run_trials(device, tech, spec, n_trials, seed, flavor=Flavor.STT, workers: int = 1, whole_lut=False) -> list:
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    tech.require_calibrated()
    jobs = [(device, tech, spec, seed, i, flavor, whole_lut) for i in range(n_trials)]
    if workers <= 1:
        reports = [_run_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_run_one, jobs, chunksize=max(1, n_trials // (4 * workers))))
    return sorted(reports, key=lambda r: r.trial_index)


def run_monte_carlo(
    device: DeviceParams,
    tech: TechParams,
    spec: VariationSpec = VariationSpec(),
    n_trials: int = 1000,
    seed: int = 0,
    flavor: Flavor = Flavor.STT,
    workers: int = 1,
    bins: int = 50,
    whole_lut: bool = False,
) -> McSummary:
    reports = run_trials(device, tech, spec, n_trials, seed, flavor, workers, whole_lut)
    return summarize(reports, seed, spec, flavor, bins)
