"""Fit the default device and technology parameters to the reference figures.

The fit runs in stages, each closed-form or one-dimensional except the
dynamics stage:

1. access-transistor resistance and junction RA from the write and read
   currents (two linear equations in R_n and R_P at fixed TMR);
2. anisotropy, damping, torque asymmetry and cant from the two switching
   times (see :func:`clut.dynamics.calibrate_dynamics`);
3. SHE channel length such that the minimum-size SHE cell switches P->AP as
   fast as the STT cell (iso-delay);
4. sense-node capacitance and inverter delay from the two read delays;
5. read-enable time and output load from the two read powers;
6. per-device leakage from the standby power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .devices import MtjDevice, State, she_channel_resistance
from .dynamics import (
    CalibrationError,
    CalibrationTargets,
    Mechanism,
    TorqueDrive,
    analytic_switching_time,
    calibrate_dynamics,
)
from .params import SEED_DEVICE, SEED_TECH, DeviceParams, TechParams, save_device_params, save_tech_params


@dataclass(frozen=True)
class CircuitTargets:
    """MRAM C-LUT figures used to pin the lumped circuit constants."""

    read_delay_0: float = 20e-12
    read_delay_1: float = 60e-12
    read_power_0: float = 14.38e-6
    read_power_1: float = 19.91e-6
    standby_power: float = 0.31e-6


@dataclass
class CalibrationResult:
    device: DeviceParams
    tech: TechParams
    dynamics_residual: float
    notes: dict = field(default_factory=dict)


def solve_resistances(tech: TechParams, tmr: float, i_write: float, i_read: float) -> tuple[float, float]:
    """Return (R_n, R_P) that give the target write and read currents.

    Write path: two TGs of width ``stt_write_multiplier`` plus both MTJs.
    Read path: PR + both MTJs + NR.  The MTJ pair always sums to
    R_P (2 + TMR) whatever the stored bit.
    """
    k = tech.pmos_to_nmos_resistance
    tg_unit = k / (1.0 + k)  # TG on-resistance per unit R_n
    a = np.array([[2 * tg_unit / tech.stt_write_multiplier, 2 + tmr], [k / tech.pull_up_multiplier + 1.0, 2 + tmr]])
    b = np.array([tech.vdd / i_write, tech.vdd / i_read])
    rn, rp = np.linalg.solve(a, b)
    if rn <= 0 or rp <= 0:
        raise CalibrationError("write/read currents need a non-positive resistance", float(min(rn, rp)))
    return float(rn), float(rp)


def she_write_current(device: DeviceParams, tech: TechParams, channel) -> float:
    r_tg = tech.tg(tech.she_write_multiplier).on_resistance
    return tech.vdd / (2 * r_tg + 2 * she_channel_resistance(channel))


def solve_she_length(device: DeviceParams, tech: TechParams, target_time: float) -> float:
    """Channel length (nm) at which the SHE P->AP time equals ``target_time``."""
    mtj = device.mtj(State.P)

    def mismatch(length):
        ch = replace(device.channel, length=length)
        i = she_write_current(device, tech, ch)
        t = analytic_switching_time(mtj, TorqueDrive(Mechanism.SHE, i, 1.0), device.cant, ch)
        return 10.0 if t is None else math.log(t / target_time)

    lo, hi = 1.0, 1.0
    while mismatch(hi) < 0:
        hi *= 2
        if hi > 1e6:
            raise CalibrationError("SHE cell is faster than the target at any channel length", 0.0)
    if mismatch(lo) > 0:
        raise CalibrationError("SHE cell cannot reach the target time", mismatch(lo))
    return brentq(mismatch, lo, hi, xtol=1e-9)


def calibrate(
    targets: CalibrationTargets = CalibrationTargets(),
    circuit_targets: CircuitTargets = CircuitTargets(),
    device: DeviceParams = SEED_DEVICE,
    tech: TechParams = SEED_TECH,
    seed: int = 0,
) -> CalibrationResult:
    # late import: circuit depends on params only
    from .circuit import Architecture, device_count, divider, nominal_cell, read_chain

    if targets.t_p_ap < targets.t_ap_p:
        raise CalibrationError("P->AP target must not be faster than AP->P", 0.0)
    if targets.i_write <= targets.i_read:
        raise CalibrationError("write current must exceed read current", targets.i_read / targets.i_write)

    # 1. resistances
    rn, rp = solve_resistances(tech, device.material.tmr_ratio, targets.i_write, targets.i_read)
    area_um2 = device.geometry.length * device.geometry.width * 1e-6
    material = replace(device.material, ra_product=rp * area_um2)
    tech = replace(tech, nmos_on_resistance=rn)

    # 2. dynamics
    fit = calibrate_dynamics(targets, MtjDevice(device.geometry, material), prior_cant=device.cant, seed=seed)
    device = replace(device, material=fit.material, cant=fit.cant)

    # 3. SHE iso-delay channel
    length = solve_she_length(device, tech, targets.t_p_ap)
    device = replace(device, channel=replace(device.channel, length=length))

    # 4. read delay: stored 0 costs only the inverters
    cell = nominal_cell(device, tech, Mechanism.STT)
    cell.store(1)
    pu, pd = tech.pmos(tech.pull_up_multiplier), tech.nmos(1.0)
    v1, i_read = divider(cell, pu, pd, tech.vdd)
    chain = read_chain(cell, pu, pd)
    upper, lower = chain[0] + chain[1], chain[2] + chain[3]
    r_th = upper * lower / (upper + lower) + cell.read_tg.on_resistance
    v_th = tech.sense_threshold
    swing = math.log(v1 / (v1 - v_th))
    inverter_delay = circuit_targets.read_delay_0
    node_capacitance = (circuit_targets.read_delay_1 - inverter_delay) / (r_th * swing)

    # 5. read power over the accounting window
    window = tech.read_window
    read_enable_time = circuit_targets.read_power_0 * window / (tech.vdd * i_read)
    load = (circuit_targets.read_power_1 - circuit_targets.read_power_0) * window / tech.vdd**2

    # 6. leakage per minimum-size device
    count = device_count(Architecture.STT_CLUT, tech).total_mos_equivalent
    leakage = circuit_targets.standby_power / (count * tech.vdd)

    tech = replace(
        tech,
        leakage_current=leakage,
        node_capacitance=node_capacitance,
        inverter_delay=inverter_delay,
        output_load_capacitance=load,
        read_enable_time=read_enable_time,
    )
    notes = {
        "r_p_ohm": rp,
        "r_ap_ohm": rp * (1 + material.tmr_ratio),
        "nmos_on_resistance_ohm": rn,
        "cant_deg": fit.cant_deg,
        "she_channel_length_nm": length,
        "read_swing_factor": swing,
    }
    return CalibrationResult(device=device, tech=tech, dynamics_residual=fit.residual, notes=notes)


def write_calibration(result: CalibrationResult, directory) -> tuple[Path, Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    dev, tech = directory / "device.json", directory / "tech.json"
    save_device_params(result.device, dev)
    save_tech_params(result.tech, tech)
    return dev, tech
