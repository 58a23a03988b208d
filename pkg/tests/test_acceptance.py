"""End-to-end acceptance checks, one test per criterion."""

import json
import math
import random
import time

import numpy as np
import pytest

from clut.calibration import calibrate
from clut.circuit import (
    Architecture,
    Flavor,
    LutConfig,
    Mode,
    build_clut,
    device_count,
    evaluate,
    read_delay,
    read_margin,
    read_node_voltage,
    reference_read_margin,
    series_tap_voltage,
    standby_power,
    write_cell,
)
from clut.cli import main
from clut.devices import State, stt_critical_current, vector_from_state
from clut.dynamics import CalibrationTargets, Mechanism, TorqueDrive, analytic_switching_time, integrate_llg, switching_time
from clut.report import generate_comparison
from clut.variation import VariationSpec, run_monte_carlo

from conftest import record
from test_circuit import nodal_tap_voltage

TARGETS = CalibrationTargets()


def within(value, target, rel):
    return abs(value - target) <= rel * abs(target)


def test_criterion_1_calibration_fidelity():
    start = time.perf_counter()
    result = calibrate(TARGETS)
    elapsed = time.perf_counter() - start
    dev = result.device
    t_pap = switching_time(dev.mtj(State.P), TorqueDrive(Mechanism.STT, TARGETS.i_write, TARGETS.pulse), dev.cant)
    t_app = switching_time(dev.mtj(State.AP), TorqueDrive(Mechanism.STT, -TARGETS.i_write, TARGETS.pulse), dev.cant)
    holds = all(
        switching_time(dev.mtj(s), TorqueDrive(Mechanism.STT, (1 if s is State.P else -1) * TARGETS.i_read, 20e-9),
                       dev.cant) is None
        for s in State
    )
    ok = (
        t_pap is not None and t_app is not None
        and within(t_pap, TARGETS.t_p_ap, 0.05) and within(t_app, TARGETS.t_ap_p, 0.05)
        and holds and elapsed < 60
    )
    record(1, ok, f"T_P-AP={t_pap * 1e9:.4f} ns, T_AP-P={t_app * 1e9:.4f} ns, read holds 20 ns={holds}, "
                  f"runtime {elapsed:.1f} s")
    assert ok


def test_criterion_2_monte_carlo(tmp_path, capsys):
    start = time.perf_counter()
    code = main(["mc", "--trials", "1000", "--seed", "7", "--out", str(tmp_path)])
    elapsed = time.perf_counter() - start
    capsys.readouterr()
    s = json.loads((tmp_path / "summary.json").read_text())
    st = s["stats"]
    means = {k: st[k]["mean"] for k in ("t_p_ap", "t_ap_p", "i_read", "i_write")}
    ok = (
        code == 0
        and s["n_trials"] == 1000
        and s["write_errors"] == 0
        and s["read_errors"] == 0
        and s["max_switching_time"] < 2e-9
        and within(means["t_p_ap"], 1.63e-9, 0.10)
        and within(means["t_ap_p"], 1.13e-9, 0.10)
        and within(means["i_read"], 38.21e-6, 0.10)
        and within(means["i_write"], 71.13e-6, 0.10)
        and means["i_read"] < means["i_write"]
        and elapsed < 120
    )
    record(2, ok, f"write errors {s['write_errors']}, read errors {s['read_errors']}, "
                  f"max switching {s['max_switching_time'] * 1e9:.3f} ns, "
                  f"means T_P-AP {means['t_p_ap'] * 1e9:.3f} ns T_AP-P {means['t_ap_p'] * 1e9:.3f} ns "
                  f"I_READ {means['i_read'] * 1e6:.2f} uA I_WRITE {means['i_write'] * 1e6:.2f} uA, "
                  f"runtime {elapsed:.1f} s")
    assert ok


def test_criterion_3_write_energy(device, tech):
    energies = {}
    for flavor in Flavor:
        c = build_clut(LutConfig.from_hex("0" * 16), tech, flavor, device)
        energies[flavor] = write_cell(c, 0, 1).energy
    ok = within(energies[Flavor.STT], 162.36e-15, 0.10) and within(energies[Flavor.SHE], 175.5e-15, 0.10)
    record(3, ok, f"STT {energies[Flavor.STT] * 1e15:.2f} fJ (ref 162.36), "
                  f"SHE {energies[Flavor.SHE] * 1e15:.2f} fJ (ref 175.5)")
    assert ok


def test_criterion_4_counts():
    c = {a: device_count(a) for a in Architecture}
    totals = {a: x.total_mos_equivalent for a, x in c.items()}
    she = totals[Architecture.SHE_CLUT]
    fold_sram = totals[Architecture.SRAM_LUT] / she
    fold_stt = totals[Architecture.STT_CLUT] / she
    ok = (
        totals == {Architecture.SRAM_LUT: 1029, Architecture.STT_CLUT: 1547, Architecture.SHE_CLUT: 779}
        and c[Architecture.SRAM_LUT].mtj_count == 0
        and c[Architecture.STT_CLUT].mtj_count == c[Architecture.SHE_CLUT].mtj_count == 128
        and totals[Architecture.SRAM_LUT] - she == 250
        and totals[Architecture.STT_CLUT] - she == 768
        and abs(fold_sram - 1.3) <= 0.05 and abs(fold_stt - 2.0) <= 0.05
        and all(x.storage + x.write_control + x.read == x.total_mos_equivalent for x in c.values())
    )
    record(4, ok, f"totals {[totals[a] for a in Architecture]}, deltas 250/768, "
                  f"folds {fold_sram:.3f}/{fold_stt:.3f}")
    assert ok


def test_criterion_5_standby_ratio(device, tech):
    ratio = generate_comparison(device, tech).standby_reduction
    direct = standby_power(Architecture.SRAM_LUT) / standby_power(Architecture.STT_CLUT, tech)
    ok = abs(ratio - 5.4) <= 0.2 and ratio == direct
    record(5, ok, f"SRAM/MRAM standby = {ratio:.3f}")
    assert ok


def test_criterion_6_functional(device, tech):
    rng = random.Random(2024)
    start = time.perf_counter()
    bad = 0
    for _ in range(1000):
        bits = rng.getrandbits(64)
        c = build_clut(LutConfig(Mode.SINGLE6, bits), tech, Flavor.STT, device)
        bad += sum(evaluate(c, v)["OUT1"] != (bits >> v) & 1 for v in range(64))
    single_time = time.perf_counter() - start
    dual_bad = 0
    for _ in range(1000):
        low, high = rng.getrandbits(32), rng.getrandbits(32)
        c = build_clut(LutConfig.from_halves(low, high), tech, Flavor.STT, device)
        for v in range(32):
            out = evaluate(c, v << 1)
            dual_bad += (out["OUT0"] != (low >> v) & 1) + (out["OUT2"] != (high >> v) & 1)
    ok = bad == 0 and dual_bad == 0 and single_time < 10
    record(6, ok, f"single6 mismatches {bad} over 64000 vectors in {single_time:.2f} s, "
                  f"dual5 mismatches {dual_bad} over 32000 vectors")
    assert ok


def test_criterion_7_physics(device, tech):
    checks = {}
    mtj = device.mtj(State.P)
    drive = TorqueDrive(Mechanism.STT, TARGETS.i_write, 2e-9)
    traj = integrate_llg(vector_from_state(State.P, device.cant), drive, mtj, dt=1e-12)
    checks["norm"] = float(np.max(np.abs(np.linalg.norm(traj.m, axis=1) - 1))) <= 1e-6

    ic = stt_critical_current(device.geometry, device.material, State.AP)
    times = [analytic_switching_time(mtj, TorqueDrive(Mechanism.STT, k * ic, 1.0), device.cant)
             for k in np.linspace(1.05, 5.0, 40)]
    checks["monotone"] = all(a > b for a, b in zip(times, times[1:]))

    fine = switching_time(mtj, drive, device.cant, method="llg", dt=0.5e-12)
    checks["dt_halving"] = abs(traj.switching_event - fine) / fine < 0.01

    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(500):
        r = list(rng.uniform(1.0, 1e5, size=4))
        worst = max(worst, abs(series_tap_voltage(r, 2, 1.1) / nodal_tap_voltage(r, 2, 1.1) - 1))
    checks["divider"] = worst <= 1e-9

    c = build_clut(LutConfig(Mode.SINGLE6, rng.integers(0, 2**63)), tech, Flavor.STT, device)
    ratio = read_margin(c, 0) / reference_read_margin(c.cells[0], c.pull_up, c.pull_down, tech.vdd)
    checks["margin"] = ratio >= 2

    bits = c.stored_bits()
    voltages = [read_node_voltage(c, i) for i in range(64)]
    c.power_down()
    c.power_up()
    checks["nonvolatile"] = c.stored_bits() == bits and [read_node_voltage(c, i) for i in range(64)] == voltages

    ok = all(checks.values())
    record(7, ok, ", ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in checks.items())
           + f" (margin ratio {ratio:.3f})")
    assert ok


def test_criterion_8_determinism(device, tech):
    serial = run_monte_carlo(device, tech, VariationSpec(), n_trials=1000, seed=11, workers=1).to_json()
    parallel = run_monte_carlo(device, tech, VariationSpec(), n_trials=1000, seed=11, workers=4).to_json()
    again = run_monte_carlo(device, tech, VariationSpec(), n_trials=1000, seed=11, workers=2).to_json()
    ok = serial == parallel == again
    record(8, ok, "serial, 4-worker and 2-worker summaries byte-identical" if ok else "summaries differ")
    assert ok


def test_criterion_9_read_delay(device, tech):
    c = build_clut(LutConfig.from_hex("0000000000000002"), tech, Flavor.STT, device)
    d0, d1 = read_delay(c, 0), read_delay(c, 1)
    avg = 0.5 * (d0 + d1)
    ok = within(d0, 20e-12, 0.2) and within(d1, 60e-12, 0.2) and within(avg, 40e-12, 0.2)
    record(9, ok, f"read delay 0: {d0 * 1e12:.1f} ps, 1: {d1 * 1e12:.1f} ps, average {avg * 1e12:.1f} ps")
    assert ok
