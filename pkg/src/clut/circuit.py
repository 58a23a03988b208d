"""Behavioral model of the fracturable 6-input clockless LUT.

Each of the 64 cells holds a bit in a complementary MTJ pair.  Writing drives
one current through BL -> TGW1 -> (MTJ or channel) -> (complement MTJ or
channel) -> TGW2 -> SL; the two devices are mounted with opposite polarity so
the same current sets them to opposite states.  Reading powers the chain
VDD -> PR -> MTJ -> D_i -> complement MTJ -> NR -> GND and the divided voltage
at D_i is passed through the select tree and two inverters.

Conventions: cell index = A*32 + B*16 + C*8 + D*4 + E*2 + F (A is the MSB).
Bit 1 means MTJ in P and complement in AP, which puts D_i above mid-rail.
Read current flows in the write-1 direction, so only a stored 0 is at risk of
read disturb.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field, replace

from .devices import MtjDevice, SheChannel, State, TransistorParams, she_channel_resistance
from .dynamics import Mechanism, TorqueDrive, switching_time
from .params import DeviceParams, TechParams

N_CELLS = 64
Flavor = Mechanism


class Mode(enum.Enum):
    SINGLE6 = "single6"
    DUAL5 = "dual5"


class Architecture(enum.Enum):
    SRAM_LUT = "SRAM-LUT"
    STT_CLUT = "STT-CLUT"
    SHE_CLUT = "SHE-CLUT"


class CircuitError(ValueError):
    pass


class WriteError(RuntimeError):
    pass


# ------------------------------------------------------------------ LUT config


@dataclass(frozen=True)
class LutConfig:
    """64 configuration bits; bit i is stored in cell i.

    In DUAL5 mode cells 0..31 hold the OUT0 table and cells 32..63 the OUT2
    table.
    """

    mode: Mode
    bits: int

    def __post_init__(self):
        if not 0 <= self.bits < 1 << N_CELLS:
            raise CircuitError("truth table must fit in 64 bits")

    @classmethod
    def from_hex(cls, table, mode: Mode = Mode.SINGLE6) -> "LutConfig":
        """Parse a 16-digit hex string, or two 8-digit strings (OUT0, OUT2) for DUAL5."""
        if mode is Mode.SINGLE6:
            if not isinstance(table, str):
                raise CircuitError("single6 mode takes one 16-digit hex table")
            return cls(mode, _parse_hex(table, 16))
        if isinstance(table, str):
            table = table.split(",")
        if len(table) != 2:
            raise CircuitError("dual5 mode takes two 8-digit hex tables (OUT0, OUT2)")
        low, high = (_parse_hex(t, 8) for t in table)
        return cls(mode, (high << 32) | low)

    @classmethod
    def from_halves(cls, low: int, high: int) -> "LutConfig":
        return cls(Mode.DUAL5, (high << 32) | low)

    def bit(self, index: int) -> int:
        return (self.bits >> index) & 1

    def to_hex(self):
        if self.mode is Mode.SINGLE6:
            return f"{self.bits:016X}"
        return (f"{self.bits & 0xFFFFFFFF:08X}", f"{self.bits >> 32:08X}")


def _parse_hex(text: str, digits: int) -> int:
    text = text.strip()
    if text.lower().startswith("0x"):
        text = text[2:]
    if len(text) != digits:
        raise CircuitError(f"expected {digits} hex digits, got {text!r}")
    try:
        return int(text, 16)
    except ValueError:
        raise CircuitError(f"not a hex string: {text!r}") from None


def parse_inputs(inputs) -> tuple[int, ...]:
    """Accept '010011', an int 0..63, or a sequence of six 0/1 values (A first)."""
    if isinstance(inputs, str):
        if len(inputs) != 6 or set(inputs) - {"0", "1"}:
            raise CircuitError(f"inputs must be six binary digits, got {inputs!r}")
        return tuple(int(c) for c in inputs)
    if isinstance(inputs, int):
        if not 0 <= inputs < 64:
            raise CircuitError("input vector out of range")
        return tuple((inputs >> (5 - k)) & 1 for k in range(6))
    bits = tuple(int(b) for b in inputs)
    if len(bits) != 6 or set(bits) - {0, 1}:
        raise CircuitError("inputs must be six 0/1 values")
    return bits


def cell_index(inputs) -> int:
    idx = 0
    for b in parse_inputs(inputs):
        idx = (idx << 1) | b
    return idx


# ------------------------------------------------------------------ cell model


@dataclass
class MemoryCell:
    mtj: MtjDevice
    mtj_complement: MtjDevice
    write_tg_1: TransistorParams
    write_tg_2: TransistorParams
    read_tg: TransistorParams
    channel_1: SheChannel | None = None
    channel_2: SheChannel | None = None

    @property
    def bit(self) -> int:
        return 1 if self.mtj.state is State.P else 0

    @property
    def complementary(self) -> bool:
        return self.mtj.state is not self.mtj_complement.state

    def store(self, bit: int) -> None:
        """Set states directly (no write dynamics)."""
        s = State.P if bit else State.AP
        self.mtj = self.mtj.with_state(s)
        self.mtj_complement = self.mtj_complement.with_state(s.opposite)


@dataclass
class AccessResult:
    current: float
    energy: float
    delay: float
    node_voltage: float | None = None
    sensed_bit: int | None = None
    switched: tuple[bool, bool] | None = None
    switching_times: tuple[float | None, float | None] | None = None
    write_error: bool = False


def write_path_resistance(cell: MemoryCell, flavor: Flavor) -> float:
    r = cell.write_tg_1.on_resistance + cell.write_tg_2.on_resistance
    if flavor is Flavor.STT:
        return r + cell.mtj.resistance + cell.mtj_complement.resistance
    return r + she_channel_resistance(cell.channel_1) + she_channel_resistance(cell.channel_2)


def write_pair(
    cell: MemoryCell, flavor: Flavor, bit: int, pulse: float, vdd: float, cant: float
) -> AccessResult:
    """Apply one write pulse to ``cell`` in place.

    The current is set by the pre-write path resistance.  A device already in
    its target state sees a reinforcing torque and does not transition.
    """
    r_total = write_path_resistance(cell, flavor)
    current = vdd / r_total
    targets = (State.P, State.AP) if bit else (State.AP, State.P)
    devices = (cell.mtj, cell.mtj_complement)
    channels = (cell.channel_1, cell.channel_2)
    switched, times, new = [], [], []
    error = False
    for dev, target, ch in zip(devices, targets, channels):
        if dev.state is target:
            switched.append(False)
            times.append(None)
            new.append(dev)
            continue
        signed = current if target is State.AP else -current
        t = switching_time(dev, TorqueDrive(flavor, signed, pulse), cant, channel=ch)
        if t is None:
            error = True
            switched.append(False)
            new.append(dev)
        else:
            switched.append(True)
            new.append(dev.with_state(target))
        times.append(t)
    cell.mtj, cell.mtj_complement = new
    delay = max((t for t in times if t is not None), default=0.0)
    return AccessResult(
        current=current,
        energy=current * current * r_total * pulse,
        delay=delay,
        switched=tuple(switched),
        switching_times=tuple(times),
        write_error=error,
    )


def series_tap_voltage(resistances, tap: int, vdd: float) -> float:
    """Voltage below the first ``tap`` resistors of a series chain from vdd to ground."""
    total = sum(resistances)
    return vdd * sum(resistances[tap:]) / total


def read_chain(cell: MemoryCell, pull_up: TransistorParams, pull_down: TransistorParams):
    return [pull_up.on_resistance, cell.mtj.resistance, cell.mtj_complement.resistance, pull_down.on_resistance]


def divider(cell, pull_up, pull_down, vdd) -> tuple[float, float]:
    """(D_i voltage, read current) for the cell's present states."""
    chain = read_chain(cell, pull_up, pull_down)
    return series_tap_voltage(chain, 2, vdd), vdd / sum(chain)


def _stored_copy(cell: MemoryCell, bit: int) -> MemoryCell:
    c = replace(cell)
    c.store(bit)
    return c


def cell_read_margin(cell, pull_up, pull_down, vdd) -> float:
    v1, _ = divider(_stored_copy(cell, 1), pull_up, pull_down, vdd)
    v0, _ = divider(_stored_copy(cell, 0), pull_up, pull_down, vdd)
    return abs(v1 - v0)


def reference_read_margin(cell, pull_up, pull_down, vdd) -> float:
    """Margin of a single-MTJ divider (PR, MTJ, NR) sensed against a mid-level reference.

    The node sits between the MTJ and NR; only the MTJ swings.
    """
    rpu, rpd = pull_up.on_resistance, pull_down.on_resistance
    v = [series_tap_voltage([rpu, r, rpd], 2, vdd) for r in (cell.mtj.r_p, cell.mtj.r_ap)]
    return abs(v[0] - v[1])


def resistor_reference_read_margin(cell, pull_up, pull_down, vdd) -> float:
    """Margin when the complement MTJ is replaced by a fixed (R_P + R_AP)/2 resistor."""
    r_ref = 0.5 * (cell.mtj.r_p + cell.mtj.r_ap)
    rpu, rpd = pull_up.on_resistance, pull_down.on_resistance
    v = [series_tap_voltage([rpu, r, r_ref, rpd], 2, vdd) for r in (cell.mtj.r_p, cell.mtj.r_ap)]
    return abs(v[0] - v[1])


def cell_read_delay(cell, pull_up, pull_down, tech: TechParams) -> float:
    """Inverter delay plus, for a stored 1, the RC time for D_i to rise past the threshold.

    D_i rests at ground between reads, so a stored 0 never has to cross the
    sense threshold.
    """
    v_final, _ = divider(cell, pull_up, pull_down, tech.vdd)
    if cell.bit == 0:
        return tech.inverter_delay
    v_th = tech.sense_threshold
    if v_final <= v_th:
        return math.inf
    chain = read_chain(cell, pull_up, pull_down)
    upper, lower = chain[0] + chain[1], chain[2] + chain[3]
    r_th = upper * lower / (upper + lower) + cell.read_tg.on_resistance
    return tech.inverter_delay + r_th * tech.node_capacitance * math.log(v_final / (v_final - v_th))


# ------------------------------------------------------------------ the LUT


@dataclass
class ClutCircuit:
    cells: list
    flavor: Flavor
    tech: TechParams
    device: DeviceParams
    pull_up: TransistorParams
    pull_down: TransistorParams
    mode: Mode = Mode.SINGLE6
    wwl: bool = False
    rwl: bool = False
    powered: bool = True

    @property
    def s5(self) -> bool:
        return self.mode is Mode.DUAL5

    @property
    def s6(self) -> bool:
        return self.mode is Mode.SINGLE6

    @property
    def vdd(self) -> float:
        return self.tech.vdd if self.powered else 0.0

    def stored_bits(self) -> int:
        return sum(c.bit << i for i, c in enumerate(self.cells))

    def power_down(self) -> None:
        self.powered = False
        self.wwl = self.rwl = False

    def power_up(self) -> None:
        self.powered = True

    def _cell(self, index: int) -> MemoryCell:
        if not 0 <= index < N_CELLS:
            raise CircuitError(f"cell index {index} out of range 0..63")
        return self.cells[index]


def nominal_cell(device: DeviceParams, tech: TechParams, flavor: Flavor) -> MemoryCell:
    width = tech.stt_write_multiplier if flavor is Flavor.STT else tech.she_write_multiplier
    she = flavor is Flavor.SHE
    return MemoryCell(
        mtj=device.mtj(State.AP),
        mtj_complement=device.mtj(State.P),
        write_tg_1=tech.tg(width),
        write_tg_2=tech.tg(width),
        read_tg=tech.tg(1.0),
        channel_1=device.channel if she else None,
        channel_2=device.channel if she else None,
    )


def build_clut(
    config: LutConfig,
    tech: TechParams,
    flavor: Flavor = Flavor.STT,
    device: DeviceParams | None = None,
) -> ClutCircuit:
    """Construct the LUT with every cell written to ``config`` through the write path."""
    from .params import load_device_params

    if device is None:
        device = load_device_params()
    tech.require_calibrated()
    if not isinstance(config, LutConfig):
        raise CircuitError("config must be a LutConfig")
    circuit = ClutCircuit(
        cells=[nominal_cell(device, tech, flavor) for _ in range(N_CELLS)],
        flavor=flavor,
        tech=tech,
        device=device,
        pull_up=tech.pmos(tech.pull_up_multiplier),
        pull_down=tech.nmos(1.0),
        mode=config.mode,
    )
    for i in range(N_CELLS):
        res = write_cell(circuit, i, config.bit(i))
        if res.write_error:
            raise WriteError(f"nominal write of cell {i} failed")
    return circuit


def write_cell(circuit: ClutCircuit, cell_index: int, bit: int, pulse_duration: float | None = None) -> AccessResult:
    cell = circuit._cell(cell_index)
    if bit not in (0, 1):
        raise CircuitError("bit must be 0 or 1")
    if pulse_duration is None:
        pulse_duration = circuit.tech.write_pulse
    circuit.wwl, circuit.rwl = True, False
    try:
        if not circuit.powered:
            return AccessResult(current=0.0, energy=0.0, delay=0.0, switched=(False, False), write_error=cell.bit != bit)
        return write_pair(cell, circuit.flavor, bit, pulse_duration, circuit.vdd, circuit.device.cant)
    finally:
        circuit.wwl = False


def read_node_voltage(circuit: ClutCircuit, cell_index: int) -> float:
    cell = circuit._cell(cell_index)
    v, _ = divider(cell, circuit.pull_up, circuit.pull_down, circuit.vdd) if circuit.powered else (0.0, 0.0)
    return v


def read_current(circuit: ClutCircuit, cell_index: int) -> float:
    cell = circuit._cell(cell_index)
    return divider(cell, circuit.pull_up, circuit.pull_down, circuit.vdd)[1] if circuit.powered else 0.0


def sense(voltage: float, circuit: ClutCircuit | None = None, threshold: float | None = None) -> int:
    """Two-inverter sensing: 1 iff the node is strictly above the threshold (VDD/2 by default)."""
    if threshold is None:
        threshold = circuit.tech.sense_threshold if circuit is not None else 0.5
    return int(voltage > threshold)


def read_margin(circuit: ClutCircuit, cell_index: int) -> float:
    return cell_read_margin(circuit._cell(cell_index), circuit.pull_up, circuit.pull_down, circuit.tech.vdd)


def read_cell(circuit: ClutCircuit, cell_index: int) -> AccessResult:
    circuit.rwl = True
    v = read_node_voltage(circuit, cell_index)
    i = read_current(circuit, cell_index)
    bit = sense(v, circuit)
    return AccessResult(
        current=i,
        energy=read_energy(circuit, bit),
        delay=read_delay(circuit, cell_index),
        node_voltage=v,
        sensed_bit=bit,
    )


def evaluate(circuit: ClutCircuit, inputs, mode: Mode | None = None) -> dict:
    """Sense the cell(s) selected by inputs A..F.

    SINGLE6 returns {"OUT1": bit}.  DUAL5 uses A..E (F is ignored) to select
    within each 32-cell half and returns {"OUT0": low, "OUT2": high}.
    """
    if mode is not None and mode is not circuit.mode:
        raise CircuitError(f"circuit is configured for {circuit.mode.value}, not {mode.value}")
    if circuit.s5 == circuit.s6:
        raise CircuitError("exactly one of S5/S6 must be asserted")
    bits = parse_inputs(inputs)
    circuit.rwl = True
    if circuit.mode is Mode.SINGLE6:
        return {"OUT1": sense(read_node_voltage(circuit, cell_index(bits)), circuit)}
    idx5 = cell_index(bits) >> 1
    return {
        "OUT0": sense(read_node_voltage(circuit, idx5), circuit),
        "OUT2": sense(read_node_voltage(circuit, 32 + idx5), circuit),
    }


def selected_cells(circuit: ClutCircuit, inputs) -> dict:
    idx = cell_index(inputs)
    if circuit.mode is Mode.SINGLE6:
        return {"OUT1": idx}
    return {"OUT0": idx >> 1, "OUT2": 32 + (idx >> 1)}


def read_delay(circuit: ClutCircuit, cell_index: int) -> float:
    circuit.tech.require_calibrated()
    return cell_read_delay(circuit._cell(cell_index), circuit.pull_up, circuit.pull_down, circuit.tech)


# ------------------------------------------------------------------ accounting


def write_power(circuit: ClutCircuit, bit: int = 1) -> float:
    cell = replace(circuit._cell(0))
    cell.store(1 - bit)
    return circuit.tech.vdd * circuit.tech.vdd / write_path_resistance(cell, circuit.flavor)


def write_energy(circuit: ClutCircuit, bit: int = 1) -> float:
    return write_power(circuit, bit) * circuit.tech.write_pulse


def read_energy(circuit: ClutCircuit, bit: int) -> float:
    """Divider conduction over the read-enable time plus output swing for a 1."""
    tech = circuit.tech.require_calibrated()
    cell = _stored_copy(circuit._cell(0), bit)
    _, i_read = divider(cell, circuit.pull_up, circuit.pull_down, tech.vdd)
    return tech.vdd * i_read * tech.read_enable_time + bit * tech.output_load_capacitance * tech.vdd**2


def read_power(circuit: ClutCircuit, bit: int) -> float:
    return read_energy(circuit, bit) / circuit.tech.read_window


@dataclass(frozen=True)
class DeviceCount:
    storage: int
    write_control: int
    read: int
    total_mos_equivalent: int
    mtj_count: int


READ_MOS = 267  # select tree, TGR, PR/NR, output inverters; not itemized
SRAM_COUNTS = (384, 384, 261)


def device_count(architecture: Architecture | str, tech: TechParams | None = None) -> DeviceCount:
    """Device counts in minimum-size transistor equivalents (a kx device counts k)."""
    arch = Architecture(architecture)
    tech = tech or TechParams()
    if arch is Architecture.SRAM_LUT:
        s, w, r = SRAM_COUNTS
        return DeviceCount(s, w, r, s + w + r, 0)
    # 64 cells x 2 write TGs x 2 transistors, plus 256 minimum-size line drivers
    sized = 4 * N_CELLS
    mult = tech.stt_write_multiplier if arch is Architecture.STT_CLUT else tech.she_write_multiplier
    w = int(round(sized * mult)) + 256
    return DeviceCount(0, w, READ_MOS, w + READ_MOS, 2 * N_CELLS)


@dataclass(frozen=True)
class SramBaseline:
    """Published SRAM-LUT figures used as a fixed cost model (not simulated)."""

    read_power: tuple = (2.58e-6, 7.55e-6, 5.06e-6)  # logic 0, logic 1, average
    write_power: tuple = (28.4e-6, 27.7e-6, 25.08e-6)
    standby_power: tuple = (1.5e-6, 1.85e-6, 1.67e-6)
    read_delay: float = 30e-12
    write_delay: float = 20e-12
    read_energy: float = 2.53e-15
    write_energy: float = 14e-15


SRAM = SramBaseline()


def standby_power(target, tech: TechParams | None = None) -> float:
    """Leakage power of an idle LUT.

    ``target`` is a ClutCircuit or an Architecture.  C-LUT leakage is the
    per-device leakage times the minimum-size-equivalent transistor count.
    The SRAM figure is the published average.
    """
    if isinstance(target, ClutCircuit):
        tech = target.tech
        arch = Architecture.STT_CLUT if target.flavor is Flavor.STT else Architecture.SHE_CLUT
    else:
        arch = Architecture(target)
    if arch is Architecture.SRAM_LUT:
        return SRAM.standby_power[2]
    if tech is None:
        from .params import load_tech_params

        tech = load_tech_params()
    tech = tech.require_calibrated()
    return tech.leakage_current * device_count(arch, tech).total_mos_equivalent * tech.vdd


# ------------------------------------------------------------------ transient


@dataclass
class TraceRow:
    time_s: float
    signal: str
    value: float


@dataclass
class Trace:
    rows: list = field(default_factory=list)

    def add(self, t, signal, value):
        self.rows.append(TraceRow(float(t), signal, float(value)))

    def signal(self, name: str) -> list:
        return [(r.time_s, r.value) for r in self.rows if r.signal == name]

    def final(self, name: str) -> float:
        return self.signal(name)[-1][1]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["time_s", "signal", "value"])
            for r in sorted(self.rows, key=lambda r: (r.time_s, r.signal)):
                w.writerow([repr(r.time_s), r.signal, repr(r.value)])


def transient_trace(
    circuit: ClutCircuit,
    config: LutConfig,
    inputs,
    read: bool = True,
    gap: float = 0.2e-9,
    samples: int = 12,
) -> Trace:
    """Event series for writing ``config`` then reading ``inputs``.

    The write pulse asserts WWL for ``tech.write_pulse``.  After ``gap`` RWL
    is asserted (unless ``read`` is False), D_i of each selected cell follows a
    single-pole rise and each output steps to its sensed value after the read
    delay.  Outputs start low.
    """
    tech = circuit.tech.require_calibrated()
    if config.mode is not circuit.mode:
        raise CircuitError("config mode does not match circuit mode")
    tr = Trace()
    pulse = tech.write_pulse
    sel = selected_cells(circuit, inputs)
    tr.add(0.0, "S5", circuit.s5)
    tr.add(0.0, "S6", circuit.s6)
    tr.add(0.0, "RWL", 0)
    tr.add(0.0, "WWL", 1)
    for out, idx in sel.items():
        tr.add(0.0, f"D{idx}", 0.0)
        tr.add(0.0, out, 0)
        tr.add(0.0, f"MTJ{idx}", circuit.cells[idx].mtj.state.mz)
    for i in range(N_CELLS):
        res = write_cell(circuit, i, config.bit(i), pulse)
        if i in sel.values() and res.switched and res.switched[0]:
            tr.add(res.switching_times[0], f"MTJ{i}", circuit.cells[i].mtj.state.mz)
    tr.add(pulse, "WWL", 0)
    t_read = pulse + gap
    end = t_read + tech.read_window
    if not read:
        for out, idx in sel.items():
            tr.add(end, f"D{idx}", 0.0)
            tr.add(end, out, 0)
        return tr
    circuit.rwl = True
    tr.add(t_read, "RWL", 1)
    for out, idx in sel.items():
        cell = circuit.cells[idx]
        v_final, _ = divider(cell, circuit.pull_up, circuit.pull_down, circuit.vdd)
        chain = read_chain(cell, circuit.pull_up, circuit.pull_down)
        upper, lower = chain[0] + chain[1], chain[2] + chain[3]
        tau = (upper * lower / (upper + lower) + cell.read_tg.on_resistance) * tech.node_capacitance
        for k in range(1, samples + 1):
            dt = tech.read_window * k / samples
            tr.add(t_read + dt, f"D{idx}", v_final * (1 - math.exp(-dt / tau)))
        bit = sense(v_final, circuit)
        tr.add(t_read + read_delay(circuit, idx), out, bit)
        tr.add(end, out, bit)
    return tr
