"""Compact models for STT/SHE magnetic tunnel junctions and access transistors.

All quantities are SI unless a field name says otherwise.  Geometry is stored
in nanometres because that is how MTJ dimensions are usually quoted; the
``*_m`` helpers convert.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

# physical constants
HBAR = 1.054571817e-34  # J s
Q_E = 1.602176634e-19  # C
MU0 = 1.25663706212e-6  # H/m
GAMMA = 1.76085963023e11  # rad/(s T)

NM = 1e-9


class DeviceError(ValueError):
    """Invalid device parameters (non-positive sizes, out-of-range ratios)."""


class State(enum.Enum):
    """Discrete free-layer state; P is mz = +1 by convention."""

    P = "P"
    AP = "AP"

    @property
    def opposite(self) -> "State":
        return State.AP if self is State.P else State.P

    @property
    def mz(self) -> float:
        return 1.0 if self is State.P else -1.0


def state_from_vector(m) -> State:
    """Collapse a magnetization vector onto P/AP by the sign of mz."""
    return State.P if m[2] > 0 else State.AP


def vector_from_state(state: State, cant: float = 0.0) -> np.ndarray:
    """Unit vector for ``state`` tilted by ``cant`` radians toward +x."""
    return np.array([math.sin(cant), 0.0, state.mz * math.cos(cant)])


@dataclass(frozen=True)
class MtjGeometry:
    length: float  # nm
    width: float  # nm
    free_layer_thickness: float  # nm
    oxide_thickness: float  # nm

    def __post_init__(self):
        for name in ("length", "width", "free_layer_thickness", "oxide_thickness"):
            if not getattr(self, name) > 0:
                raise DeviceError(f"MtjGeometry.{name} must be positive")
        if self.length < self.width:
            raise DeviceError("MtjGeometry.length must be >= width")

    @property
    def area(self) -> float:
        """Junction area in m^2 (rectangular cross-section)."""
        return self.length * self.width * NM * NM

    @property
    def volume(self) -> float:
        """Free-layer volume in m^3."""
        return self.area * self.free_layer_thickness * NM


@dataclass(frozen=True)
class MtjMaterial:
    saturation_magnetization: float  # A/m
    gilbert_damping: float
    tmr_ratio: float
    ra_product: float  # Ohm um^2
    spin_polarization: float
    uniaxial_anisotropy_field: float  # A/m
    # torque efficiency is P*(1 - a) toward AP and P*(1 + a) toward P
    polarization_asymmetry: float = 0.0

    def __post_init__(self):
        if not self.saturation_magnetization > 0:
            raise DeviceError("saturation_magnetization must be positive")
        if not 0 < self.gilbert_damping < 1:
            raise DeviceError("gilbert_damping must lie in (0, 1)")
        if not self.tmr_ratio >= 0:
            raise DeviceError("tmr_ratio must be non-negative")
        if not self.ra_product > 0:
            raise DeviceError("ra_product must be positive")
        if not 0 < self.spin_polarization <= 1:
            raise DeviceError("spin_polarization must lie in (0, 1]")
        if not self.uniaxial_anisotropy_field > 0:
            raise DeviceError("uniaxial_anisotropy_field must be positive")
        if not 0 <= self.polarization_asymmetry < 1:
            raise DeviceError("polarization_asymmetry must lie in [0, 1)")

    def efficiency(self, target: State) -> float:
        """Spin-torque efficiency when the current pushes toward ``target``."""
        a = self.polarization_asymmetry
        if target is State.AP:
            return self.spin_polarization * (1.0 - a)
        return self.spin_polarization * (1.0 + a)


@dataclass(frozen=True)
class SheChannel:
    length: float  # nm, along the charge current
    width: float  # nm
    thickness: float  # nm
    spin_hall_angle: float
    resistivity: float  # Ohm m

    def __post_init__(self):
        if self.length < 0:
            raise DeviceError("SheChannel.length must be non-negative")
        for name in ("width", "thickness", "resistivity"):
            if not getattr(self, name) > 0:
                raise DeviceError(f"SheChannel.{name} must be positive")
        if not 0 <= self.spin_hall_angle < 1:
            raise DeviceError("spin_hall_angle must lie in [0, 1)")

    @property
    def cross_section(self) -> float:
        return self.width * self.thickness * NM * NM


class TransistorKind(enum.Enum):
    NMOS = "NMOS"
    PMOS = "PMOS"
    TG = "TG-pair"


@dataclass(frozen=True)
class TransistorParams:
    kind: TransistorKind
    width_multiplier: float
    threshold_voltage: float  # V, magnitude
    on_resistance_at_min_size: float  # Ohm
    leakage_current: float  # A at minimum size

    def __post_init__(self):
        if not self.width_multiplier >= 1:
            raise DeviceError("width_multiplier must be >= 1")
        if not self.on_resistance_at_min_size >= 0:
            raise DeviceError("on_resistance_at_min_size must be non-negative")

    @property
    def on_resistance(self) -> float:
        return self.on_resistance_at_min_size / self.width_multiplier

    @property
    def leakage(self) -> float:
        return self.leakage_current * self.width_multiplier

    def sized(self, width_multiplier: float) -> "TransistorParams":
        return replace(self, width_multiplier=width_multiplier)


@dataclass(frozen=True)
class MtjDevice:
    """An MTJ with its current discrete state."""

    geometry: MtjGeometry
    material: MtjMaterial
    state: State = State.P

    @property
    def r_p(self) -> float:
        return mtj_resistance(self.geometry, self.material, State.P)

    @property
    def r_ap(self) -> float:
        return mtj_resistance(self.geometry, self.material, State.AP)

    @property
    def resistance(self) -> float:
        return mtj_resistance(self.geometry, self.material, self.state)

    def with_state(self, state: State) -> "MtjDevice":
        return replace(self, state=state)


def mtj_resistance(geometry: MtjGeometry, material: MtjMaterial, state: State) -> float:
    """Junction resistance in Ohm: RA/area for P, scaled by (1 + TMR) for AP."""
    area_um2 = geometry.length * geometry.width * 1e-6
    if not area_um2 > 0:
        raise DeviceError("MTJ area must be positive")
    r_p = material.ra_product / area_um2
    if state is State.AP:
        return r_p * (1.0 + material.tmr_ratio)
    return r_p


def spin_critical_current(geometry: MtjGeometry, material: MtjMaterial) -> float:
    """Spin current (A, unit efficiency) at which damping is exactly compensated."""
    return (
        2.0 * Q_E / HBAR
        * material.gilbert_damping
        * MU0 * material.saturation_magnetization
        * material.uniaxial_anisotropy_field
        * geometry.volume
    )


def stt_critical_current(
    geometry: MtjGeometry, material: MtjMaterial, target: State | None = None
) -> float:
    """Slonczewski threshold current of the MTJ stack.

    ``target`` picks the write direction (the state being written).  With no
    target the lower of the two thresholds is returned, which is the one that
    bounds read disturb.
    """
    if target is None:
        return min(stt_critical_current(geometry, material, s) for s in State)
    return spin_critical_current(geometry, material) / material.efficiency(target)


def she_spin_gain(geometry: MtjGeometry, channel: SheChannel) -> float:
    """Spin current injected into the free layer per unit channel charge current."""
    return channel.spin_hall_angle * geometry.area / channel.cross_section


def she_critical_current(
    geometry: MtjGeometry, material: MtjMaterial, channel: SheChannel
) -> float:
    """Charge current through the heavy-metal channel needed to switch."""
    if channel.spin_hall_angle <= 0:
        raise DeviceError("spin_hall_angle must be positive for SHE switching")
    return spin_critical_current(geometry, material) / she_spin_gain(geometry, channel)


def she_channel_resistance(channel: SheChannel) -> float:
    return channel.resistivity * channel.length * NM / channel.cross_section
