"""Device and technology parameter bundles and their flat key/value files.

Both files are flat JSON objects (one number per key, SI units unless the key
says ``_nm`` or ``_deg``).  Loaders reject unknown or missing keys and name
the offending key in the error.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace
from importlib import resources
from pathlib import Path

from .devices import (
    DeviceError,
    MtjDevice,
    MtjGeometry,
    MtjMaterial,
    SheChannel,
    State,
    TransistorKind,
    TransistorParams,
)


class ParamError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


class MissingCalibration(RuntimeError):
    pass


@dataclass(frozen=True)
class DeviceParams:
    geometry: MtjGeometry
    material: MtjMaterial
    channel: SheChannel
    cant: float  # rad

    def mtj(self, state: State = State.P) -> MtjDevice:
        return MtjDevice(self.geometry, self.material, state)


@dataclass(frozen=True)
class TechParams:
    node: str = "45nm"
    vdd: float = 1.1
    nmos_vth: float = 0.40
    pmos_vth: float = 0.40
    pmos_to_nmos_resistance: float = 2.0
    pull_up_multiplier: float = 2.0  # PR sized to match NR
    stt_write_multiplier: float = 4.0
    she_write_multiplier: float = 1.0
    write_pulse: float = 2e-9
    read_window: float = 0.5e-9
    sense_fraction: float = 0.5
    min_read_margin: float = 0.05  # V
    read_hold: float = 20e-9
    # fitted by calibration
    nmos_on_resistance: float | None = None
    leakage_current: float | None = None
    node_capacitance: float | None = None
    inverter_delay: float | None = None
    output_load_capacitance: float | None = None
    read_enable_time: float | None = None

    CALIBRATED = (
        "nmos_on_resistance",
        "leakage_current",
        "node_capacitance",
        "inverter_delay",
        "output_load_capacitance",
        "read_enable_time",
    )

    def require_calibrated(self) -> "TechParams":
        missing = [k for k in self.CALIBRATED if getattr(self, k) is None]
        if missing:
            raise MissingCalibration(
                "technology parameters lack calibrated values for "
                + ", ".join(missing)
                + "; run `clut calibrate` first"
            )
        return self

    @property
    def pmos_on_resistance(self) -> float:
        return self.nmos_on_resistance * self.pmos_to_nmos_resistance

    @property
    def sense_threshold(self) -> float:
        return self.sense_fraction * self.vdd

    def nmos(self, width: float = 1.0) -> TransistorParams:
        return TransistorParams(
            TransistorKind.NMOS, width, self.nmos_vth, self.nmos_on_resistance, self.leakage_current or 0.0
        )

    def pmos(self, width: float = 1.0) -> TransistorParams:
        return TransistorParams(
            TransistorKind.PMOS, width, self.pmos_vth, self.pmos_on_resistance, self.leakage_current or 0.0
        )

    def tg(self, width: float = 1.0) -> TransistorParams:
        rn, rp = self.nmos_on_resistance, self.pmos_on_resistance
        return TransistorParams(
            TransistorKind.TG, width, self.nmos_vth, rn * rp / (rn + rp), 2 * (self.leakage_current or 0.0)
        )


# ------------------------------------------------------------------ device I/O

_DEVICE_KEYS = {
    "mtj_length_nm": ("geometry", "length"),
    "mtj_width_nm": ("geometry", "width"),
    "free_layer_thickness_nm": ("geometry", "free_layer_thickness"),
    "oxide_thickness_nm": ("geometry", "oxide_thickness"),
    "saturation_magnetization": ("material", "saturation_magnetization"),
    "gilbert_damping": ("material", "gilbert_damping"),
    "tmr_ratio": ("material", "tmr_ratio"),
    "ra_product": ("material", "ra_product"),
    "spin_polarization": ("material", "spin_polarization"),
    "uniaxial_anisotropy_field": ("material", "uniaxial_anisotropy_field"),
    "polarization_asymmetry": ("material", "polarization_asymmetry"),
    "she_length_nm": ("channel", "length"),
    "she_width_nm": ("channel", "width"),
    "she_thickness_nm": ("channel", "thickness"),
    "spin_hall_angle": ("channel", "spin_hall_angle"),
    "she_resistivity": ("channel", "resistivity"),
    "initial_cant_deg": (None, "cant"),
}


def _number(key, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ParamError(key, f"expected a finite number, got {value!r}")
    return float(value)


def device_params_from_dict(data: dict) -> DeviceParams:
    unknown = sorted(set(data) - set(_DEVICE_KEYS))
    if unknown:
        raise ParamError(unknown[0], "unknown key")
    missing = sorted(set(_DEVICE_KEYS) - set(data))
    if missing:
        raise ParamError(missing[0], "missing key")
    parts = {"geometry": {}, "material": {}, "channel": {}}
    for key, (group, name) in _DEVICE_KEYS.items():
        if group is not None:
            parts[group][name] = _number(key, data[key])
    builders = {"geometry": MtjGeometry, "material": MtjMaterial, "channel": SheChannel}
    built = {}
    for group, kwargs in parts.items():
        try:
            built[group] = builders[group](**kwargs)
        except DeviceError as exc:
            key = next(
                (k for k, (g, n) in _DEVICE_KEYS.items() if g == group and n in str(exc)), group
            )
            raise ParamError(key, str(exc)) from None
    cant = _number("initial_cant_deg", data["initial_cant_deg"])
    if not 0 < cant < 90:
        raise ParamError("initial_cant_deg", "must lie in (0, 90)")
    return DeviceParams(cant=math.radians(cant), **built)


def device_params_to_dict(p: DeviceParams) -> dict:
    out = {}
    for key, (group, name) in _DEVICE_KEYS.items():
        if group is None:
            out[key] = math.degrees(p.cant)
        else:
            out[key] = getattr(getattr(p, group), name)
    return out


_TECH_FIELDS = {f.name for f in fields(TechParams)}


def tech_params_from_dict(data: dict) -> TechParams:
    unknown = sorted(set(data) - _TECH_FIELDS)
    if unknown:
        raise ParamError(unknown[0], "unknown key")
    kwargs = {}
    for key, value in data.items():
        if key == "node":
            if not isinstance(value, str):
                raise ParamError(key, "expected a string")
            kwargs[key] = value
        elif value is None:
            kwargs[key] = None
        else:
            kwargs[key] = _number(key, value)
    tech = TechParams(**kwargs)
    positive = [k for k in _TECH_FIELDS if k not in ("node",)]
    for key in sorted(positive):
        v = getattr(tech, key)
        if v is not None and not v > 0:
            raise ParamError(key, "must be positive")
    if not 0 < tech.sense_fraction < 1:
        raise ParamError("sense_fraction", "must lie in (0, 1)")
    for key in ("nmos_vth", "pmos_vth"):
        if not getattr(tech, key) < tech.vdd:
            raise ParamError(key, "must be below vdd")
    for key in ("stt_write_multiplier", "she_write_multiplier", "pull_up_multiplier"):
        if getattr(tech, key) < 1:
            raise ParamError(key, "must be >= 1")
    return tech


def tech_params_to_dict(t: TechParams) -> dict:
    return asdict(t)


def _dump(data: dict, path) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _read(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParamError(str(path), f"not a JSON key/value document ({exc})") from None
    if not isinstance(data, dict):
        raise ParamError(str(path), "expected a flat key/value object")
    return data


def load_device_params(path=None) -> DeviceParams:
    if path is None:
        return device_params_from_dict(json.loads(_default_text("device.json")))
    return device_params_from_dict(_read(path))


def save_device_params(p: DeviceParams, path) -> None:
    _dump(device_params_to_dict(p), path)


def load_tech_params(path=None) -> TechParams:
    if path is None:
        return tech_params_from_dict(json.loads(_default_text("tech.json")))
    return tech_params_from_dict(_read(path))


def save_tech_params(t: TechParams, path) -> None:
    _dump(tech_params_to_dict(t), path)


def _default_text(name: str) -> str:
    return resources.files("clut.data").joinpath(name).read_text()


# Pre-calibration starting point.  Electrical fields (RA) and the dynamics
# fields are overwritten by ``calibration.calibrate``.
SEED_DEVICE = DeviceParams(
    geometry=MtjGeometry(length=32.0, width=16.0, free_layer_thickness=0.75, oxide_thickness=0.85),
    material=MtjMaterial(
        saturation_magnetization=1.0e6,
        gilbert_damping=0.05,
        tmr_ratio=1.2,
        ra_product=2.0,
        spin_polarization=0.6,
        uniaxial_anisotropy_field=4.0e5,
    ),
    channel=SheChannel(length=200.0, width=32.0, thickness=4.0, spin_hall_angle=0.12, resistivity=190e-8),
    cant=math.radians(5.0),
)

SEED_TECH = TechParams()


def with_material(p: DeviceParams, **changes) -> DeviceParams:
    return replace(p, material=replace(p.material, **changes))
