"""Macrospin switching dynamics for STT and SHE driven free layers.

The free layer has a uniaxial easy axis along z and is driven by a
damping-like spin torque whose polarization is collinear with that axis.
Two routes compute the time at which mz crosses zero:

* :func:`integrate_llg` steps the full 3-D Landau-Lifshitz-Gilbert equation
  with a fixed-step RK4 scheme (reference path);
* :func:`analytic_switching_time` integrates the reduced polar-angle equation
  in closed form (fast path).

Because the torque and the anisotropy share an axis the polar angle obeys

    (1 + alpha^2) dtheta/dt = gamma mu0 sin(theta) (a_J - alpha Hk cos(theta))

which integrates exactly by partial fractions in u = cos(theta).
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import differential_evolution

from .devices import (
    GAMMA,
    HBAR,
    MU0,
    Q_E,
    MtjDevice,
    MtjMaterial,
    SheChannel,
    State,
    she_spin_gain,
    spin_critical_current,
    vector_from_state,
)

DEFAULT_CANT = math.radians(5.0)
DEFAULT_DT = 1e-12


class Mechanism(enum.Enum):
    STT = "STT"
    SHE = "SHE"


@dataclass(frozen=True)
class TorqueDrive:
    """A rectangular current pulse.

    ``charge_current`` is signed relative to the device: positive pushes the
    free layer toward AP, negative toward P.  For SHE it is the channel
    current.
    """

    mechanism: Mechanism
    charge_current: float
    pulse_duration: float

    def __post_init__(self):
        if not self.pulse_duration > 0:
            raise ValueError("pulse_duration must be positive")

    @property
    def target(self) -> State:
        return State.AP if self.charge_current > 0 else State.P


@dataclass
class Trajectory:
    times: np.ndarray
    m: np.ndarray  # (n, 3)
    switching_event: float | None

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["time_s", "mx", "my", "mz"])
            for t, (mx, my, mz) in zip(self.times, self.m):
                w.writerow([repr(float(t)), repr(float(mx)), repr(float(my)), repr(float(mz))])


def torque_field(
    device: MtjDevice, drive: TorqueDrive, channel: SheChannel | None = None
) -> float:
    """Damping-like torque amplitude a_J in A/m (always >= 0)."""
    mat = device.material
    current = abs(drive.charge_current)
    if drive.mechanism is Mechanism.STT:
        spin_current = current * mat.efficiency(drive.target)
    else:
        if channel is None:
            raise ValueError("SHE drive needs a channel")
        spin_current = current * she_spin_gain(device.geometry, channel)
    return HBAR * spin_current / (2 * Q_E * MU0 * mat.saturation_magnetization * device.geometry.volume)


def overdrive(device: MtjDevice, drive: TorqueDrive, channel: SheChannel | None = None) -> float:
    """Ratio of the applied torque to the damping threshold (I / Ic)."""
    mat = device.material
    return torque_field(device, drive, channel) / (mat.gilbert_damping * mat.uniaxial_anisotropy_field)


def _llg_rhs(m, hk, alpha, a_j, p):
    gp = GAMMA * MU0
    h = np.array([0.0, 0.0, hk * m[2]])
    mxh = np.cross(m, h)
    mxp = np.cross(m, p)
    dm = -gp * mxh - alpha * gp * np.cross(m, mxh) - gp * a_j * np.cross(m, mxp) + alpha * gp * a_j * mxp
    return dm / (1.0 + alpha * alpha)


def integrate_llg(
    initial,
    drive: TorqueDrive,
    device: MtjDevice,
    dt: float = DEFAULT_DT,
    t_max: float | None = None,
    channel: SheChannel | None = None,
) -> Trajectory:
    """Fixed-step RK4 integration of the macrospin LLG equation.

    The drive is on for ``drive.pulse_duration`` and off afterwards.  The
    first sign change of mz is located by linear interpolation between steps.
    """
    if t_max is None:
        t_max = drive.pulse_duration
    if not dt > 0 or dt >= t_max:
        raise ValueError("need 0 < dt < t_max")
    m = np.asarray(initial, dtype=float)
    if abs(np.linalg.norm(m) - 1.0) > 1e-6:
        raise ValueError("initial magnetization must be a unit vector")
    m = m / np.linalg.norm(m)

    mat = device.material
    hk, alpha = mat.uniaxial_anisotropy_field, mat.gilbert_damping
    a_on = torque_field(device, drive, channel) if drive.charge_current != 0 else 0.0
    p = np.array([0.0, 0.0, drive.target.mz])

    n = int(round(t_max / dt))
    times = np.arange(n + 1) * dt
    out = np.empty((n + 1, 3))
    out[0] = m
    start_sign = math.copysign(1.0, m[2]) if m[2] != 0 else 0.0
    event = None
    for i in range(n):
        a_j = a_on if times[i] < drive.pulse_duration else 0.0
        k1 = _llg_rhs(m, hk, alpha, a_j, p)
        k2 = _llg_rhs(m + 0.5 * dt * k1, hk, alpha, a_j, p)
        k3 = _llg_rhs(m + 0.5 * dt * k2, hk, alpha, a_j, p)
        k4 = _llg_rhs(m + dt * k3, hk, alpha, a_j, p)
        m_new = m + dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        m_new /= np.linalg.norm(m_new)
        if event is None and start_sign != 0 and m_new[2] * start_sign <= 0:
            frac = m[2] / (m[2] - m_new[2])
            event = times[i] + frac * dt
        m = m_new
        out[i + 1] = m
    return Trajectory(times=times, m=out, switching_event=event)


def crossing_integral(x: float, cant: float) -> float:
    """Closed form of int_{cant}^{pi/2} dtheta / (sin(theta) (x - cos(theta))), x > 1."""
    u0 = math.cos(cant)
    a = 0.5 / (x - 1.0)
    b = 0.5 / (x + 1.0)
    c = 1.0 / (1.0 - x * x)
    return -a * math.log1p(-u0) + b * math.log1p(u0) - c * math.log((x - u0) / x)


def analytic_switching_time(
    device: MtjDevice,
    drive: TorqueDrive,
    cant: float = DEFAULT_CANT,
    channel: SheChannel | None = None,
) -> float | None:
    """Time for mz to cross zero without a pulse cutoff; None when sub-threshold."""
    x = overdrive(device, drive, channel)
    if x <= 1.0:
        return None
    mat = device.material
    prefactor = (1 + mat.gilbert_damping**2) / (
        GAMMA * MU0 * mat.gilbert_damping * mat.uniaxial_anisotropy_field
    )
    return prefactor * crossing_integral(x, cant)


def switching_time(
    device: MtjDevice,
    drive: TorqueDrive,
    cant: float = DEFAULT_CANT,
    channel: SheChannel | None = None,
    method: str = "analytic",
    dt: float = DEFAULT_DT,
) -> float | None:
    """Crossing time if the device switches within the pulse, else None.

    ``device.state`` is the starting state.  A drive that pushes toward the
    state already held, or that does not exceed the damping threshold, never
    switches: the cant only seeds the instability, it is not an equilibrium.
    """
    if drive.target is device.state or drive.charge_current == 0:
        return None
    if overdrive(device, drive, channel) <= 1.0:
        return None
    if method == "analytic":
        t = analytic_switching_time(device, drive, cant, channel)
    elif method == "llg":
        traj = integrate_llg(
            vector_from_state(device.state, cant), drive, device, dt=dt,
            t_max=drive.pulse_duration, channel=channel,
        )
        t = traj.switching_event
    else:
        raise ValueError(f"unknown method {method!r}")
    if t is None or t > drive.pulse_duration:
        return None
    return t


# ---------------------------------------------------------------- calibration


class CalibrationError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (best residual {residual:.3g})")
        self.residual = residual


@dataclass(frozen=True)
class CalibrationTargets:
    t_p_ap: float = 1.63e-9
    t_ap_p: float = 1.13e-9
    i_write: float = 71.13e-6
    i_read: float = 38.21e-6
    pulse: float = 2e-9


@dataclass(frozen=True)
class DynamicsFit:
    material: MtjMaterial
    cant: float
    residual: float  # max relative error of the two switching times

    @property
    def cant_deg(self) -> float:
        return math.degrees(self.cant)


# search box: log10 Hk [A/m], asymmetry, cant [deg], log10 damping
SEARCH_BOUNDS = [(4.0, 7.0), (0.0, 0.6), (1.0, 20.0), (-3.0, -0.5)]


def _fit_material(base: MtjMaterial, v) -> tuple[MtjMaterial, float]:
    mat = replace(
        base,
        uniaxial_anisotropy_field=float(10 ** v[0]),
        polarization_asymmetry=float(v[1]),
        gilbert_damping=float(10 ** v[3]),
    )
    return mat, math.radians(float(v[2]))


def calibrate_dynamics(
    targets: CalibrationTargets,
    device: MtjDevice,
    *,
    read_disturb_margin: float = 1.25,
    prior_cant: float = DEFAULT_CANT,
    seed: int = 0,
    tolerance: float = 0.05,
) -> DynamicsFit:
    """Fit anisotropy, damping, torque asymmetry and cant to two switching times.

    Both switching times are matched at ``targets.i_write``; the lower
    directional threshold is held at least ``read_disturb_margin`` times
    ``targets.i_read``.  The system is underdetermined, so a weak prior keeps
    the cant near ``prior_cant`` and the damping near ``device``'s value.
    """
    if min(targets.t_p_ap, targets.t_ap_p, targets.i_write, targets.i_read) <= 0:
        raise ValueError("calibration targets must be positive")
    geom = device.geometry
    base = device.material
    alpha0 = base.gilbert_damping

    def residuals(v):
        mat, cant = _fit_material(base, v)
        dev = MtjDevice(geom, mat)
        out = []
        for start, t_target, sign in ((State.P, targets.t_p_ap, 1.0), (State.AP, targets.t_ap_p, -1.0)):
            drive = TorqueDrive(Mechanism.STT, sign * targets.i_write, 1.0)
            t = analytic_switching_time(dev.with_state(start), drive, cant)
            out.append(math.log(t / t_target) if t is not None else 10.0)
        ic_min = min(spin_critical_current(geom, mat) / mat.efficiency(s) for s in State)
        out.append(max(0.0, math.log(read_disturb_margin * targets.i_read / ic_min)))
        return out, mat, cant

    def objective(v):
        r, mat, cant = residuals(v)
        prior = (math.log(mat.gilbert_damping / alpha0)) ** 2 + ((cant - prior_cant) / prior_cant) ** 2
        return sum(x * x for x in r) + 1e-8 * prior

    result = differential_evolution(
        objective, SEARCH_BOUNDS, seed=seed, tol=1e-12, atol=1e-16,
        maxiter=3000, popsize=20, polish=True,
    )
    r, mat, cant = residuals(result.x)
    worst = max(abs(math.expm1(x)) for x in r[:2])
    if worst > tolerance or r[2] > 1e-6:
        raise CalibrationError("no parameter set reproduces the targets", max(worst, r[2]))
    dev = MtjDevice(geom, mat)
    for start, sign in ((State.P, 1.0), (State.AP, -1.0)):
        drive = TorqueDrive(Mechanism.STT, sign * targets.i_write, targets.pulse)
        if switching_time(dev.with_state(start), drive, cant) is None:
            raise CalibrationError("fitted device does not switch within the pulse", worst)
    return DynamicsFit(material=mat, cant=cant, residual=worst)
