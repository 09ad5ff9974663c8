"""
Translational orbit propagation of the target vehicle: two-body gravity, J2 oblateness and
exponential-atmosphere drag, integrated with a fixed-step RK4.

Units: km, km/s, s. Drag inputs (area, density) are SI and converted internally.
TLE mean elements are used as if they were osculating elements at epoch (no SGP4).
"""

from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import List, Optional, Tuple
import logging
import math

import numpy as np
from scipy.spatial.transform import Rotation

from fusedock.utils.errors import BelowSurface, KeplerNonConvergence, ConfigInvalid
from fusedock.simulation.orbit.tle import TwoLineElements

MU_EARTH = 398600.4418  # km^3/s^2
R_EARTH = 6378.137  # km
J2 = 1.08262668e-3
OMEGA_EARTH = 7.2921159e-5  # rad/s

# single segment exponential atmosphere
RHO_0 = 3.614e-13  # kg/m^3
H_0 = 700.0  # km
SCALE_HEIGHT = 88.667  # km

KEPLER_TOL = 1e-12
KEPLER_MAX_ITER = 50

lgr = logging.getLogger("Fuse")


@dataclass(frozen=True)
class StateVector:
    position: np.ndarray  # km, ECI
    velocity: np.ndarray  # km/s, ECI
    epoch: datetime

    def __post_init__(self) -> None:
        for name in ("position", "velocity"):
            value = np.array(getattr(self, name), dtype=np.float64).reshape(3)
            value.setflags(write=False)
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class SpacecraftProperties:
    mass: float = 400000.0  # kg
    drag_area: float = 1500.0  # m^2
    drag_coefficient: float = 2.2

    def __post_init__(self) -> None:
        if min(self.mass, self.drag_area, self.drag_coefficient) <= 0:
            raise ConfigInvalid(f"spacecraft properties must be strictly positive: {self}")


@dataclass(frozen=True)
class ForceModel:
    j2: bool = True
    drag: bool = True


DEFAULT_FORCES = ForceModel()
TWO_BODY = ForceModel(j2=False, drag=False)


def solve_kepler(mean_anomaly: float, eccentricity: float) -> float:
    """
    Newton iteration on E - e*sin(E) = M
    :return: eccentric anomaly [rad]
    """
    E = mean_anomaly if eccentricity < 0.8 else math.pi
    for _ in range(KEPLER_MAX_ITER):
        f = E - eccentricity * math.sin(E) - mean_anomaly
        step = f / (1.0 - eccentricity * math.cos(E))
        E -= step
        if abs(step) < KEPLER_TOL:
            return E
    raise KeplerNonConvergence(
        f"Kepler equation did not converge within {KEPLER_MAX_ITER} iterations (M={mean_anomaly}, e={eccentricity})"
    )


def kepler_to_state(
    semi_major_axis: float,
    eccentricity: float,
    inclination: float,
    raan: float,
    arg_perigee: float,
    mean_anomaly: float,
    epoch: datetime,
) -> StateVector:
    """
    Classical elements (km, angles in deg) to ECI position/velocity
    """
    E = solve_kepler(math.radians(mean_anomaly), eccentricity)
    nu = 2.0 * math.atan2(
        math.sqrt(1.0 + eccentricity) * math.sin(E / 2.0),
        math.sqrt(1.0 - eccentricity) * math.cos(E / 2.0),
    )
    p = semi_major_axis * (1.0 - eccentricity**2)
    r = semi_major_axis * (1.0 - eccentricity * math.cos(E))

    r_pf = np.array([r * math.cos(nu), r * math.sin(nu), 0.0])
    v_pf = math.sqrt(MU_EARTH / p) * np.array([-math.sin(nu), eccentricity + math.cos(nu), 0.0])

    # perifocal -> ECI: Rz(raan) Rx(i) Rz(argp)
    pf_to_eci = Rotation.from_euler(
        "ZXZ", [raan, inclination, arg_perigee], degrees=True
    ).as_matrix()
    return StateVector(position=pf_to_eci @ r_pf, velocity=pf_to_eci @ v_pf, epoch=epoch)


def tle_to_state(tle: TwoLineElements) -> StateVector:
    n = tle.mean_motion * 2.0 * math.pi / 86400.0  # rad/s
    semi_major_axis = (MU_EARTH / n**2) ** (1.0 / 3.0)
    return kepler_to_state(
        semi_major_axis,
        tle.eccentricity,
        tle.inclination,
        tle.raan,
        tle.arg_perigee,
        tle.mean_anomaly,
        tle.epoch,
    )


def atmosphere_density(altitude: float) -> float:
    """kg/m^3 at altitude [km]"""
    return RHO_0 * math.exp(-(altitude - H_0) / SCALE_HEIGHT)


def _acceleration(
    r: np.ndarray,
    v: np.ndarray,
    props: Optional[SpacecraftProperties],
    forces: ForceModel,
) -> np.ndarray:
    r_norm = math.sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2])
    if r_norm <= R_EARTH:
        raise BelowSurface(f"position radius {r_norm:.3f} km is below the Earth surface")

    acc = -MU_EARTH * r / r_norm**3

    if forces.j2:
        z2 = (r[2] / r_norm) ** 2
        factor = -1.5 * J2 * MU_EARTH * R_EARTH**2 / r_norm**5
        acc = acc + factor * np.array(
            [(1.0 - 5.0 * z2) * r[0], (1.0 - 5.0 * z2) * r[1], (3.0 - 5.0 * z2) * r[2]]
        )

    if forces.drag:
        if props is None:
            raise Exception("spacecraft properties are required when drag is enabled")
        v_rel = v - np.cross([0.0, 0.0, OMEGA_EARTH], r)
        v_rel_m = v_rel * 1000.0
        rho = atmosphere_density(r_norm - R_EARTH)
        a_drag = (
            -0.5
            * rho
            * np.linalg.norm(v_rel_m)
            * v_rel_m
            * props.drag_coefficient
            * props.drag_area
            / props.mass
        )
        acc = acc + a_drag / 1000.0

    return acc


def acceleration(
    state: StateVector,
    props: Optional[SpacecraftProperties],
    forces: ForceModel = DEFAULT_FORCES,
) -> np.ndarray:
    """total acceleration [km/s^2]"""
    return _acceleration(state.position, state.velocity, props, forces)


def _rk4_step(
    r: np.ndarray,
    v: np.ndarray,
    dt: float,
    props: Optional[SpacecraftProperties],
    forces: ForceModel,
) -> Tuple[np.ndarray, np.ndarray]:
    k1_r, k1_v = v, _acceleration(r, v, props, forces)
    k2_r, k2_v = v + 0.5 * dt * k1_v, _acceleration(r + 0.5 * dt * k1_r, v + 0.5 * dt * k1_v, props, forces)
    k3_r, k3_v = v + 0.5 * dt * k2_v, _acceleration(r + 0.5 * dt * k2_r, v + 0.5 * dt * k2_v, props, forces)
    k4_r, k4_v = v + dt * k3_v, _acceleration(r + dt * k3_r, v + dt * k3_v, props, forces)
    r_next = r + dt / 6.0 * (k1_r + 2.0 * k2_r + 2.0 * k3_r + k4_r)
    v_next = v + dt / 6.0 * (k1_v + 2.0 * k2_v + 2.0 * k3_v + k4_v)
    return r_next, v_next


def propagate(
    state: StateVector,
    props: Optional[SpacecraftProperties],
    dt: float,
    duration: float,
    forces: ForceModel = DEFAULT_FORCES,
    verbose: int = 0,
) -> List[StateVector]:
    """
    Fixed step RK4.
    :return: states every dt from the initial state up to and including t=duration
    """
    if dt <= 0 or duration < dt:
        raise ConfigInvalid(f"propagation requires dt > 0 and duration >= dt (dt={dt}, duration={duration})")

    steps = int(math.floor(duration / dt + 1e-9))
    r, v = np.array(state.position), np.array(state.velocity)
    _acceleration(r, v, props, forces)  # surface check of the initial state

    ans = [state]
    for k in range(1, steps + 1):
        r, v = _rk4_step(r, v, dt, props, forces)
        ans.append(StateVector(r, v, state.epoch + timedelta(seconds=k * dt)))
        if verbose > 0 and k % 10000 == 0:
            lgr.info(f"propagate: {k}/{steps} steps")

    return ans


def specific_energy(state: StateVector) -> float:
    """½v² − μ/r [km^2/s^2]"""
    return 0.5 * float(np.dot(state.velocity, state.velocity)) - MU_EARTH / float(
        np.linalg.norm(state.position)
    )


def angular_momentum(state: StateVector) -> np.ndarray:
    return np.cross(state.position, state.velocity)


def orbital_period(semi_major_axis: float) -> float:
    return 2.0 * math.pi * math.sqrt(semi_major_axis**3 / MU_EARTH)


def raan_of(state: StateVector) -> float:
    """right ascension of the ascending node [rad] from the angular momentum vector"""
    h = angular_momentum(state)
    return math.atan2(h[0], -h[1])


def j2_raan_rate(semi_major_axis: float, eccentricity: float, inclination: float) -> float:
    """secular node regression −(3/2)·J2·(R_E/p)²·n·cos(i) [rad/s]"""
    n = math.sqrt(MU_EARTH / semi_major_axis**3)
    p = semi_major_axis * (1.0 - eccentricity**2)
    return -1.5 * J2 * (R_EARTH / p) ** 2 * n * math.cos(math.radians(inclination))

