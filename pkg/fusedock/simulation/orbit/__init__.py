from fusedock.simulation.orbit.tle import (
    TwoLineElements,
    parse_tle,
    render_tle,
    read_tle_file,
    tle_checksum,
)
from fusedock.simulation.orbit.propagator import (
    StateVector,
    SpacecraftProperties,
    ForceModel,
    DEFAULT_FORCES,
    TWO_BODY,
    MU_EARTH,
    R_EARTH,
    J2,
    solve_kepler,
    kepler_to_state,
    tle_to_state,
    acceleration,
    propagate,
    specific_energy,
    angular_momentum,
    orbital_period,
    raan_of,
    j2_raan_rate,
)
from fusedock.simulation.orbit.sun import sun_direction, lvlh_attitude, sun_in_lvlh
from fusedock.simulation.orbit.ephemeris import write_ephemeris_csv, ephemeris_table
