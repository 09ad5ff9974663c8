"""
Two-line element sets: fixed-column parsing, checksum verification and rendering.

Column layout (1-based, inclusive):
    line 1: 3-7 catalog, 8 classification, 10-17 intl designator, 19-20 epoch year, 21-32 epoch day,
            34-43 mean motion dot, 45-52 mean motion ddot (packed), 54-61 bstar (packed),
            63 ephemeris type, 65-68 element set number, 69 checksum
    line 2: 3-7 catalog, 9-16 inclination, 18-25 raan, 27-33 eccentricity (implied decimal),
            35-42 argument of perigee, 44-51 mean anomaly, 53-63 mean motion, 64-68 revolution number,
            69 checksum
"""

from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import List, Tuple
import logging
import math

from fusedock.utils.errors import ChecksumMismatch, BadFieldFormat, LineLength

TLE_LINE_LENGTH = 69

lgr = logging.getLogger("Fuse")


@dataclass(frozen=True)
class TwoLineElements:
    catalog_number: int
    epoch: datetime
    inclination: float  # deg
    raan: float  # deg
    eccentricity: float
    arg_perigee: float  # deg
    mean_anomaly: float  # deg
    mean_motion: float  # rev/day
    bstar: float  # 1/earth radii
    classification: str = "U"
    intl_designator: str = ""
    mean_motion_dot: float = 0.0
    mean_motion_ddot: float = 0.0
    element_set_number: int = 999
    revolution_number: int = 0


def tle_checksum(line: str) -> int:
    """modulo-10 sum over the first 68 columns: digits count their value, '-' counts 1, anything else 0"""
    total = 0
    for c in line[: TLE_LINE_LENGTH - 1]:
        if c.isdigit():
            total += int(c)
        elif c == "-":
            total += 1
    return total % 10


def _field(line: str, start: int, end: int, name: str, cast: type) -> object:
    """1-based inclusive columns"""
    text = line[start - 1 : end]
    try:
        return cast(text.strip())
    except ValueError:
        raise BadFieldFormat(f"cannot parse TLE field {name} from columns {start}-{end}: {text!r}")


def _parse_packed(text: str, name: str) -> float:
    """parses the exponent-packed format, for example ' 34123-4' -> 0.34123e-4"""
    text = text.strip()
    if len(text) == 0:
        return 0.0
    sign = 1.0
    if text[0] in "+-":
        sign = -1.0 if text[0] == "-" else 1.0
        text = text[1:]
    if len(text) < 3 or text[-2] not in "+-" or not text[:-2].isdigit() or not text[-1].isdigit():
        raise BadFieldFormat(f"cannot parse packed TLE field {name}: {text!r}")
    mantissa, exponent = text[:-2], text[-2:]
    return sign * float(f"0.{mantissa}e{exponent}")


def _render_packed(value: float) -> str:
    if value == 0.0:
        return " 00000+0"
    sign = "-" if value < 0 else " "
    exponent = math.floor(math.log10(abs(value))) + 1
    digits = round(abs(value) / 10.0**exponent * 1e5)
    if digits >= 100000:
        digits //= 10
        exponent += 1
    if not -9 <= exponent <= 9:
        raise BadFieldFormat(f"value {value} cannot be packed into a TLE exponent field")
    return f"{sign}{digits:05d}{'-' if exponent < 0 else '+'}{abs(exponent)}"


def _render_decimal_point_field(value: float) -> str:
    """10 characters, for example ' .00001234' or '-.00001234'"""
    sign = "-" if value < 0 else " "
    return sign + f"{abs(value):.8f}"[1:]


def _epoch_from_fields(year2: int, day: float) -> datetime:
    year = 2000 + year2 if year2 < 57 else 1900 + year2
    return datetime(year, 1, 1, tzinfo=timezone.utc) + timedelta(days=day - 1.0)


def _check_line(line: str, number: str) -> str:
    line = line.rstrip("\r\n")
    if len(line) != TLE_LINE_LENGTH:
        raise LineLength(f"TLE line {number} must be {TLE_LINE_LENGTH} characters, got {len(line)}")
    if line[0] != number:
        raise BadFieldFormat(f"expected TLE line number {number}, got {line[0]!r}")
    if not line[-1].isdigit():
        raise BadFieldFormat(f"TLE line {number} checksum column is not a digit: {line[-1]!r}")
    expected = tle_checksum(line)
    if int(line[-1]) != expected:
        raise ChecksumMismatch(
            f"TLE line {number} checksum is {line[-1]} but the columns sum to {expected} (mod 10)"
        )
    return line


def parse_tle(line1: str, line2: str) -> TwoLineElements:
    line1 = _check_line(line1, "1")
    line2 = _check_line(line2, "2")

    catalog_1 = _field(line1, 3, 7, "catalog_number", int)
    catalog_2 = _field(line2, 3, 7, "catalog_number", int)
    if catalog_1 != catalog_2:
        raise BadFieldFormat(f"catalog numbers of the two lines differ: {catalog_1} != {catalog_2}")

    ecc_text = line2[26:33]
    if not ecc_text.strip().isdigit():
        raise BadFieldFormat(f"cannot parse TLE eccentricity field {ecc_text!r}")
    eccentricity = float("0." + ecc_text.strip())

    ndot_text = line1[33:43].strip()
    try:
        mean_motion_dot = float(ndot_text)
    except ValueError:
        raise BadFieldFormat(f"cannot parse TLE mean motion derivative {ndot_text!r}")

    tle = TwoLineElements(
        catalog_number=catalog_1,
        epoch=_epoch_from_fields(
            _field(line1, 19, 20, "epoch_year", int), _field(line1, 21, 32, "epoch_day", float)
        ),
        inclination=_field(line2, 9, 16, "inclination", float),
        raan=_field(line2, 18, 25, "raan", float),
        eccentricity=eccentricity,
        arg_perigee=_field(line2, 35, 42, "arg_perigee", float),
        mean_anomaly=_field(line2, 44, 51, "mean_anomaly", float),
        mean_motion=_field(line2, 53, 63, "mean_motion", float),
        bstar=_parse_packed(line1[53:61], "bstar"),
        classification=line1[7],
        intl_designator=line1[9:17].strip(),
        mean_motion_dot=mean_motion_dot,
        mean_motion_ddot=_parse_packed(line1[44:52], "mean_motion_ddot"),
        element_set_number=_field(line1, 65, 68, "element_set_number", int),
        revolution_number=_field(line2, 64, 68, "revolution_number", int),
    )

    if not 0.0 <= tle.eccentricity < 1.0:
        raise BadFieldFormat(f"eccentricity {tle.eccentricity} outside [0, 1)")
    if not 0.0 <= tle.inclination <= 180.0:
        raise BadFieldFormat(f"inclination {tle.inclination} outside [0, 180] deg")
    if tle.mean_motion <= 0.0:
        raise BadFieldFormat(f"mean motion must be positive, got {tle.mean_motion}")

    return tle


def render_tle(tle: TwoLineElements) -> Tuple[str, str]:
    year_start = datetime(tle.epoch.year, 1, 1, tzinfo=timezone.utc)
    day = (tle.epoch - year_start).total_seconds() / 86400.0 + 1.0

    body1 = (
        f"1 {tle.catalog_number:05d}{tle.classification} {tle.intl_designator:<8.8} "
        f"{tle.epoch.year % 100:02d}{day:012.8f} {_render_decimal_point_field(tle.mean_motion_dot)} "
        f"{_render_packed(tle.mean_motion_ddot)} {_render_packed(tle.bstar)} 0 "
        f"{tle.element_set_number % 10000:4d}"
    )
    ecc_digits = round(tle.eccentricity * 1e7)
    body2 = (
        f"2 {tle.catalog_number:05d} {tle.inclination:8.4f} {tle.raan:8.4f} {ecc_digits:07d} "
        f"{tle.arg_perigee:8.4f} {tle.mean_anomaly:8.4f} {tle.mean_motion:11.8f}"
        f"{tle.revolution_number % 100000:5d}"
    )
    for body in (body1, body2):
        if len(body) != TLE_LINE_LENGTH - 1:
            raise BadFieldFormat(f"rendered TLE line has {len(body) + 1} columns: {body!r}")

    return body1 + str(tle_checksum(body1)), body2 + str(tle_checksum(body2))


def read_tle_file(path: str) -> List[TwoLineElements]:
    """
    Reads all element sets of a text file. Name lines ("0 NAME" or a bare title line) are skipped.
    """
    with open(path, "rt") as f:
        lines = [line.rstrip("\r\n") for line in f if len(line.strip()) > 0]

    ans = []
    i = 0
    while i < len(lines):
        if lines[i].startswith("1 ") and i + 1 < len(lines) and lines[i + 1].startswith("2 "):
            ans.append(parse_tle(lines[i], lines[i + 1]))
            i += 2
        else:
            lgr.debug(f"skipping TLE title line {lines[i]!r}")
            i += 1

    if len(ans) == 0:
        raise BadFieldFormat(f"no two-line element sets found in {path}")
    return ans
