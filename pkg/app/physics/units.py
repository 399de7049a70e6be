"""Unit handling.

Everything inside the package is SI with angular frequencies (rad/s). Input and
output use the units below; conversion is a single multiplication by the scale
factor, so a round trip is exact to one ulp.
"""

import math
from typing import Dict

from scipy.constants import angstrom, elementary_charge

from app.exceptions import SweepSpecError

TWO_PI = 2.0 * math.pi

# unit name -> (SI scale factor, SI unit, quantity)
_KNOWN_UNITS: Dict[str, tuple] = {
    # frequency
    "Hz": (TWO_PI, "rad/s", "frequency"),
    "rad/s": (1.0, "rad/s", "frequency"),
    # wavenumber
    "1/Å": (1.0 / angstrom, "1/m", "wavenumber"),
    "1/A": (1.0 / angstrom, "1/m", "wavenumber"),
    "1/m": (1.0, "1/m", "wavenumber"),
    # angle
    "rad": (1.0, "rad", "angle"),
    "deg": (math.pi / 180.0, "rad", "angle"),
    # dipole moment
    "eA": (elementary_charge * angstrom, "C m", "dipole"),
    "C m": (1.0, "C m", "dipole"),
    # length
    "m": (1.0, "m", "length"),
    "um": (1e-6, "m", "length"),
    "Å": (angstrom, "m", "length"),
}


def get_scale_factor(units: str) -> float:
    """Return the factor that converts a value in ``units`` to SI."""
    if units in _KNOWN_UNITS:
        return _KNOWN_UNITS[units][0]
    raise SweepSpecError(f"Unknown units: {units}")


def si_units(units: str) -> str:
    """Return the SI unit ``units`` converts to."""
    if units in _KNOWN_UNITS:
        return _KNOWN_UNITS[units][1]
    raise SweepSpecError(f"Unknown units: {units}")


def quantity_of(units: str) -> str:
    """Return the physical quantity measured in ``units``."""
    if units in _KNOWN_UNITS:
        return _KNOWN_UNITS[units][2]
    raise SweepSpecError(f"Unknown units: {units}")


def convert_to_si(value, units: str):
    return value * get_scale_factor(units)


def convert_from_si(value, units: str):
    return value / get_scale_factor(units)


def hz_to_angular(value_hz):
    """ω = 2π·ν."""
    return value_hz * TWO_PI


def angular_to_hz(value_rad_s):
    """ν = ω/2π."""
    return value_rad_s / TWO_PI


def per_angstrom_to_per_m(value):
    return convert_to_si(value, "1/Å")


def per_m_to_per_angstrom(value):
    return convert_from_si(value, "1/Å")


def eA_to_dipole(value_eA):
    """Dipole in C·m from e·Å."""
    return convert_to_si(value_eA, "eA")


def dipole_to_eA(value_Cm):
    return convert_from_si(value_Cm, "eA")
