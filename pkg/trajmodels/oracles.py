"""
Closed-form sanity oracles for low-thrust transfers.
"""

import math

from trajmodels.errors import DomainError

SECONDS_PER_DAY = 86400.0


def spiral_tof(gamma: float, mu: float, a_i: float, a_f: float) -> float:
    """
    Time of flight of a tangential-thrust spiral between circular orbits.

    With constant thrust acceleration Γ the circular speed drops linearly in time,
    so t_f = (sqrt(μ/a_i) - sqrt(μ/a_f)) / Γ.

    Args:
        gamma: Thrust acceleration in km/s^2
        mu: Gravitational parameter in km^3/s^2
        a_i: Initial semi-major axis in km
        a_f: Final semi-major axis in km (>= a_i for orbit raising)

    Returns:
        float: Time of flight in seconds
    """
    for label, value in (('gamma', gamma), ('mu', mu), ('a_i', a_i), ('a_f', a_f)):
        if value is None or value <= 0:
            raise DomainError(f"{label} must be positive, got {value}")
    if a_f < a_i:
        raise DomainError(f"Orbit raising requires a_f >= a_i, got {a_f} < {a_i}")
    return (math.sqrt(mu / a_i) - math.sqrt(mu / a_f)) / gamma


def spiral_tof_days(gamma: float, mu: float, a_i: float, a_f: float) -> float:
    """Same as spiral_tof, in days."""
    return spiral_tof(gamma, mu, a_i, a_f) / SECONDS_PER_DAY
