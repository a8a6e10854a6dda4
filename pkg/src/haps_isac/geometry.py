"""Geometry primitives: positions, departure angles, UPA steering vectors,
backhaul phase vectors, and free-space path loss.

Everything in this module is a pure function of value inputs (SI units,
angles in radians), so it is safe to call from any number of workers.

Conventions
-----------
* The vertical departure angle ``theta`` is measured from nadir (straight
  down), so ``theta = 0`` means the ground point is directly below the
  array and ``theta`` stays in ``[0, pi/2]`` for any ground point below
  the platform.
* The horizontal angle ``phi = atan2(dy, dx)`` lies in ``[-pi, pi]``.
* A uniform planar array with ``rows`` elements along x and ``cols``
  elements along y is flattened row-major: the element ``(g_x, g_y)``
  sits at flat index ``g_x * cols + g_y``, which matches the Kronecker
  product of the x-axis and y-axis linear-array vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299792458.0
"""Propagation speed used for wavelength conversions, m/s."""


@dataclass(frozen=True)
class ArrayGeometry:
    """Rectangular antenna array: ``rows x cols`` elements spaced
    ``spacing_over_lambda`` wavelengths apart on both axes."""

    rows: int
    cols: int
    spacing_over_lambda: float = 0.5

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"array needs at least one element per axis, got {self.rows}x{self.cols}")
        if not self.spacing_over_lambda > 0:
            raise ValueError(f"antenna spacing must be positive, got {self.spacing_over_lambda}")

    @property
    def size(self) -> int:
        return self.rows * self.cols


@dataclass(frozen=True)
class Position3:
    """A point in 3-D space; ``z`` is altitude above ground in meters."""

    x: float
    y: float
    z: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise ValueError("position components must be finite")
        if self.z < 0:
            raise ValueError(f"altitude must be nonnegative, got {self.z}")


@dataclass(frozen=True)
class AngleOfDeparture:
    """Vertical (from nadir) and horizontal departure angles in radians."""

    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi / 2 + 1e-12:
            raise ValueError(f"theta must lie in [0, pi/2], got {self.theta}")
        if not -math.pi <= self.phi <= math.pi + 1e-12:
            raise ValueError(f"phi must lie in [-pi, pi], got {self.phi}")


@dataclass(frozen=True)
class SteeringVector:
    """Unit-modulus phase profile of a planar array toward one direction."""

    entries: np.ndarray
    geometry: ArrayGeometry

    def __post_init__(self):
        if self.entries.shape != (self.geometry.size,):
            raise ValueError(f"expected {self.geometry.size} entries, got {self.entries.shape}")


def distance(a: Position3, b: Position3) -> float:
    """Euclidean 3-D distance between two points in meters."""
    return math.sqrt((a.x - b.x) ** 2 + (a.y - b.y) ** 2 + (a.z - b.z) ** 2)


def aod_from_positions(apex: Position3, ground: Position3) -> AngleOfDeparture:
    """Departure angles from an elevated platform toward a lower point.

    With ``dx, dy`` the horizontal offsets, ``r`` the horizontal range and
    ``D`` the slant range, the vertical angle satisfies ``sin(theta) = r/D``
    and ``phi = atan2(dy, dx)``.  A point exactly underneath the apex maps
    to ``theta = 0, phi = 0`` by convention.
    """
    if apex.z <= ground.z:
        raise ValueError(f"apex altitude {apex.z} must exceed ground altitude {ground.z}")
    dx = ground.x - apex.x
    dy = ground.y - apex.y
    r = math.hypot(dx, dy)
    if r == 0.0:
        return AngleOfDeparture(0.0, 0.0)
    slant = math.sqrt(r * r + (apex.z - ground.z) ** 2)
    return AngleOfDeparture(math.asin(min(r / slant, 1.0)), math.atan2(dy, dx))


def steering_from_direction_cosines(geom: ArrayGeometry, u: float, v: float) -> np.ndarray:
    """Raw steering entries for direction cosines ``u = sin(theta)cos(phi)``
    and ``v = sin(theta)sin(phi)``.

    Entry ``(g_x, g_y)`` equals ``exp(-j 2 pi s (g_x u + g_y v))`` with
    ``s`` the element spacing in wavelengths; the flattening is the
    Kronecker product of the x-axis vector with the y-axis vector.
    """
    gx = np.arange(geom.rows)
    gy = np.arange(geom.cols)
    ax = np.exp(-2j * np.pi * geom.spacing_over_lambda * gx * u)
    ay = np.exp(-2j * np.pi * geom.spacing_over_lambda * gy * v)
    return np.kron(ax, ay)


def steering_vector(geom: ArrayGeometry, aod: AngleOfDeparture) -> SteeringVector:
    """Steering vector of a UPA toward the given departure direction."""
    u = math.sin(aod.theta) * math.cos(aod.phi)
    v = math.sin(aod.theta) * math.sin(aod.phi)
    return SteeringVector(steering_from_direction_cosines(geom, u, v), geom)


def wavelength(carrier_freq: float) -> float:
    """Carrier wavelength in meters."""
    if carrier_freq <= 0:
        raise ValueError(f"carrier frequency must be positive, got {carrier_freq}")
    return SPEED_OF_LIGHT / carrier_freq


def haps_pathloss_amplitude(d_m: float, carrier_freq: float) -> float:
    """Free-space amplitude loss ``lambda / (4 pi d)`` of the backhaul link.

    The squared value is the free-space power path loss; the link is
    assumed line-of-sight at sub-THz frequencies.
    """
    if d_m <= 0:
        raise ValueError(f"link distance must be positive, got {d_m}")
    return wavelength(carrier_freq) / (4.0 * math.pi * d_m)


def haps_phase_vectors(
    uav_geom: ArrayGeometry,
    haps_geom: ArrayGeometry,
    uav: Position3,
    haps: Position3,
    carrier_freq: float,
) -> tuple[SteeringVector, SteeringVector]:
    """Analog-beamforming phase profiles for the UAV-to-HAPS hop.

    Returns ``(b, c)``: ``b`` aligns the UAV transmit array with the HAPS
    and carries the common propagation phase ``exp(j 2 pi d / lambda)``;
    ``c`` is the HAPS receive-side phase profile.  Both are unit-modulus
    per entry.  The departure direction is computed with the HAPS as apex.
    """
    if haps.z <= uav.z:
        raise ValueError(f"HAPS altitude {haps.z} must exceed UAV altitude {uav.z}")
    aod = aod_from_positions(haps, uav)
    # Transmit-side alignment conjugates the propagation phases, so the
    # per-element factors use +j relative to the downlink steering vector.
    b_rel = steering_vector(uav_geom, aod).entries.conj()
    c_rel = steering_vector(haps_geom, aod).entries.conj()
    d_m = distance(uav, haps)
    global_phase = np.exp(2j * np.pi * d_m / wavelength(carrier_freq))
    b = SteeringVector(global_phase * b_rel, uav_geom)
    c = SteeringVector(c_rel, haps_geom)
    return b, c
