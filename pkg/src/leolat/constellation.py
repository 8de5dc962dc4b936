"""Walker-delta shell generation and circular two-body propagation.

The shell is a uniform grid: planes evenly spaced in RAAN, satellites
evenly spaced in argument of latitude within each plane, with an optional
integer phasing factor that shifts adjacent planes' satellites by
``phase_factor * 360 / (num_planes * sats_per_plane)`` degrees of anomaly.
Orbits are circular two-body (no J2, no drag), which is negligible error
over the hour-scale horizons this package targets.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .geo import CONSTANTS, PhysicalConstants, Vec3

_SAT_ID_RE = re.compile(r"^x1(\d{2})(\d{2})$")


@dataclass(frozen=True)
class ConstellationConfig:
    """Shell parameters; defaults are the 24x66 550 km / 53 deg shell."""

    num_planes: int = 24
    sats_per_plane: int = 66
    altitude_km: float = 550.0
    inclination_deg: float = 53.0
    raan0_deg: float = 0.0      # RAAN of plane 1 at epoch
    phase_factor: int = 0       # inter-plane phasing, in [0, num_planes-1]
    epoch: float = 0.0          # reference time, s; t is measured from it

    def __post_init__(self):
        if self.num_planes < 1 or self.sats_per_plane < 1:
            raise ValueError("num_planes and sats_per_plane must be >= 1")
        if self.altitude_km <= 0:
            raise ValueError("altitude_km must be > 0")
        if not 0.0 <= self.inclination_deg <= 180.0:
            raise ValueError("inclination_deg must be in [0, 180]")
        if not 0 <= self.phase_factor < self.num_planes:
            raise ValueError("phase_factor must be in [0, num_planes-1]")

    @property
    def total_sats(self) -> int:
        return self.num_planes * self.sats_per_plane

    @property
    def raan_spacing_deg(self) -> float:
        return 360.0 / self.num_planes

    @property
    def anomaly_spacing_deg(self) -> float:
        return 360.0 / self.sats_per_plane

    @property
    def phase_offset_deg(self) -> float:
        """Anomaly shift between satellites in adjacent planes."""
        return self.phase_factor * 360.0 / (self.num_planes * self.sats_per_plane)


@dataclass(frozen=True)
class SatelliteElement:
    """One satellite's grid indices, epoch angles, and canonical ID."""

    plane_index: int    # 1-based
    slot_index: int     # 1-based within plane
    raan_rad: float
    anomaly0_rad: float  # argument of latitude at epoch
    sat_id: str


def format_sat_id(plane: int, slot: int) -> str:
    """Canonical ID "x1" + two-digit plane + two-digit slot, e.g. x10101."""
    if not 1 <= plane <= 99 or not 1 <= slot <= 99:
        raise ValueError(f"plane/slot ({plane}, {slot}) outside the two-digit ID scheme")
    return f"x1{plane:02d}{slot:02d}"


def parse_sat_id(sat_id: str) -> tuple[int, int]:
    """Inverse of format_sat_id; rejects malformed strings."""
    m = _SAT_ID_RE.match(sat_id)
    if not m:
        raise ValueError(f"malformed satellite ID {sat_id!r}")
    plane, slot = int(m.group(1)), int(m.group(2))
    if plane == 0 or slot == 0:
        raise ValueError(f"satellite ID {sat_id!r} has out-of-range plane/slot")
    return plane, slot


def build_constellation(cfg: ConstellationConfig) -> list[SatelliteElement]:
    """Generate the full shell, plane-major then slot order, IDs unique."""
    if cfg.num_planes > 99 or cfg.sats_per_plane > 99:
        raise ValueError("two-digit ID scheme cannot encode planes/slots beyond 99")
    elements = []
    for p in range(1, cfg.num_planes + 1):
        raan_deg = (cfg.raan0_deg + (p - 1) * cfg.raan_spacing_deg) % 360.0
        for s in range(1, cfg.sats_per_plane + 1):
            anom_deg = ((s - 1) * cfg.anomaly_spacing_deg + (p - 1) * cfg.phase_offset_deg) % 360.0
            elements.append(
                SatelliteElement(
                    plane_index=p,
                    slot_index=s,
                    raan_rad=math.radians(raan_deg),
                    anomaly0_rad=math.radians(anom_deg),
                    sat_id=format_sat_id(p, s),
                )
            )
    return elements


def orbit_radius_km(cfg: ConstellationConfig, constants: PhysicalConstants = CONSTANTS) -> float:
    return constants.earth_radius_km + cfg.altitude_km


def mean_motion_rad_s(cfg: ConstellationConfig, constants: PhysicalConstants = CONSTANTS) -> float:
    a = orbit_radius_km(cfg, constants)
    return math.sqrt(constants.mu_earth / a**3)


def orbital_period_s(cfg: ConstellationConfig, constants: PhysicalConstants = CONSTANTS) -> float:
    return 2.0 * math.pi / mean_motion_rad_s(cfg, constants)


def _propagate(
    raan: np.ndarray,
    anomaly0: np.ndarray,
    t: float,
    a: float,
    n: float,
    inclination_rad: float,
) -> np.ndarray:
    """Positions for angle arrays at time t: Rz(raan) . Rx(inc) . in-plane."""
    theta = anomaly0 + n * t
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    cos_o, sin_o = np.cos(raan), np.sin(raan)
    cos_i, sin_i = math.cos(inclination_rad), math.sin(inclination_rad)
    x = a * (cos_t * cos_o - sin_t * cos_i * sin_o)
    y = a * (cos_t * sin_o + sin_t * cos_i * cos_o)
    z = a * (sin_t * sin_i)
    return np.stack([x, y, z], axis=-1)


def position_at(
    sat: SatelliteElement,
    cfg: ConstellationConfig,
    t: float,
    constants: PhysicalConstants = CONSTANTS,
) -> Vec3:
    """ECI position at t seconds past epoch, km; |result| = R + altitude."""
    if t < 0:
        raise ValueError("t must be >= 0")
    return _propagate(
        np.array([sat.raan_rad]),
        np.array([sat.anomaly0_rad]),
        t - cfg.epoch,
        orbit_radius_km(cfg, constants),
        mean_motion_rad_s(cfg, constants),
        math.radians(cfg.inclination_deg),
    )[0]


class Constellation:
    """A built shell plus cached angle arrays for vectorized propagation."""

    def __init__(self, cfg: ConstellationConfig, constants: PhysicalConstants = CONSTANTS):
        self.cfg = cfg
        self.constants = constants
        self.elements = build_constellation(cfg)
        self.sat_ids = tuple(e.sat_id for e in self.elements)
        self.sat_index = {sid: k for k, sid in enumerate(self.sat_ids)}
        self._raan = np.array([e.raan_rad for e in self.elements])
        self._anom0 = np.array([e.anomaly0_rad for e in self.elements])
        self._a = orbit_radius_km(cfg, constants)
        self._n = mean_motion_rad_s(cfg, constants)
        self._inc = math.radians(cfg.inclination_deg)

    def __len__(self) -> int:
        return len(self.elements)

    def positions_at(self, t: float) -> np.ndarray:
        """(N, 3) ECI positions of every satellite at t seconds past epoch."""
        if t < 0:
            raise ValueError("t must be >= 0")
        return _propagate(self._raan, self._anom0, t - self.cfg.epoch, self._a, self._n, self._inc)
