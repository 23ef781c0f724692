"""On-board planar radiating array and the geographic beam lattice.

Steering vectors are uniform-planar-array phase ramps over direction
cosines (u, v) measured from boresight (nadir).  Beam lattices are
hexagonal packings in (u, v) space, coloured for FR3/FR4 frequency
reuse; working in direction-cosine space keeps steering and colouring
exact without map projections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, ContractError, DomainError

FR1_FULL = "FR1_full"
FR3 = "FR3"
FR4 = "FR4"

N_COLOURS = {FR1_FULL: 1, FR3: 3, FR4: 4}

# Simultaneously identifiable beams are capped by the broadcastable SSB count.
SSB_CAP_BELOW_6GHZ = 8
SSB_CAP_ABOVE_6GHZ = 64

ELEMENT_GAIN_FLOOR_DB = -30.0  # relative clamp of the element pattern


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform planar array; rows run along the u (along-track) axis."""

    n_rows: int = 16
    n_cols: int = 16
    element_spacing_wavelengths: float = 0.5
    max_element_gain_dbi: float = 6.0
    rolloff_exponent: float = 2.0

    def __post_init__(self):
        if self.n_rows < 1 or self.n_cols < 1:
            raise DomainError(f"array dimensions must be >= 1, got {self.n_rows}x{self.n_cols}")
        if self.element_spacing_wavelengths <= 0:
            raise DomainError(
                f"element_spacing_wavelengths must be > 0, got {self.element_spacing_wavelengths}"
            )

    @property
    def n_elements(self) -> int:
        return self.n_rows * self.n_cols


@dataclass(frozen=True)
class BeamLattice:
    """Hexagonally packed beam centers with a frequency-reuse colouring."""

    beam_u: np.ndarray
    beam_v: np.ndarray
    colour_of_beam: np.ndarray
    n_colours: int

    def __post_init__(self):
        if len(self.beam_u) != len(self.beam_v) or len(self.beam_u) != len(self.colour_of_beam):
            raise ContractError("beam center/colour arrays must share length")

    @property
    def n_beams(self) -> int:
        return len(self.beam_u)

    @property
    def bandwidth_share(self) -> float:
        return 1.0 / self.n_colours

    def to_csv(self, path) -> None:
        """Write beam_id,u,v,colour rows for plotting."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("beam_id,u,v,colour\n")
            for i in range(self.n_beams):
                fh.write(
                    f"{i},{float(self.beam_u[i])!r},{float(self.beam_v[i])!r},"
                    f"{int(self.colour_of_beam[i])}\n"
                )


def steering_vector(array: ArrayGeometry, u: float, v: float) -> np.ndarray:
    """Unit-modulus steering vector for direction cosines (u, v).

    Element (r, c) carries phase 2*pi*spacing*(r*u + c*v); the Euclidean
    norm is sqrt(N).  Directions behind the array plane (u^2 + v^2 > 1)
    are rejected.
    """
    return steering_matrix(array, np.atleast_1d(u), np.atleast_1d(v))[0]


def steering_matrix(array: ArrayGeometry, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Stack of steering vectors, one row per direction. Shape (n_dirs, N)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    uv2 = u * u + v * v
    if np.any(uv2 > 1.0 + 1e-12):
        raise DomainError("direction is behind the array plane (u^2 + v^2 > 1)")
    rows = np.arange(array.n_rows)
    cols = np.arange(array.n_cols)
    # phase(r, c) = 2 pi s (r u + c v), flattened row-major
    phase = (rows[:, None, None] * u[None, None, :] + cols[None, :, None] * v[None, None, :])
    phase = 2.0 * math.pi * array.element_spacing_wavelengths * phase
    return np.exp(1j * phase).reshape(array.n_elements, len(u)).T


def element_gain(array: ArrayGeometry, off_boresight_deg) -> np.ndarray:
    """Element pattern in dBi: cosine-power roll-off with a -30 dB relative floor."""
    theta = np.asarray(off_boresight_deg, dtype=float)
    if np.any(theta < 0.0) or np.any(theta > 90.0):
        raise DomainError(f"off_boresight_deg must be in [0, 90], got {off_boresight_deg}")
    c = np.cos(np.radians(theta))
    with np.errstate(divide="ignore"):
        rel = 10.0 * array.rolloff_exponent * np.log10(np.maximum(c, 0.0))
    rel = np.maximum(rel, ELEMENT_GAIN_FLOOR_DB)
    gain = array.max_element_gain_dbi + rel
    return float(gain) if np.isscalar(off_boresight_deg) or gain.ndim == 0 else gain


def ssb_beam_cap(carrier_hz: float) -> int:
    return SSB_CAP_BELOW_6GHZ if carrier_hz < 6e9 else SSB_CAP_ABOVE_6GHZ


def hex_rings_for(n_beams: int) -> int:
    """Number of hexagonal rings needed to hold ``n_beams`` (1 + 3r(r+1) centers)."""
    rings = 0
    while 1 + 3 * rings * (rings + 1) < n_beams:
        rings += 1
    return rings


def lattice_fit_coverage_deg(
    array: ArrayGeometry, n_beams: int, crossover_pitch_factor: float = 0.9
) -> float:
    """Coverage half-angle that the beam lattice contiguously illuminates.

    Neighbouring beams are pitched at ``crossover_pitch_factor`` times the
    orthogonal-beam spacing 2/N of the array (0.9 puts the crossover near
    the -3 dB contour), so the lattice footprint grows with the ring count
    instead of stretching sparse beams over the whole visibility cone.
    """
    pitch = crossover_pitch_factor * 2.0 / max(array.n_rows, array.n_cols)
    rings = hex_rings_for(n_beams)
    radius = rings * pitch if rings > 0 else pitch / 2.0
    return math.degrees(math.asin(min(radius, 1.0)))


def _hex_axial_spiral(n: int) -> list[tuple[int, int]]:
    """First n axial coordinates of the hex lattice, center outward."""
    if n == 1:
        return [(0, 0)]
    rings = hex_rings_for(n)
    coords = []
    for q in range(-rings, rings + 1):
        for r in range(-rings, rings + 1):
            dist = (abs(q) + abs(r) + abs(q + r)) // 2
            if dist <= rings:
                # y flips sign so the angle sweeps counter-clockwise in (u, v)
                x = q + r / 2.0
                y = r * math.sqrt(3.0) / 2.0
                ang = math.atan2(y, x) % (2.0 * math.pi)
                coords.append((dist, ang, q, r))
    coords.sort()
    return [(q, r) for _, _, q, r in coords[:n]]


def _colour(q: int, r: int, n_colours: int) -> int:
    if n_colours == 1:
        return 0
    if n_colours == 3:
        return (q + 2 * r) % 3
    if n_colours == 4:
        # repeating 2x2 rhombic pattern
        return (q % 2) + 2 * (r % 2)
    raise ContractError(f"unsupported colour count {n_colours}")


def generate_beam_lattice(
    coverage_half_angle_deg: float,
    n_beams: int,
    fr_scheme: str,
    carrier_hz: float = 20e9,
) -> BeamLattice:
    """Hexagonally pack ``n_beams`` beam centers inside the coverage cone.

    The outermost ring touches the cone edge sin(coverage_half_angle) in
    direction-cosine space.  FR3 uses a 3-colouring, FR4 a rhombic
    4-colouring, full FR a single colour; adjacent beams never share a
    colour for FR3/FR4.
    """
    if fr_scheme not in N_COLOURS:
        raise ConfigurationError(f"unknown FR scheme {fr_scheme!r}; expected one of {sorted(N_COLOURS)}")
    if n_beams < 1:
        raise ConfigurationError(f"n_beams must be >= 1, got {n_beams}")
    cap = ssb_beam_cap(carrier_hz)
    if n_beams > cap:
        raise ConfigurationError(
            f"n_beams={n_beams} exceeds the SSB beam cap of {cap} at {carrier_hz / 1e9:g} GHz"
        )
    if not 0.0 < coverage_half_angle_deg <= 90.0:
        raise DomainError(
            f"coverage_half_angle_deg must be in (0, 90], got {coverage_half_angle_deg}"
        )
    u_max = math.sin(math.radians(coverage_half_angle_deg))
    axial = _hex_axial_spiral(n_beams)
    rings = max((abs(q) + abs(r) + abs(q + r)) // 2 for q, r in axial)
    pitch = u_max / rings if rings > 0 else u_max
    bu = np.array([pitch * (q + r / 2.0) for q, r in axial])
    bv = np.array([pitch * (r * math.sqrt(3.0) / 2.0) for q, r in axial])
    colours = np.array([_colour(q, r, N_COLOURS[fr_scheme]) for q, r in axial], dtype=int)
    return BeamLattice(bu, bv, colours, N_COLOURS[fr_scheme])


def nearest_neighbour_pairs(lattice: BeamLattice) -> list[tuple[int, int]]:
    """Beam index pairs at (approximately) the minimum center distance."""
    n = lattice.n_beams
    if n < 2:
        return []
    du = lattice.beam_u[:, None] - lattice.beam_u[None, :]
    dv = lattice.beam_v[:, None] - lattice.beam_v[None, :]
    dist = np.hypot(du, dv)
    np.fill_diagonal(dist, np.inf)
    dmin = dist.min()
    pairs = np.argwhere(dist <= dmin * (1.0 + 1e-9))
    return [(int(i), int(j)) for i, j in pairs if i < j]
