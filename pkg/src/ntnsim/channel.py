"""User-by-element channel synthesis for the LEO downlink.

The true channel is the clear-sky geometric response (FSPL, element
pattern, planar-array steering phases), optionally scaled per user by
3GPP-style excess losses (atmospheric, scintillation, shadow fading).
Ancillary information for precoding comes in two flavours: a CSI
estimate that is a stale copy of the true channel (the satellite moves
during the misalignment interval), and a location-based reconstruction
that rebuilds the clear-sky response from reported user positions and
the predicted satellite position, ignoring excess losses by design.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .antenna import ArrayGeometry, element_gain, steering_matrix
from .constants import BOLTZMANN_J_K, SPEED_OF_LIGHT_M_S
from .errors import ContractError, DomainError
from .geometry import GeometryContext, earth_central_angle_deg, satellite_frame

TRUE_AT_TRANSMISSION = "true_at_transmission"
CSI_ESTIMATE = "csi_estimate"
LOCATION_INFERRED = "location_inferred"

# VSAT receiver class: ~0.6 m dish at Ka band and ~150 K system temperature.
DEFAULT_RX_GAIN_DBI = 39.7
DEFAULT_G_OVER_T_DB_K = 17.9

# Elevation checks allow a small slack so that terminals dropped exactly at
# the minimum elevation remain valid after the satellite advances along-track
# within one drop.
_ELEVATION_SLACK_DEG = 0.1


@dataclass(frozen=True)
class TerminalPopulation:
    """Per-terminal view from the satellite plus receiver parameters.

    ``direction_u/v`` are direction cosines of the satellite-to-user ray in
    the satellite body frame (x along-track, y cross-track, z nadir).
    ``ground_xyz_km`` holds the Earth-fixed positions the view was computed
    from, so the same terminals can be re-viewed after the satellite moves.
    """

    direction_u: np.ndarray
    direction_v: np.ndarray
    slant_range_km: np.ndarray
    elevation_deg: np.ndarray
    ground_xyz_km: np.ndarray
    g_over_t_db_k: float = DEFAULT_G_OVER_T_DB_K
    location_error_m: float = 0.0

    def __post_init__(self):
        if self.n_users < 1:
            raise ContractError("population size must be >= 1")

    @property
    def n_users(self) -> int:
        return len(self.direction_u)

    @property
    def direction_w(self) -> np.ndarray:
        return np.sqrt(np.clip(1.0 - self.direction_u**2 - self.direction_v**2, 0.0, 1.0))


@dataclass(frozen=True)
class ImpairmentProfile:
    """Per-user excess-loss model of the 3GPP channel mode.

    The total dB loss per user is a fixed atmospheric absorption plus
    zero-mean Gaussian scintillation and shadow-fading terms (log-normal
    in linear units).  At the default sigmas the atmospheric floor keeps
    the expected linear gain below one, so the 3GPP mode can only lower
    expected capacity relative to clear sky.  Disabled components
    contribute exactly 0 dB.

    The stochastic components decorrelate as the satellite sweeps
    along-track between the estimation and transmission instants; each
    carries an exponential decorrelation distance over the ground-ray
    displacement.
    """

    atmospheric_loss_db: float = 0.5
    scintillation_sigma_db: float = 0.3
    shadow_sigma_db: float = 2.0
    atmospheric_enabled: bool = True
    scintillation_enabled: bool = True
    shadow_enabled: bool = True
    scintillation_decorrelation_m: float = 30.0
    shadow_decorrelation_m: float = 37.0

    def __post_init__(self):
        if self.atmospheric_loss_db < 0 or self.scintillation_sigma_db < 0 or self.shadow_sigma_db < 0:
            raise DomainError("impairment magnitudes must be >= 0")
        if self.scintillation_decorrelation_m <= 0 or self.shadow_decorrelation_m <= 0:
            raise DomainError("decorrelation distances must be > 0")

    def draw_losses_db(self, n_users: int, rng: np.random.Generator) -> np.ndarray:
        losses = np.zeros(n_users)
        if self.atmospheric_enabled:
            losses += self.atmospheric_loss_db
        if self.scintillation_enabled:
            losses += rng.normal(0.0, self.scintillation_sigma_db, n_users)
        if self.shadow_enabled:
            losses += rng.normal(0.0, self.shadow_sigma_db, n_users)
        return losses

    def draw_loss_pair_db(
        self, n_users: int, displacement_m: float, rng: np.random.Generator
    ) -> tuple[np.ndarray, np.ndarray]:
        """Losses at estimation time and transmission time, jointly drawn.

        Each stochastic component at the later instant is the Gauss-Markov
        mixture rho*z0 + sqrt(1-rho^2)*z1 with rho = exp(-d/d_corr); zero
        displacement therefore reproduces the estimation-time losses
        exactly, and a large one decorrelates them.
        """
        l0 = np.zeros(n_users)
        l1 = np.zeros(n_users)
        if self.atmospheric_enabled:
            l0 += self.atmospheric_loss_db
            l1 += self.atmospheric_loss_db
        components = (
            (self.scintillation_enabled, self.scintillation_sigma_db, self.scintillation_decorrelation_m),
            (self.shadow_enabled, self.shadow_sigma_db, self.shadow_decorrelation_m),
        )
        for enabled, sigma, decorr in components:
            if not enabled:
                continue
            z0 = rng.standard_normal(n_users)
            z1 = rng.standard_normal(n_users)
            rho = math.exp(-displacement_m / decorr)
            l0 += sigma * z0
            l1 += sigma * (rho * z0 + math.sqrt(1.0 - rho * rho) * z1)
        return l0, l1


@dataclass(frozen=True)
class ChannelMatrix:
    """Complex channel coefficients, users x radiating elements."""

    entries: np.ndarray
    kind: str
    carrier_hz: float
    bandwidth_hz: float
    noise_power_w: np.ndarray

    def __post_init__(self):
        if self.entries.ndim != 2 or min(self.entries.shape) < 1:
            raise ContractError(f"entries must be a non-empty 2-D array, got shape {self.entries.shape}")
        if not np.all(np.isfinite(self.entries)):
            raise ContractError("channel entries must be finite")
        if self.kind == LOCATION_INFERRED:
            mags = np.abs(self.entries)
            spread = mags.max(axis=1) - mags.min(axis=1)
            if np.any(spread > 1e-9 * np.maximum(mags.max(axis=1), 1e-300)):
                raise ContractError("location-inferred rows must have uniform entry magnitude")

    @property
    def n_users(self) -> int:
        return self.entries.shape[0]

    @property
    def n_elements(self) -> int:
        return self.entries.shape[1]

    def to_csv(self, path) -> None:
        """Debug dump: user,element,re,im rows."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("user,element,re,im\n")
            for u in range(self.n_users):
                for n in range(self.n_elements):
                    h = self.entries[u, n]
                    fh.write(f"{u},{n},{h.real!r},{h.imag!r}\n")


def noise_power_w(g_over_t_db_k, rx_gain_dbi: float, bandwidth_hz: float) -> np.ndarray:
    """Thermal noise power k*T_sys*B with T_sys backed out of the terminal G/T."""
    t_sys = 10.0 ** ((rx_gain_dbi - np.asarray(g_over_t_db_k, dtype=float)) / 10.0)
    return BOLTZMANN_J_K * t_sys * bandwidth_hz


def view_terminals(
    ground_xyz_km: np.ndarray,
    ctx: GeometryContext,
    along_track_km: float = 0.0,
    g_over_t_db_k: float = DEFAULT_G_OVER_T_DB_K,
    location_error_m: float = 0.0,
) -> TerminalPopulation:
    """View fixed ground terminals from the satellite at the given along-track arc."""
    pos, axes = satellite_frame(ctx, along_track_km)
    rel = np.asarray(ground_xyz_km, dtype=float) - pos
    rng_km = np.linalg.norm(rel, axis=1)
    unit = rel / rng_km[:, None]
    in_frame = unit @ axes.T
    # elevation from the local vertical at the terminal
    up = ground_xyz_km / np.linalg.norm(ground_xyz_km, axis=1)[:, None]
    sin_elev = np.clip(-(unit * up).sum(axis=1), -1.0, 1.0)
    return TerminalPopulation(
        direction_u=in_frame[:, 0],
        direction_v=in_frame[:, 1],
        slant_range_km=rng_km,
        elevation_deg=np.degrees(np.arcsin(sin_elev)),
        ground_xyz_km=np.asarray(ground_xyz_km, dtype=float),
        g_over_t_db_k=g_over_t_db_k,
        location_error_m=location_error_m,
    )


def drop_terminals(
    ctx: GeometryContext,
    n_users: int,
    rng: np.random.Generator,
    min_elevation_deg: float | None = None,
    g_over_t_db_k: float = DEFAULT_G_OVER_T_DB_K,
    location_error_m: float = 0.0,
) -> TerminalPopulation:
    """Drop terminals area-uniformly on the spherical coverage cap.

    The cap spans Earth-central angles out to the one matching the minimum
    elevation (defaults to the context's user minimum), so every terminal
    satisfies the elevation constraint by construction.
    """
    if n_users < 1:
        raise ContractError(f"n_users must be >= 1, got {n_users}")
    min_elev = ctx.user_min_elevation_deg if min_elevation_deg is None else min_elevation_deg
    gamma_max = math.radians(earth_central_angle_deg(ctx, min_elev))
    cos_gamma = rng.uniform(math.cos(gamma_max), 1.0, n_users)
    sin_gamma = np.sqrt(1.0 - cos_gamma**2)
    phi = rng.uniform(0.0, 2.0 * math.pi, n_users)
    r = ctx.earth_radius_km
    ground = np.column_stack(
        [r * sin_gamma * np.cos(phi), r * sin_gamma * np.sin(phi), r * cos_gamma]
    )
    return view_terminals(ground, ctx, 0.0, g_over_t_db_k, location_error_m)


def perturb_reported_positions(
    users: TerminalPopulation, rng: np.random.Generator
) -> np.ndarray:
    """Ground positions as reported by the terminals (GNSS error in the tangent plane)."""
    ground = users.ground_xyz_km
    if users.location_error_m <= 0.0:
        return ground.copy()
    radius = np.linalg.norm(ground, axis=1)
    up = ground / radius[:, None]
    # orthonormal tangent basis at each terminal
    ref = np.where(np.abs(up[:, 2:3]) < 0.9, [[0.0, 0.0, 1.0]], [[1.0, 0.0, 0.0]])
    t1 = np.cross(up, ref)
    t1 /= np.linalg.norm(t1, axis=1)[:, None]
    t2 = np.cross(up, t1)
    err_km = users.location_error_m / 1e3
    offsets = rng.normal(0.0, err_km, (users.n_users, 2))
    perturbed = ground + offsets[:, 0:1] * t1 + offsets[:, 1:2] * t2
    # re-project onto the sphere so reports stay on the Earth's surface
    return perturbed / np.linalg.norm(perturbed, axis=1)[:, None] * radius[:, None]


def _geometric_matrix(
    users: TerminalPopulation,
    array: ArrayGeometry,
    carrier_hz: float,
    geometry: GeometryContext,
    kind: str,
    bandwidth_hz: float,
    rx_gain_dbi: float,
) -> ChannelMatrix:
    if carrier_hz <= 0:
        raise DomainError(f"carrier_hz must be > 0, got {carrier_hz}")
    if np.any(users.elevation_deg < geometry.user_min_elevation_deg - _ELEVATION_SLACK_DEG):
        worst = float(users.elevation_deg.min())
        raise DomainError(
            f"terminal at {worst:.3f} deg elevation is below the "
            f"{geometry.user_min_elevation_deg:g} deg minimum"
        )
    lam_m = SPEED_OF_LIGHT_M_S / carrier_hz
    d_m = users.slant_range_km * 1e3
    fspl_db = 20.0 * np.log10(4.0 * math.pi * d_m / lam_m)
    theta_deg = np.degrees(np.arccos(np.clip(users.direction_w, 0.0, 1.0)))
    gain_db = rx_gain_dbi + element_gain(array, theta_deg) - fspl_db
    amplitude = 10.0 ** (gain_db / 20.0)
    phase = np.exp(-2j * math.pi * d_m / lam_m)
    steer = steering_matrix(array, users.direction_u, users.direction_v)
    entries = (amplitude * phase)[:, None] * np.conj(steer)
    return ChannelMatrix(
        entries=entries,
        kind=kind,
        carrier_hz=carrier_hz,
        bandwidth_hz=bandwidth_hz,
        noise_power_w=np.broadcast_to(
            noise_power_w(users.g_over_t_db_k, rx_gain_dbi, bandwidth_hz), (users.n_users,)
        ).copy(),
    )


def build_clear_sky(
    users: TerminalPopulation,
    array: ArrayGeometry,
    carrier_hz: float,
    geometry: GeometryContext,
    rng_seed=None,
    *,
    bandwidth_hz: float,
    rx_gain_dbi: float = DEFAULT_RX_GAIN_DBI,
) -> ChannelMatrix:
    """True channel in clear-sky mode.

    Row u is sqrt(G_rx * G_elem / FSPL) * exp(-j 2 pi d/lambda) times the
    conjugated steering vector of the user direction.  The synthesis is
    fully deterministic; ``rng_seed`` is accepted for interface uniformity
    with the impaired builder.
    """
    del rng_seed
    return _geometric_matrix(
        users, array, carrier_hz, geometry, TRUE_AT_TRANSMISSION, bandwidth_hz, rx_gain_dbi
    )


def apply_losses_db(h: ChannelMatrix, losses_db: np.ndarray) -> ChannelMatrix:
    """Scale each user row by 10^(-L/20) for per-user dB losses."""
    losses_db = np.asarray(losses_db, dtype=float)
    if losses_db.shape != (h.n_users,):
        raise ContractError(f"expected {h.n_users} per-user losses, got shape {losses_db.shape}")
    scale = 10.0 ** (-losses_db / 20.0)
    return replace(h, entries=h.entries * scale[:, None])


def apply_3gpp_impairments(
    h: ChannelMatrix, profile: ImpairmentProfile, rng_seed
) -> ChannelMatrix:
    """Impose 3GPP-mode excess losses on a clear-sky true channel."""
    if h.kind != TRUE_AT_TRANSMISSION:
        raise ContractError(f"impairments apply to the true channel, got kind={h.kind!r}")
    rng = np.random.default_rng(rng_seed)
    return apply_losses_db(h, profile.draw_losses_db(h.n_users, rng))


def estimate_csi(
    h_at_t0: ChannelMatrix,
    h_at_t0_plus_dt: ChannelMatrix,
    estimation_noise_db: float | None = None,
    rng_seed=None,
) -> ChannelMatrix:
    """CSI as reported by the users: the true channel at estimation time.

    The returned estimate is stale by construction; the caller evaluates
    the precoder built from it against ``h_at_t0_plus_dt``.  Optional
    additive estimation noise is complex Gaussian at the given per-element
    SNR below the row's mean power (off by default).
    """
    if h_at_t0.entries.shape != h_at_t0_plus_dt.entries.shape:
        raise ContractError(
            f"channel matrices disagree in shape: {h_at_t0.entries.shape} vs "
            f"{h_at_t0_plus_dt.entries.shape}"
        )
    entries = h_at_t0.entries.copy()
    if estimation_noise_db is not None:
        rng = np.random.default_rng(rng_seed)
        row_power = np.mean(np.abs(entries) ** 2, axis=1)
        sigma2 = row_power * 10.0 ** (-estimation_noise_db / 10.0)
        std = np.sqrt(sigma2 / 2.0)[:, None]
        entries = entries + std * (
            rng.standard_normal(entries.shape) + 1j * rng.standard_normal(entries.shape)
        )
    return replace(h_at_t0, entries=entries, kind=CSI_ESTIMATE)


def infer_from_location(
    users: TerminalPopulation,
    array: ArrayGeometry,
    geometry: GeometryContext,
    carrier_hz: float,
    *,
    bandwidth_hz: float,
    rx_gain_dbi: float = DEFAULT_RX_GAIN_DBI,
) -> ChannelMatrix:
    """Clear-sky reconstruction from reported positions; never models excess losses.

    ``users`` must already be the view of the reported positions from the
    predicted transmission-time satellite position (the network knows the
    ephemeris exactly).
    """
    return _geometric_matrix(
        users, array, carrier_hz, geometry, LOCATION_INFERRED, bandwidth_hz, rx_gain_dbi
    )
