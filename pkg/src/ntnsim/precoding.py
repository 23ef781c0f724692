"""Precoders, beam-based FR transmission, SINR and capacity evaluation.

Element-level MMSE/ZF precoders are regularized channel inversions; the
location-based variant runs the same algebra on a geometrically inferred
matrix.  All precoders share the maximum-power normalization: one positive
scalar scales the unnormalized matrix so the hottest radiating element
exactly meets its per-feed power cap, which preserves the beamforming
directions.  The FR3/FR4 baselines steer one fixed beam per lattice cell
and split bandwidth across colours.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .antenna import ArrayGeometry, BeamLattice, N_COLOURS, steering_matrix
from .channel import ChannelMatrix, LOCATION_INFERRED
from .errors import ContractError, NumericalError

MAX_POWER = "max_power"


@dataclass(frozen=True)
class PrecodingMatrix:
    """Complex precoder, radiating elements x served users, MPC-normalized."""

    entries: np.ndarray
    total_power_w: float
    per_feed_power_cap_w: float
    normalization: str = MAX_POWER

    @property
    def n_elements(self) -> int:
        return self.entries.shape[0]

    @property
    def n_users(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class LinkResult:
    """Per-user SINR/rate breakdown plus aggregates for one evaluation."""

    sinr_linear: np.ndarray
    allocated_bandwidth_hz: np.ndarray
    spectral_efficiency_bps_hz: np.ndarray
    rate_bps: np.ndarray
    system_capacity_bps: float
    mean_spectral_efficiency: float


def max_power_normalize(
    w_unnormalized: np.ndarray, total_power_w: float
) -> PrecodingMatrix:
    """Scale the matrix so max_n sum_u |w_nu|^2 = total_power / n_elements."""
    if total_power_w <= 0:
        raise ContractError(f"total_power_w must be > 0, got {total_power_w}")
    n_elements = w_unnormalized.shape[0]
    cap = total_power_w / n_elements
    feed_power = np.sum(np.abs(w_unnormalized) ** 2, axis=1)
    hottest = feed_power.max()
    if hottest <= 0.0:
        raise NumericalError("precoding matrix is identically zero")
    scale = np.sqrt(cap / hottest)
    return PrecodingMatrix(
        entries=w_unnormalized * scale,
        total_power_w=total_power_w,
        per_feed_power_cap_w=cap,
    )


def _regularized_inverse_precoder(
    h: np.ndarray, alpha: float, total_power_w: float
) -> PrecodingMatrix:
    n_users = h.shape[0]
    gram = h @ h.conj().T + alpha * np.eye(n_users)
    try:
        solved = np.linalg.solve(gram, h).conj().T  # = H^H (H H^H + alpha I)^-1
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            "channel Gram matrix is singular; use a non-zero noise power so the "
            "MMSE regularizer is strictly positive"
        ) from exc
    return max_power_normalize(solved, total_power_w)


def mmse_precoder(
    h_est: ChannelMatrix, noise_power_w: float, total_power_w: float
) -> PrecodingMatrix:
    """Regularized channel inversion W = H^H (H H^H + alpha I)^-1, alpha = K sigma^2 / P."""
    h = h_est.entries
    if h.shape[0] > h.shape[1]:
        raise ContractError(
            f"need n_users <= n_elements, got {h.shape[0]} users x {h.shape[1]} elements"
        )
    alpha = h.shape[0] * float(noise_power_w) / float(total_power_w)
    return _regularized_inverse_precoder(h, alpha, total_power_w)


def zf_precoder(h_est: ChannelMatrix, total_power_w: float) -> PrecodingMatrix:
    """Zero-forcing pseudo-inverse; requires a full-row-rank channel."""
    h = h_est.entries
    if h.shape[0] > h.shape[1]:
        raise ContractError(
            f"need n_users <= n_elements, got {h.shape[0]} users x {h.shape[1]} elements"
        )
    w = _regularized_inverse_precoder(h, 0.0, total_power_w)
    # A numerically singular Gram matrix can slip through solve(); verify.
    diag = np.abs(np.diagonal(h @ w.entries))
    if np.any(diag <= 0.0) or not np.all(np.isfinite(w.entries)):
        raise NumericalError("channel matrix is rank deficient; ZF inverse does not exist")
    return w


def lb_mmse_precoder(
    h_inferred: ChannelMatrix, noise_power_w: float, total_power_w: float
) -> PrecodingMatrix:
    """MMSE algebra applied to the location-inferred channel reconstruction."""
    if h_inferred.kind != LOCATION_INFERRED:
        raise ContractError(
            f"lb_mmse_precoder expects a location-inferred matrix, got kind={h_inferred.kind!r}"
        )
    return mmse_precoder(h_inferred, noise_power_w, total_power_w)


def compute_sinr(
    h_true: ChannelMatrix, w: PrecodingMatrix, noise_power_w
) -> np.ndarray:
    """Per-user SINR |h_u w_u|^2 / (sum_{v != u} |h_u w_v|^2 + noise)."""
    h = h_true.entries
    if h.shape[1] != w.n_elements or h.shape[0] != w.n_users:
        raise ContractError(
            f"dimension mismatch: channel {h.shape} vs precoder "
            f"{w.n_elements}x{w.n_users}"
        )
    g = np.abs(h @ w.entries) ** 2
    signal = np.diagonal(g).copy()
    interference = g.sum(axis=1) - signal
    return signal / (interference + np.asarray(noise_power_w, dtype=float))


def capacity(
    sinr_linear: np.ndarray,
    bandwidth_hz,
    se_cap_bps_hz: float | None = None,
) -> LinkResult:
    """Shannon mapping rate_u = B_u log2(1 + SINR_u) and its aggregates."""
    sinr = np.asarray(sinr_linear, dtype=float)
    if np.any(sinr < 0):
        raise ContractError("SINR must be >= 0")
    bw = np.broadcast_to(np.asarray(bandwidth_hz, dtype=float), sinr.shape).copy()
    if np.any(bw <= 0):
        raise ContractError("bandwidth must be > 0")
    se = np.log2(1.0 + sinr)
    if se_cap_bps_hz is not None:
        se = np.minimum(se, se_cap_bps_hz)
    rate = bw * se
    return LinkResult(
        sinr_linear=sinr,
        allocated_bandwidth_hz=bw,
        spectral_efficiency_bps_hz=se,
        rate_bps=rate,
        system_capacity_bps=float(rate.sum()),
        mean_spectral_efficiency=float(se.mean()),
    )


def assign_users_to_beams(h_true: ChannelMatrix, beams: np.ndarray) -> np.ndarray:
    """Best-gain beam per user (ties broken toward the lowest beam index)."""
    gains = np.abs(h_true.entries @ beams.T) ** 2
    return np.argmax(gains, axis=1)


def fr_transmit(
    h_true: ChannelMatrix,
    lattice: BeamLattice,
    array: ArrayGeometry,
    total_power_w: float,
    scheme: str,
) -> LinkResult:
    """Legacy beam-based transmission with FR3/FR4 colour reuse.

    Each non-empty beam radiates a fixed steering-vector beamformer toward
    its lattice center at power P/n_beams.  Users attach to their best-gain
    beam and round-robin the beam's resource, so a user in a beam with m
    users holds B/n_colours of spectrum for 1/m of the time; its allocated
    bandwidth below is that time-frequency share.  Interference (and the
    SSB-identifiable active set) involves only co-colour beams, and noise
    scales with the colour bandwidth.
    """
    fr_schemes = tuple(k for k, n in N_COLOURS.items() if n > 1)
    if scheme not in fr_schemes:
        raise ContractError(f"fr_transmit expects scheme in {fr_schemes}, got {scheme!r}")
    if N_COLOURS[scheme] != lattice.n_colours:
        raise ContractError(
            f"lattice was built with {lattice.n_colours} colours but scheme {scheme} "
            f"needs {N_COLOURS[scheme]}"
        )
    if h_true.n_users < 1:
        raise ContractError("no users to serve")
    beams = steering_matrix(array, lattice.beam_u, lattice.beam_v)
    beam_of_user = assign_users_to_beams(h_true, beams)
    per_beam_power = total_power_w / lattice.n_beams
    w_beams = np.sqrt(per_beam_power / array.n_elements) * beams  # each row sums to P/n_beams

    occupancy = np.bincount(beam_of_user, minlength=lattice.n_beams)
    active = occupancy > 0
    rx = np.abs(h_true.entries @ w_beams.T) ** 2  # users x beams

    colour_bw = h_true.bandwidth_hz * lattice.bandwidth_share
    noise = h_true.noise_power_w * lattice.bandwidth_share
    own = rx[np.arange(h_true.n_users), beam_of_user]
    same_colour = lattice.colour_of_beam[None, :] == lattice.colour_of_beam[beam_of_user][:, None]
    interferer = same_colour & active[None, :]
    interferer[np.arange(h_true.n_users), beam_of_user] = False
    interference = np.where(interferer, rx, 0.0).sum(axis=1)
    sinr = own / (interference + noise)
    share = colour_bw / occupancy[beam_of_user]
    return capacity(sinr, share)
