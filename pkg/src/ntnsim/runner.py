"""Seeded Monte-Carlo orchestration of the LEO beamforming experiment.

One drop = one user population: truth channels are built at the
estimation time t0 and the transmission time t0 + delta_t (the satellite
advances along-track in between), each scheme builds its ancillary
information and is evaluated against the t0 + delta_t truth.  Drop seeds
are derived statelessly from the master seed so results are bit-identical
for any worker count; a module failure flags the affected record instead
of aborting the run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial
from multiprocessing import Pool

import numpy as np

from .antenna import generate_beam_lattice, lattice_fit_coverage_deg
from .channel import (
    apply_losses_db,
    build_clear_sky,
    drop_terminals,
    estimate_csi,
    infer_from_location,
    perturb_reported_positions,
    view_terminals,
)
from .config import CLEAR_SKY, LEO_BEAMFORMING, TGPP, UAV_NOMA_EE, ScenarioConfig
from .errors import ContractError, DomainError, NumericalError
from .geometry import (
    elevation_at_nadir_angle,
    max_coverage_nadir_angle_deg,
    misalignment_interval,
    orbital_speed,
)
from .noma import ee_sweep
from .precoding import capacity, compute_sinr, fr_transmit, lb_mmse_precoder, mmse_precoder, zf_precoder

CSV_HEADER = "drop_id,scheme,channel_mode,system_capacity_bps,mean_sinr_db,mean_spectral_efficiency,seed"

_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class ResultRecord:
    drop_id: int
    scheme: str
    channel_mode: str
    system_capacity_bps: float
    mean_sinr_db: float
    mean_spectral_efficiency: float
    seed: int
    error: str | None = None


def _mix64(x: int) -> int:
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_drop_seed(master_seed: int, drop_id: int) -> int:
    """Stateless 64-bit drop seed; order-independent across workers."""
    return _mix64((master_seed + (drop_id + 1) * _SPLITMIX_GAMMA) & _MASK64)


def _flagged(drop_id, scheme, mode, seed, exc) -> ResultRecord:
    return ResultRecord(
        drop_id=drop_id,
        scheme=scheme,
        channel_mode=mode,
        system_capacity_bps=math.nan,
        mean_sinr_db=math.nan,
        mean_spectral_efficiency=math.nan,
        seed=seed,
        error=f"{type(exc).__name__}: {exc}",
    )


def run_drop(config: ScenarioConfig, drop_id: int) -> list[ResultRecord]:
    """Evaluate every configured scheme on one Monte-Carlo drop."""
    leo = config.leo
    ctx = config.geometry
    seed = derive_drop_seed(config.master_seed, drop_id)
    sub = np.random.default_rng(seed).integers(2**63, size=4)
    seed_users, seed_impairments, seed_csi_noise, seed_reports = (int(s) for s in sub)

    dt_ms = leo.delta_t_ms if leo.delta_t_ms is not None else misalignment_interval(ctx)
    along_km = orbital_speed(ctx) * dt_ms / 1e3
    # Users drop uniformly over the beam-lattice footprint: the lattice sized
    # to the array beamwidth unless the config pins the coverage cone, never
    # wider than the cone respecting the minimum user elevation.
    coverage = (
        leo.coverage_half_angle_deg
        if leo.coverage_half_angle_deg is not None
        else lattice_fit_coverage_deg(config.array, leo.n_beams)
    )
    coverage = min(coverage, max_coverage_nadir_angle_deg(ctx, ctx.user_min_elevation_deg))
    rim_elevation = max(elevation_at_nadir_angle(ctx, coverage), ctx.user_min_elevation_deg)
    power_w = leo.total_power_w

    users_t0 = drop_terminals(
        ctx, leo.n_users, np.random.default_rng(seed_users),
        min_elevation_deg=rim_elevation,
        g_over_t_db_k=leo.g_over_t_db_k, location_error_m=leo.location_error_m,
    )
    users_t1 = view_terminals(
        users_t0.ground_xyz_km, ctx, along_km,
        g_over_t_db_k=leo.g_over_t_db_k, location_error_m=leo.location_error_m,
    )
    build = partial(
        build_clear_sky, array=config.array, carrier_hz=leo.carrier_hz, geometry=ctx,
        bandwidth_hz=leo.bandwidth_hz, rx_gain_dbi=leo.rx_gain_dbi,
    )
    h_t0 = build(users_t0)
    h_t1 = build(users_t1)
    if leo.channel_mode == TGPP:
        losses_t0, losses_t1 = config.impairments.draw_loss_pair_db(
            leo.n_users, along_km * 1e3, np.random.default_rng(seed_impairments)
        )
        h_t0 = apply_losses_db(h_t0, losses_t0)
        h_t1 = apply_losses_db(h_t1, losses_t1)

    records = []
    for scheme in leo.schemes:
        try:
            if scheme in ("MMSE", "ZF"):
                h_est = estimate_csi(h_t0, h_t1, leo.estimation_noise_db, seed_csi_noise)
                noise = float(np.mean(h_est.noise_power_w))
                w = (
                    mmse_precoder(h_est, noise, power_w)
                    if scheme == "MMSE"
                    else zf_precoder(h_est, power_w)
                )
                sinr = compute_sinr(h_t1, w, h_t1.noise_power_w)
                link = capacity(sinr, leo.bandwidth_hz)
            elif scheme == "LB_MMSE":
                reported = perturb_reported_positions(users_t0, np.random.default_rng(seed_reports))
                reported_view = view_terminals(
                    reported, ctx, along_km,
                    g_over_t_db_k=leo.g_over_t_db_k, location_error_m=leo.location_error_m,
                )
                h_inf = infer_from_location(
                    reported_view, config.array, ctx, leo.carrier_hz,
                    bandwidth_hz=leo.bandwidth_hz, rx_gain_dbi=leo.rx_gain_dbi,
                )
                noise = float(np.mean(h_inf.noise_power_w))
                w = lb_mmse_precoder(h_inf, noise, power_w)
                sinr = compute_sinr(h_t1, w, h_t1.noise_power_w)
                link = capacity(sinr, leo.bandwidth_hz)
            elif scheme in ("FR3", "FR4"):
                lattice = generate_beam_lattice(coverage, leo.n_beams, scheme, leo.carrier_hz)
                link = fr_transmit(h_t1, lattice, config.array, power_w, scheme)
                sinr = link.sinr_linear
            else:
                raise ContractError(f"unknown scheme {scheme!r}")
            records.append(
                ResultRecord(
                    drop_id=drop_id,
                    scheme=scheme,
                    channel_mode=leo.channel_mode,
                    system_capacity_bps=link.system_capacity_bps,
                    mean_sinr_db=float(np.mean(10.0 * np.log10(np.maximum(sinr, 1e-300)))),
                    mean_spectral_efficiency=link.mean_spectral_efficiency,
                    seed=seed,
                )
            )
        except (DomainError, ContractError, NumericalError, np.linalg.LinAlgError) as exc:
            records.append(_flagged(drop_id, scheme, leo.channel_mode, seed, exc))
    return records


def run(config: ScenarioConfig, workers: int = 1) -> list[ResultRecord]:
    """All drops of the LEO experiment, canonically ordered by drop id."""
    if config.experiment != LEO_BEAMFORMING:
        raise ContractError(
            f"run() drives the {LEO_BEAMFORMING} experiment; got {config.experiment!r} "
            f"(use run_uav for {UAV_NOMA_EE})"
        )
    drop_ids = list(range(config.n_drops))
    if workers <= 1:
        batches = [run_drop(config, d) for d in drop_ids]
    else:
        with Pool(processes=workers) as pool:
            batches = pool.map(partial(run_drop, config), drop_ids)
    return [record for batch in batches for record in batch]


def run_uav(config: ScenarioConfig) -> list[dict]:
    """The airborne experiment: EE-versus-payload sweep rows."""
    if config.experiment != UAV_NOMA_EE:
        raise ContractError(f"run_uav() drives the {UAV_NOMA_EE} experiment; got {config.experiment!r}")
    return ee_sweep(
        config.uav.scenario,
        config.uav.data_sizes_bits,
        config.master_seed,
        config.uav.n_trials,
    )


def emit_results(records: list[ResultRecord], path) -> dict:
    """Write the fixed-column CSV and return the per-scheme summary.

    The summary holds mean/std system capacity per scheme plus relative
    gains (C_a - C_b) / C_b for every user-centric scheme a over every
    beam-based scheme b present in the records.
    """
    if not records:
        raise ContractError("no records to emit")
    ordered = sorted(records, key=lambda r: (r.drop_id, r.scheme))
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(CSV_HEADER + "\n")
            for r in ordered:
                fh.write(
                    f"{r.drop_id},{r.scheme},{r.channel_mode},{r.system_capacity_bps!r},"
                    f"{r.mean_sinr_db!r},{r.mean_spectral_efficiency!r},{r.seed}\n"
                )
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc
    return summarize(records)


def summarize(records: list[ResultRecord]) -> dict:
    schemes = []
    for r in records:
        if r.scheme not in schemes:
            schemes.append(r.scheme)
    per_scheme = {}
    for scheme in schemes:
        vals = [r.system_capacity_bps for r in records if r.scheme == scheme and r.error is None]
        per_scheme[scheme] = {
            "mean_capacity_bps": float(np.mean(vals)) if vals else math.nan,
            "std_capacity_bps": float(np.std(vals)) if vals else math.nan,
            "n_records": len(vals),
            "n_flagged": sum(1 for r in records if r.scheme == scheme and r.error is not None),
        }
    gains = {}
    for a in ("MMSE", "LB_MMSE", "ZF"):
        for b in ("FR3", "FR4"):
            if a in per_scheme and b in per_scheme:
                base = per_scheme[b]["mean_capacity_bps"]
                if base > 0:
                    gains[f"{a}_over_{b}"] = (per_scheme[a]["mean_capacity_bps"] - base) / base
    return {"schemes": per_scheme, "relative_gains": gains}
