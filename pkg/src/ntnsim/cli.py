"""Command-line interface.

    ntnsim run --config leo_fig4.cfg [--seed N] [--drops N] [--out path] [--workers N]
    ntnsim sweep --config leo_fig4.cfg --param leo.n_users --values 20,50,80
    ntnsim geometry --altitude 600 --user-elev 30 --gw-elev 10 [--carrier 20e9]

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import sys

from .config import (
    LEO_BEAMFORMING,
    _parse_scalar,
    build_config,
    parse_config_text,
)
from .errors import ConfigurationError
from .geometry import (
    GeometryContext,
    link_geometry,
    max_doppler,
    misalignment_interval,
    orbital_speed,
)
from .noma import sweep_rows_to_csv
from .runner import emit_results, run, run_uav, summarize


def _load_sections(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc


def _apply_overrides(sections: dict, args) -> dict:
    if getattr(args, "seed", None) is not None:
        sections.setdefault("scenario", {})["master_seed"] = args.seed
    if getattr(args, "drops", None) is not None:
        sections.setdefault("scenario", {})["n_drops"] = args.drops
    if getattr(args, "out", None) is not None:
        sections.setdefault("scenario", {})["output_path"] = args.out
    return sections


def _print_summary(summary: dict) -> None:
    print(f"{'scheme':<10} {'mean capacity [bps]':>20} {'std [bps]':>16} {'drops':>7} {'flagged':>8}")
    for scheme, row in summary["schemes"].items():
        print(
            f"{scheme:<10} {row['mean_capacity_bps']:>20.6e} {row['std_capacity_bps']:>16.6e} "
            f"{row['n_records']:>7d} {row['n_flagged']:>8d}"
        )
    if summary["relative_gains"]:
        print("relative gains:")
        for pair, gain in summary["relative_gains"].items():
            print(f"  {pair}: {100.0 * gain:+.1f}%")


def _cmd_run(args) -> int:
    sections = _apply_overrides(_load_sections(args.config), args)
    config = build_config(sections)
    if config.experiment == LEO_BEAMFORMING:
        records = run(config, workers=args.workers)
        summary = emit_results(records, config.output_path)
        print(f"wrote {len(records)} records to {config.output_path}")
        _print_summary(summary)
    else:
        rows = run_uav(config)
        sweep_rows_to_csv(rows, config.output_path)
        print(f"wrote {len(rows)} rows to {config.output_path}")
        print(f"{'data_size_bits':>15} {'method':<8} {'ee [bits/J]':>14} {'k':>3} {'feasible':>9}")
        for row in rows:
            print(
                f"{row['data_size_bits']:>15.0f} {row['method']:<8} "
                f"{row['ee_bits_per_joule']:>14.6e} {row['k_selected']:>3d} "
                f"{str(row['feasible_flag']):>9}"
            )
    return 0


def _cmd_sweep(args) -> int:
    if "." not in args.param:
        raise ConfigurationError(f"--param must be section.key, got {args.param!r}")
    section, _, key = args.param.partition(".")
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigurationError("--values must list at least one value")
    base_sections = _apply_overrides(_load_sections(args.config), args)
    for raw in values:
        sections = {sec: dict(kv) for sec, kv in base_sections.items()}
        sections.setdefault(section, {})[key] = _parse_scalar(raw, 0)
        config = build_config(sections)
        print(f"== {args.param} = {raw} ==")
        if config.experiment == LEO_BEAMFORMING:
            records = run(config, workers=args.workers)
            _print_summary(summarize(records))
        else:
            for row in run_uav(config):
                print(
                    f"  data={row['data_size_bits']:.0f} {row['method']}: "
                    f"ee={row['ee_bits_per_joule']:.6e} k={row['k_selected']} "
                    f"feasible={row['feasible_flag']}"
                )
    return 0


def _cmd_geometry(args) -> int:
    ctx = GeometryContext(
        altitude_km=args.altitude,
        user_min_elevation_deg=args.user_elev,
        gateway_min_elevation_deg=args.gw_elev,
    )
    user = link_geometry(ctx, ctx.user_min_elevation_deg)
    gateway = link_geometry(ctx, ctx.gateway_min_elevation_deg)
    print(f"altitude: {ctx.altitude_km:.1f} km")
    print(
        f"user link ({user.elevation_deg:g} deg): slant range {user.slant_range_km:.1f} km, "
        f"delay {user.one_way_delay_ms:.3f} ms"
    )
    print(
        f"feeder link ({gateway.elevation_deg:g} deg): slant range {gateway.slant_range_km:.1f} km, "
        f"delay {gateway.one_way_delay_ms:.3f} ms"
    )
    print(f"misalignment interval: {misalignment_interval(ctx):.2f} ms")
    print(f"orbital speed: {orbital_speed(ctx):.3f} km/s")
    print(f"max Doppler at {args.carrier / 1e9:g} GHz: {max_doppler(ctx, args.carrier) / 1e3:.1f} kHz")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ntnsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the configured experiment")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--seed", type=int, default=None, help="override scenario.master_seed")
    p_run.add_argument("--drops", type=int, default=None, help="override scenario.n_drops")
    p_run.add_argument("--out", default=None, help="override scenario.output_path")
    p_run.add_argument("--workers", type=int, default=1)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="re-run while sweeping one config key")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--param", required=True, help="config key as section.key")
    p_sweep.add_argument("--values", required=True, help="comma-separated values")
    p_sweep.add_argument("--seed", type=int, default=None)
    p_sweep.add_argument("--drops", type=int, default=None)
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_geo = sub.add_parser("geometry", help="print link geometry derived quantities")
    p_geo.add_argument("--altitude", type=float, default=600.0, help="km")
    p_geo.add_argument("--user-elev", type=float, default=30.0, help="deg")
    p_geo.add_argument("--gw-elev", type=float, default=10.0, help="deg")
    p_geo.add_argument("--carrier", type=float, default=20e9, help="Hz")
    p_geo.set_defaults(func=_cmd_geometry)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
