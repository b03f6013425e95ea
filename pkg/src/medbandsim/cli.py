"""Command-line front end.

Subcommands:
    ber             Monte Carlo BER sweep, written as CSV.
    pdf             Fading-factor magnitude histogram, written as CSV.
    dump-filters    Sampled pulse, root pulse, and autocorrelation curves.
    dump-objective  Timing-search objective over the offset grid for one
                    channel realization.

Configuration precedence for ber/pdf: built-in defaults, then --preset,
then --config JSON, then explicit flags.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from .channel import MultipathChannel, sample_channel
from .harness import (
    CsiMode,
    Detector,
    SimConfig,
    emit_csv,
    load_config,
    preset,
    run_ber_sweep,
    run_fading_pdf,
)
from .pulses import autocorr, rc_pulse, srrc_pulse
from .timing import SearchParams, TimingMode, timing_objective

__all__ = ["main"]


def _parse_snr_list(text: str) -> tuple:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip() != "")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad SNR list {text!r}: {exc}") from exc


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--preset", choices=["fig3", "fig4", "annexA"], help="named setup to start from")
    parser.add_argument("--config", metavar="PATH", help="JSON file of config field overrides")
    parser.add_argument("--ts", type=float, help="symbol period in seconds")
    parser.add_argument("--beta", type=float, help="pulse roll-off factor")
    parser.add_argument("--span-k", type=int, help="pulse half-span in symbol periods")
    parser.add_argument("--kappa", type=float, help="gain profile decay rate")
    parser.add_argument("--paths", type=int, help="number of channel paths")
    parser.add_argument("--pds", type=float, help="delay spread as a percentage of the symbol period")
    parser.add_argument("--frame-len", type=int, help="symbols per frame")
    parser.add_argument("--pilot-len", type=int, help="pilot symbols per frame")
    parser.add_argument("--es", type=float, help="symbol energy")
    parser.add_argument("--snr-db", type=_parse_snr_list, metavar="LIST", help="comma-separated SNR points in dB")
    parser.add_argument("--trials", type=int, help="Monte Carlo trials per SNR point")
    parser.add_argument("--detector", choices=[d.value for d in Detector], help="detector")
    parser.add_argument("--timing", choices=[m.value for m in TimingMode], help="timing search mode")
    parser.add_argument("--csi", choices=[c.value for c in CsiMode], help="fading-factor knowledge at the detector")
    parser.add_argument("--seed", type=int, help="base RNG seed")
    parser.add_argument("--channel-json", metavar="PATH", help="replay a fixed channel realization from JSON")
    parser.add_argument("--workers", type=int, default=1, help="worker threads (does not affect results)")


_FLAG_FIELDS = {
    "ts": "ts",
    "beta": "beta",
    "span_k": "span_k",
    "kappa": "kappa",
    "paths": "n_paths",
    "pds": "pds_percent",
    "frame_len": "frame_len",
    "pilot_len": "pilot_len",
    "es": "es",
    "snr_db": "snr_db_list",
    "trials": "trials",
    "seed": "seed",
}


def _build_config(args: argparse.Namespace) -> SimConfig:
    record: dict = {}
    if args.preset:
        record.update(preset(args.preset).to_dict())
    if args.config:
        with open(args.config) as handle:
            record.update(json.load(handle))
    for flag, field_name in _FLAG_FIELDS.items():
        value = getattr(args, flag)
        if value is not None:
            record[field_name] = value
    if args.detector is not None:
        record["detector"] = args.detector
    if args.timing is not None:
        record["timing_mode"] = args.timing
    if args.csi is not None:
        record["csi"] = args.csi
    if args.channel_json is not None:
        with open(args.channel_json) as handle:
            record["fixed_channel"] = json.load(handle)
    config = SimConfig.from_dict(record)
    config.validate()
    return config


def _cmd_ber(args: argparse.Namespace) -> int:
    config = _build_config(args)
    points = run_ber_sweep(config, n_workers=args.workers)
    emit_csv(points, args.out)
    for point in points:
        print(f"snr {point.snr_db:g} dB: ber {point.ber:.6e} ({point.bit_errors}/{point.data_bits} bits)")
    print(f"wrote {args.out}")
    return 0


def _cmd_pdf(args: argparse.Namespace) -> int:
    config = _build_config(args)
    result = run_fading_pdf(
        config,
        n_realizations=args.realizations,
        threshold=args.threshold,
        n_bins=args.bins,
        n_workers=args.workers,
    )
    emit_csv(result, args.out)
    print(f"P(|g| < {result.threshold:g}) = {result.p_below:.6e}")
    print(f"wrote {args.out}")
    return 0


def _cmd_dump_filters(args: argparse.Namespace) -> int:
    cfg = SimConfig(ts=args.ts, beta=args.beta, span_k=args.span_k).pulse_config
    span = (cfg.span_k + 2) * cfg.ts
    t = np.linspace(-span, span, args.points)
    rc = rc_pulse(t, cfg)
    srrc = srrc_pulse(t, cfg)
    corr = autocorr(t, cfg)
    with open(args.out, "w", newline="") as handle:
        handle.write("t,rc_pulse,srrc_pulse,autocorr\n")
        for row in zip(t, rc, srrc, corr):
            handle.write(",".join(repr(float(v)) for v in row) + "\n")
    print(f"wrote {args.out}")
    return 0


def _cmd_dump_objective(args: argparse.Namespace) -> int:
    cfg = SimConfig(ts=args.ts, beta=args.beta, span_k=args.span_k).pulse_config
    if args.channel_json:
        with open(args.channel_json) as handle:
            channel = MultipathChannel.from_dict(json.load(handle))
    else:
        rng = np.random.default_rng(args.seed if args.seed is not None else 0)
        tm = (args.pds / 100.0) * cfg.ts
        channel = sample_channel(args.paths, tm, args.kappa, rng)
    grid = SearchParams.for_pulse(cfg).grid(cfg)
    joint = timing_objective(grid, channel.gammas, channel.taus, cfg)
    rail_i = timing_objective(grid, channel.gammas.real, channel.taus, cfg)
    rail_q = timing_objective(grid, channel.gammas.imag, channel.taus, cfg)
    with open(args.out, "w", newline="") as handle:
        handle.write("t,objective_joint,objective_i,objective_q\n")
        for row in zip(grid, joint, rail_i, rail_q):
            handle.write(",".join(repr(float(v)) for v in row) + "\n")
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="medbandsim",
        description="Link-level simulator for mediumband wireless channels.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    ber = sub.add_parser("ber", help="run a BER sweep")
    _add_config_flags(ber)
    ber.add_argument("--out", default="ber.csv", help="output CSV path")
    ber.set_defaults(func=_cmd_ber)

    pdf = sub.add_parser("pdf", help="fading-factor magnitude histogram")
    _add_config_flags(pdf)
    pdf.add_argument("--realizations", type=int, default=100000, help="channel realizations")
    pdf.add_argument("--threshold", type=float, default=0.1, help="deep-fade threshold on |g|")
    pdf.add_argument("--bins", type=int, default=100, help="histogram bins")
    pdf.add_argument("--out", default="fading_pdf.csv", help="output CSV path")
    pdf.set_defaults(func=_cmd_pdf)

    filters = sub.add_parser("dump-filters", help="sample the pulse family to CSV")
    filters.add_argument("--ts", type=float, default=5e-7, help="symbol period in seconds")
    filters.add_argument("--beta", type=float, default=0.22, help="pulse roll-off factor")
    filters.add_argument("--span-k", type=int, default=6, help="pulse half-span in symbol periods")
    filters.add_argument("--points", type=int, default=2001, help="number of samples")
    filters.add_argument("--out", default="filters.csv", help="output CSV path")
    filters.set_defaults(func=_cmd_dump_filters)

    objective = sub.add_parser(
        "dump-objective", help="timing objective over the offset grid for one channel"
    )
    objective.add_argument("--ts", type=float, default=5e-7, help="symbol period in seconds")
    objective.add_argument("--beta", type=float, default=0.22, help="pulse roll-off factor")
    objective.add_argument("--span-k", type=int, default=6, help="pulse half-span in symbol periods")
    objective.add_argument("--paths", type=int, default=10, help="number of channel paths")
    objective.add_argument("--pds", type=float, default=60.0, help="delay spread percentage")
    objective.add_argument("--kappa", type=float, default=0.0, help="gain profile decay rate")
    objective.add_argument("--seed", type=int, default=0, help="RNG seed for the channel draw")
    objective.add_argument("--channel-json", metavar="PATH", help="use a fixed channel from JSON")
    objective.add_argument("--out", default="objective.csv", help="output CSV path")
    objective.set_defaults(func=_cmd_dump_objective)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.INFO, stream=sys.stderr)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
