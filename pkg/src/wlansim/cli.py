"""Command-line interface: one subcommand per simulator area.

Every file-producing invocation writes a ``manifest.json`` next to its
outputs recording the tool version, a SHA-256 digest of the input
configuration, the seed in effect, a timestamp and the produced files.

Exit codes: 0 success, 1 validation error, 2 I/O error, 3 internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__, nlms
from .arrays import (
    Scenario,
    WAVEFORM_SINUSOID,
    array_pattern,
    pattern_to_csv,
    steering_vector,
)
from .channels import Band, Plan, channel_by_id, channels_to_csv, list_channels, overlap_fraction, plan_channels
from .propagation import GeoPoint, PathLossModel
from .spectrum import dft_magnitude, spectrum_to_csv, suppression_report
from .survey import (
    fit_path_loss,
    interference_report,
    interference_to_csv,
    parse_log,
    summaries_to_csv,
    summarize,
)
from .throughput import (
    Modulation,
    PhyConfig,
    Standard,
    curve_to_csv,
    throughput_vs_distance,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_INTERNAL = 3

OUTPUT_DIR_ENV = "WLANSIM_OUTPUT_DIR"

SPECTRUM_SIZE = 512
PATTERN_GRID_POINTS = 721


def _default_scenario_path() -> Path:
    return Path(str(resources.files("wlansim").joinpath("data/default_scenario.json")))


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def _write_manifest(out_dir: Path, digest: str, seed: int | None, outputs: list[str]) -> None:
    manifest = {
        "tool_version": __version__,
        "config_sha256": digest,
        "seed": seed,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "outputs": outputs,
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")


def _resolve_out_dir(arg_value: str | None) -> Path:
    if arg_value:
        return Path(arg_value)
    env = os.environ.get(OUTPUT_DIR_ENV)
    return Path(env) if env else Path(".")


def _overlap_plan(plan_arg: str | None, ids: list[int]) -> Plan:
    if plan_arg is not None:
        return Plan.ISM24 if plan_arg == "ism24" else Plan.UNII
    for plan in (Plan.ISM24, Plan.UNII):
        if all(any(c.id == i for c in plan_channels(plan)) for i in ids):
            return plan
    raise KeyError(f"channels {ids} are not both in one plan")


def cmd_channels(args: argparse.Namespace) -> int:
    if args.overlap:
        plan = _overlap_plan(args.plan, args.overlap)
        a = channel_by_id(args.overlap[0], plan)
        b = channel_by_id(args.overlap[1], plan)
        print(overlap_fraction(a, b))
        return EXIT_OK
    plan_arg = args.plan or "unii"
    if plan_arg == "ism24":
        chans = plan_channels(Plan.ISM24)
    elif plan_arg == "unii":
        chans = plan_channels(Plan.UNII)
    else:
        chans = list_channels(Band(plan_arg))
    channels_to_csv(chans, sys.stdout)
    return EXIT_OK


def cmd_beamform(args: argparse.Namespace) -> int:
    scenario_path = Path(args.scenario) if args.scenario else _default_scenario_path()
    scenario = Scenario.from_json_file(scenario_path)
    if args.iterations is not None:
        scenario = Scenario.from_dict({**scenario.to_dict(), "iterations": args.iterations})
    if args.seed is not None:
        scenario = Scenario.from_dict({**scenario.to_dict(), "seed": args.seed})

    out_dir = _resolve_out_dir(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    stride = max(1, scenario.iterations // 10)
    trace = nlms.run(scenario, snapshot_stride=stride)

    cfg = scenario.array
    grid = [(-math.pi / 2) + k * math.pi / (PATTERN_GRID_POINTS - 1) for k in range(PATTERN_GRID_POINTS)]
    pattern = array_pattern(trace.converged_weights, cfg, grid)

    size = min(SPECTRUM_SIZE, scenario.iterations)
    before = trace.first_element_input[-size:]
    after = trace.outputs[-size:]

    outputs = ["trace.csv", "weights.csv", "pattern.csv", "spectrum_before.csv", "spectrum_after.csv"]
    with open(out_dir / "trace.csv", "w", encoding="utf-8", newline="") as f:
        nlms.trace_to_csv(trace, f)
    with open(out_dir / "weights.csv", "w", encoding="utf-8", newline="") as f:
        nlms.weights_to_csv(trace, f)
    with open(out_dir / "pattern.csv", "w", encoding="utf-8", newline="") as f:
        pattern_to_csv(pattern, f)
    # "Before" is the raw element-0 input; "after" the adapted array output.
    with open(out_dir / "spectrum_before.csv", "w", encoding="utf-8", newline="") as f:
        spectrum_to_csv(dft_magnitude(before, size), f)
    with open(out_dir / "spectrum_after.csv", "w", encoding="utf-8", newline="") as f:
        spectrum_to_csv(dft_magnitude(after, size), f)
    # Digest the effective scenario so flag overrides are captured too.
    digest = hashlib.sha256(
        json.dumps(scenario.to_dict(), sort_keys=True).encode()
    ).hexdigest()
    _write_manifest(out_dir, digest, scenario.seed, outputs)

    final_err = float(np.mean(trace.error_power[-max(1, scenario.iterations // 10):]))
    summary = f"final_error_power={final_err:.6e}"

    desired = scenario.desired_source()
    interferers = [s for s in scenario.sources if s.role != "desired"]
    if interferers:
        gain_d = _direction_gain(trace.converged_weights, cfg, desired.angle_rad)
        gain_i = max(_direction_gain(trace.converged_weights, cfg, s.angle_rad) for s in interferers)
        summary += f" null_depth_db={gain_d - gain_i:.2f}"
        first = interferers[0]
        if desired.waveform == WAVEFORM_SINUSOID and first.waveform == WAVEFORM_SINUSOID:
            d_bin = round(desired.normalized_freq * size) % size
            i_bin = round(first.normalized_freq * size) % size
            if d_bin != i_bin:
                d_chg, i_chg = suppression_report(before, after, d_bin, i_bin, size)
                summary += f" desired_change_db={d_chg:.2f} interferer_change_db={i_chg:.2f}"
    plateau = trace.plateau_iteration()
    if plateau is not None:
        summary += f" plateau_iteration={plateau}"
    print(summary)
    return EXIT_OK


def _direction_gain(w: np.ndarray, cfg, angle: float) -> float:
    mag = abs(np.vdot(w, steering_vector(angle, cfg)))
    return 20.0 * math.log10(mag) if mag > 0 else -math.inf


def cmd_coverage(args: argparse.Namespace) -> int:
    out_dir = _resolve_out_dir(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    log_path = Path(args.log)
    with open(log_path, "r", encoding="utf-8") as f:
        records, errors = parse_log(f, args.format)
    print(f"parsed {len(records)} records, {len(errors)} malformed lines")
    for lineno, message in errors:
        print(f"  line {lineno}: {message}", file=sys.stderr)

    ap_position = None
    if args.ap_lat is not None and args.ap_lon is not None:
        ap_position = GeoPoint(args.ap_lat, args.ap_lon)
    summaries = summarize(records, ap_position=ap_position)
    plan = Plan.ISM24 if args.plan == "ism24" else Plan.UNII
    pairs = interference_report(summaries, plan, coverage_threshold_dbm=args.coverage_threshold)

    outputs = ["summaries.csv", "interference.csv"]
    with open(out_dir / "summaries.csv", "w", encoding="utf-8", newline="") as f:
        summaries_to_csv(summaries, f)
    with open(out_dir / "interference.csv", "w", encoding="utf-8", newline="") as f:
        interference_to_csv(pairs, f)

    if args.fit:
        if ap_position is None:
            raise ValueError("--fit requires --ap-lat and --ap-lon for distances")
        points = [
            (s.distance_m, s.mean_rssi_dbm)
            for s in summaries
            if s.distance_m is not None and s.distance_m > 0
        ]
        fit = fit_path_loss(points, args.tx_eirp)
        print(
            f"fit: exponent={fit.exponent:.4f} reference_loss_db={fit.reference_loss_db:.2f} "
            f"residual_rms_db={fit.residual_rms_db:.2f} samples={fit.sample_count}"
        )

    _write_manifest(out_dir, _sha256_file(log_path), None, outputs)
    return EXIT_OK


def cmd_throughput(args: argparse.Namespace) -> int:
    out_dir = _resolve_out_dir(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = PhyConfig(
        standard=Standard(args.standard),
        channel_width_mhz=args.width,
        spatial_streams=args.streams,
        modulation=Modulation.QAM256 if args.modulation == "qam256" else Modulation.QAM64,
    )
    model = PathLossModel.free_space(args.frequency)
    if args.exponent is not None:
        model = PathLossModel(model.reference_loss_db, args.exponent, args.frequency)
    distances = [args.min_distance + k * args.step for k in range(args.points)]
    curve = throughput_vs_distance(cfg, model, args.tx_eirp, distances)

    with open(out_dir / "throughput.csv", "w", encoding="utf-8", newline="") as f:
        curve_to_csv(cfg, model, args.tx_eirp, curve, f)
    config = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    digest = hashlib.sha256(json.dumps(config, sort_keys=True).encode()).hexdigest()
    _write_manifest(out_dir, digest, None, ["throughput.csv"])
    print(f"cap_mbps={max(r for _, r in curve)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wlansim",
        description="WLAN channel, propagation and adaptive-beamforming simulator",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("channels", help="print a channel plan or one overlap fraction")
    p.add_argument(
        "--plan",
        default=None,
        choices=["ism24", "unii", "unii_a", "unii_b", "unii_c"],
        help="channel plan or sub-band (default: unii for listing, inferred for --overlap)",
    )
    p.add_argument(
        "--overlap",
        nargs=2,
        type=int,
        metavar=("A", "B"),
        help="print the overlap fraction of two channel ids from the plan",
    )
    p.set_defaults(func=cmd_channels)

    p = sub.add_parser("beamform", help="run the adaptive beamformer and export reports")
    p.add_argument("--scenario", help="scenario JSON file (default: shipped scenario)")
    p.add_argument("--out", help=f"output directory (default: ${OUTPUT_DIR_ENV} or .)")
    p.add_argument("--iterations", type=int, help="override the scenario iteration count")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.set_defaults(func=cmd_beamform)

    p = sub.add_parser("coverage", help="ingest a survey log and report coverage/interference")
    p.add_argument("log", help="survey log file")
    p.add_argument("--format", default="csv", choices=["csv", "kml"])
    p.add_argument("--plan", default="ism24", choices=["ism24", "unii"])
    p.add_argument("--out", help=f"output directory (default: ${OUTPUT_DIR_ENV} or .)")
    p.add_argument("--coverage-threshold", type=float, default=-80.0,
                   help="RSSI threshold (dBm) defining an AP's coverage region")
    p.add_argument("--ap-lat", type=float, help="AP latitude for distance computation")
    p.add_argument("--ap-lon", type=float, help="AP longitude for distance computation")
    p.add_argument("--fit", action="store_true", help="fit a path-loss exponent to the summaries")
    p.add_argument("--tx-eirp", type=float, default=20.0, help="transmit EIRP (dBm) for the fit")
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("throughput", help="export a throughput-vs-distance curve")
    p.add_argument("--standard", default="ac", choices=["n", "ac"])
    p.add_argument("--streams", type=int, default=3)
    p.add_argument("--width", type=int, default=20, help="channel width in MHz")
    p.add_argument("--modulation", default="qam64", choices=["qam64", "qam256"])
    p.add_argument("--tx-eirp", type=float, default=20.0)
    p.add_argument("--frequency", type=float, default=5e9, help="carrier frequency in Hz")
    p.add_argument("--exponent", type=float, help="path-loss exponent (default: free space)")
    p.add_argument("--min-distance", type=float, default=1.0)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--points", type=int, default=30)
    p.add_argument("--out", help=f"output directory (default: ${OUTPUT_DIR_ENV} or .)")
    p.set_defaults(func=cmd_throughput)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError) as exc:
        message = exc.args[0] if exc.args else str(exc)
        print(f"error: {message}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
