"""Command line entry point: ``tlsgap run|sweep|list-presets``."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import TlsGapError
from .harness import (
    OUTPUT_DIR_ENV,
    PRESET_NAMES,
    config_from_dict,
    emit_plot_data,
    preset_config,
    run_preset,
    sweep,
    tomllib,
)

PRESET_HELP = {
    "fig3": "single-TLS decay in a 1 GHz gap for depths 0, 0.6, 0.9, 0.99",
    "fig4a": "qubit + 200 TLSs, Rabi max 45 kHz, heatmap over t1_min",
    "fig4b": "qubit + 200 TLSs, Rabi max 450 kHz, heatmap over t1_min",
    "angular_average": "angle-averaged depth, rate and T1 factors",
    "bulk_validation": "10^4 bulk TLSs at 87 / 870 kHz, fitted T1 and Q",
    "loss_sweep": "loss tangent vs drive field with and without the gap",
    "custom": "qubit + TLS bath with a user-defined gap and ensemble",
}


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _parse_axis(spec: str) -> tuple[str, list]:
    name, sep, values = spec.partition("=")
    if not sep or not values:
        raise TlsGapError(f"axis must look like path=v1,v2,...; got {spec!r}")
    return name.strip(), [_parse_value(v.strip()) for v in values.split(",")]


def _read_toml(path):
    if path is None:
        return {}
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _build_config(args, data: dict):
    data = dict(data)
    if getattr(args, "preset", None):
        data["preset"] = args.preset
    out = args.output_dir or os.environ.get(OUTPUT_DIR_ENV)
    if out:
        data["output_dir"] = out
    config = config_from_dict(data)
    changes = {}
    if args.seed is not None:
        changes["seeds"] = tuple(args.seed + k for k in range(len(config.seeds)))
    if args.tolerance is not None:
        changes["tolerance"] = args.tolerance
    return config.replace(**changes) if changes else config


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML configuration file")
    p.add_argument("--output-dir", help=f"output directory (else ${OUTPUT_DIR_ENV}, else the config)")
    p.add_argument("--seed", type=int, help="master seed; seeds become seed, seed+1, ...")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.add_argument("--tolerance", type=float, help="integrator relative tolerance")
    p.add_argument("--plot", action="store_true", help="also write plot-ready matrices/series")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tlsgap", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a named preset")
    run.add_argument("preset", choices=PRESET_NAMES)
    _common(run)
    sw = sub.add_parser("sweep", help="Cartesian parameter sweep over a preset")
    sw.add_argument("--preset", choices=PRESET_NAMES)
    sw.add_argument("--axis", action="append", default=[], help="path=v1,v2 (repeatable), e.g. gap.depth=0,0.99")
    _common(sw)
    sub.add_parser("list-presets", help="list presets and their defaults")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if args.command == "list-presets":
            for name in PRESET_NAMES:
                cfg = preset_config(name)
                print(f"{name:16s} {PRESET_HELP[name]}  (horizon={cfg.horizon:g} s, seeds={len(cfg.seeds)})")
            return 0
        data = _read_toml(args.config)
        if args.command == "run":
            data.pop("sweep", None)
            manifest = run_preset(_build_config(args, data), jobs=args.jobs)
        else:
            axes = dict(data.pop("sweep", {}).get("axes", {}))
            axes.update(_parse_axis(a) for a in args.axis)
            manifest = sweep(_build_config(args, data), axes, jobs=args.jobs)
        if args.plot:
            emit_plot_data(manifest)
        print(json.dumps({"status": "ok", "manifest": str(manifest.path), "failures": len(manifest.failures)}))
        return 0
    except (TlsGapError, OSError, tomllib.TOMLDecodeError) as exc:
        print(json.dumps({"status": "error", "error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2
