"""Batch experiments: named presets, sweeps, CSV output and run manifests."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import itertools
import json
import math
import os
import platform
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import scipy

from . import __version__
from .dynamics import build_generator, propagate, quality_factor
from .ensemble import BULK_RABI_FREQUENCIES, EnsembleConfig, bulk_validation_config, sample_ensemble
from .errors import ConfigError, TlsGapError
from .fitting import fit_decay
from .gap import ANGULAR_WEIGHTS, GapSpec, SpectralDensity, angular_average, gapped_decay, load_suppression_curve
from .steady_state import LossModel, default_field_ratios, power_sweep, write_power_sweep_csv

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

OUTPUT_DIR_ENV = "TLSGAP_OUTPUT_DIR"
MANIFEST_NAME = "manifest.json"
PRESET_NAMES = ("fig3", "fig4a", "fig4b", "angular_average", "bulk_validation", "loss_sweep", "custom")
QUBIT_BATH_PRESETS = ("fig4a", "fig4b", "custom")
FIG4_T1_MIN_GRID = tuple(float(x) for x in np.logspace(-10, -4, 25))


@dataclass(frozen=True)
class ExperimentConfig:
    preset: str
    ensemble: EnsembleConfig = field(default_factory=EnsembleConfig)
    gap: GapSpec | None = None
    horizon: float = 100e-6
    t1_min_grid: tuple[float, ...] = FIG4_T1_MIN_GRID
    seeds: tuple[int, ...] = tuple(range(20))
    output_dir: str = "runs"
    tolerance: float = 1e-8
    params: dict = field(default_factory=dict)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "preset": self.preset,
            "ensemble": self.ensemble.to_dict(),
            "gap": None if self.gap is None else self.gap.to_dict(),
            "horizon": self.horizon,
            "t1_min_grid": list(self.t1_min_grid),
            "seeds": list(self.seeds),
            "output_dir": str(self.output_dir),
            "tolerance": self.tolerance,
            "params": _jsonable(self.params),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def preset_config(name: str, output_dir: str | os.PathLike | None = None) -> ExperimentConfig:
    """Default configuration for a named preset."""
    out = str(output_dir) if output_dir is not None else str(Path("runs") / name)
    if name == "fig3":
        return ExperimentConfig(
            preset=name,
            gap=GapSpec(depth=0.0, center=5e9, width=0.5e9),
            horizon=300e-6,
            t1_min_grid=(1e-6,),
            seeds=(0,),
            output_dir=out,
            tolerance=1e-10,
            params={"depths": [0.0, 0.6, 0.9, 0.99], "t1_intrinsic": 1e-6, "n_times": 3001},
        )
    if name in ("fig4a", "fig4b"):
        omega = 45e3 if name == "fig4a" else 450e3
        return ExperimentConfig(
            preset=name,
            ensemble=EnsembleConfig(omega_rabi_max=omega, n_tls=200),
            output_dir=out,
            params={"n_times": 1001},
        )
    if name == "custom":
        return ExperimentConfig(
            preset=name,
            gap=GapSpec(depth=0.0),
            t1_min_grid=(1e-7,),
            seeds=tuple(range(5)),
            output_dir=out,
            params={"n_times": 1001, "gap_mode": "anisotropic"},
        )
    if name == "bulk_validation":
        return ExperimentConfig(
            preset=name,
            ensemble=bulk_validation_config(),
            horizon=3e-6,
            t1_min_grid=(bulk_validation_config().t1_min,),
            seeds=(0, 1, 2),
            output_dir=out,
            params={
                "omegas": list(BULK_RABI_FREQUENCIES),
                "horizons": [3e-6, 0.3e-6],
                "reference_t1": [580e-9, 20e-9],
                "n_times": 301,
            },
        )
    if name == "angular_average":
        return ExperimentConfig(
            preset=name,
            gap=GapSpec(depth=0.9, s_parallel=0.9, s_perpendicular=0.3),
            seeds=(0,),
            output_dir=out,
            params={"weights": ["isotropic", "sine"], "curve": None},
        )
    if name == "loss_sweep":
        return ExperimentConfig(
            preset=name,
            seeds=(0,),
            output_dir=out,
            params={"tan_delta0": 1e-3, "t2_over_t1": 2.0, "t1_factor": 9.0, "n_fields": 61},
        )
    raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")


def config_from_dict(data: dict[str, Any]) -> ExperimentConfig:
    """Overlay a (TOML-shaped) mapping onto the defaults of its preset."""
    data = dict(data)
    if "preset" not in data:
        raise ConfigError("config needs a 'preset' key")
    base = preset_config(data.pop("preset"), data.pop("output_dir", None))
    changes: dict[str, Any] = {}
    try:
        if "ensemble" in data:
            changes["ensemble"] = base.ensemble.replace(**data.pop("ensemble"))
        if "gap" in data:
            gap = data.pop("gap")
            changes["gap"] = None if gap is None else GapSpec(**{**(base.gap.to_dict() if base.gap else {}), **gap})
            if gap and "depth" in gap and not {"s_parallel", "s_perpendicular"} & set(gap):
                changes["gap"] = dataclasses.replace(
                    changes["gap"], s_parallel=gap["depth"], s_perpendicular=gap["depth"]
                )
        if "params" in data:
            changes["params"] = {**base.params, **data.pop("params")}
        for key in ("horizon", "tolerance"):
            if key in data:
                changes[key] = float(data.pop(key))
        if "t1_min_grid" in data:
            changes["t1_min_grid"] = tuple(float(x) for x in data.pop("t1_min_grid"))
        if "seeds" in data:
            changes["seeds"] = tuple(int(x) for x in data.pop("seeds"))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if data:
        raise ConfigError(f"unknown config keys: {sorted(data)}")
    return base.replace(**changes)


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(data)


def validate_config(config: ExperimentConfig) -> None:
    """Raise :class:`ConfigError` listing every problem, before any computation."""
    problems = []
    p = config.params
    if config.preset not in PRESET_NAMES:
        problems.append(f"unknown preset {config.preset!r}")
    if not config.horizon > 0:
        problems.append("horizon must be positive")
    if not 0 < config.tolerance <= 1e-3:
        problems.append("tolerance must lie in (0, 1e-3]")
    if not config.seeds:
        problems.append("seeds must be nonempty")
    if config.preset in QUBIT_BATH_PRESETS:
        if not config.t1_min_grid or any(not t > 0 for t in config.t1_min_grid):
            problems.append("t1_min_grid must be a nonempty list of positive times")
        if int(p.get("n_times", 0)) < 2:
            problems.append("params.n_times must be >= 2")
        if p.get("gap_mode", "isotropic") not in ("isotropic", "anisotropic"):
            problems.append("params.gap_mode must be 'isotropic' or 'anisotropic'")
    if config.preset == "fig3":
        depths = np.atleast_1d(p.get("depths", []))
        if depths.size == 0 or np.any(depths < 0) or np.any(depths >= 1):
            problems.append("params.depths must be nonempty with values in [0, 1)")
        if config.gap is None:
            problems.append("fig3 needs a gap section (center, width)")
        if not p.get("t1_intrinsic", 0) > 0:
            problems.append("params.t1_intrinsic must be positive")
    if config.preset == "bulk_validation":
        omegas, horizons = list(p.get("omegas", [])), list(p.get("horizons", []))
        if not omegas or len(omegas) != len(horizons):
            problems.append("params.omegas and params.horizons must be nonempty and equal length")
        if any(not any(math.isclose(o, w) for w in BULK_RABI_FREQUENCIES) for o in omegas):
            problems.append(f"params.omegas must be drawn from {BULK_RABI_FREQUENCIES}")
    if config.preset == "angular_average":
        if config.gap is None:
            problems.append("angular_average needs a gap section")
        bad = [w for w in p.get("weights", []) if w not in ANGULAR_WEIGHTS]
        if bad or not p.get("weights"):
            problems.append(f"params.weights must be a nonempty subset of {sorted(ANGULAR_WEIGHTS)}")
        if p.get("curve") and not Path(p["curve"]).is_file():
            problems.append(f"suppression curve {p['curve']} not found")
    if config.preset == "loss_sweep":
        if not p.get("t1_factor", 0) >= 1:
            problems.append("params.t1_factor must be >= 1")
        if not p.get("tan_delta0", 0) > 0:
            problems.append("params.tan_delta0 must be positive")
    if problems:
        raise ConfigError("; ".join(problems))


# ---------------------------------------------------------------- manifests


@dataclass
class RunManifest:
    preset: str
    output_dir: str
    config: dict
    files: list[dict] = field(default_factory=list)
    wall_clock_s: float = 0.0
    versions: dict = field(default_factory=dict)
    failures: list[dict] = field(default_factory=list)
    summary: list[dict] = field(default_factory=list)

    @property
    def path(self) -> Path:
        return Path(self.output_dir) / MANIFEST_NAME

    def data_files(self) -> list[Path]:
        return [Path(self.output_dir) / f["path"] for f in self.files if not f["path"].endswith(MANIFEST_NAME)]

    def write(self) -> Path:
        with self.path.open("w") as fh:
            json.dump(_jsonable(dataclasses.asdict(self)), fh, indent=2, sort_keys=True)
            fh.write("\n")
        return self.path

    @classmethod
    def load(cls, path: str | os.PathLike) -> "RunManifest":
        path = Path(path)
        if path.is_dir():
            path = path / MANIFEST_NAME
        with path.open() as fh:
            return cls(**json.load(fh))


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _file_entries(root: Path) -> list[dict]:
    entries = []
    for p in sorted(root.rglob("*")):
        if p.is_file() and p != root / MANIFEST_NAME:
            entries.append({"path": p.relative_to(root).as_posix(), "sha256": _sha256(p), "bytes": p.stat().st_size})
    return entries


def _versions() -> dict:
    return {"tlsgap": __version__, "numpy": np.__version__, "scipy": scipy.__version__, "python": platform.python_version()}


def _prepare_output_dir(root: Path) -> None:
    """Create ``root``; clear files a previous tlsgap run left there, refuse foreign files."""
    root.mkdir(parents=True, exist_ok=True)
    old = root / MANIFEST_NAME
    if old.exists():
        for entry in RunManifest.load(old).files:
            (root / entry["path"]).unlink(missing_ok=True)
        old.unlink()
    leftovers = [p for p in root.rglob("*") if p.is_file()]
    if leftovers:
        raise ConfigError(f"output directory {root} contains files not produced by tlsgap: {leftovers[:3]}")
    for d in sorted((p for p in root.rglob("*") if p.is_dir()), reverse=True):
        d.rmdir()


def _write_rows(path: Path, header, rows) -> Path:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(x) for x in r])
    return path


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if x is None:
        return ""
    return str(x)


# ---------------------------------------------------------------- pipelines


def _run_fig3(config: ExperimentConfig, root: Path):
    p = config.params
    t1 = float(p["t1_intrinsic"])
    times = np.linspace(0.0, config.horizon, int(p.get("n_times", 3001)))
    summary = []
    for depth in np.atleast_1d(p["depths"]).astype(float):
        gap = dataclasses.replace(config.gap, depth=depth, s_parallel=depth, s_perpendicular=depth)
        trace = gapped_decay(SpectralDensity(1.0 / t1, gap), gap.center, config.horizon, config.tolerance, times=times)
        trace.to_csv(root / f"fig3_depth_{depth:.4f}.csv")
        fit = trace.fit()
        summary.append(
            {
                "depth": depth,
                "t1_fit_s": fit.t1,
                "e_folding_s": fit.crossing_time,
                "enhancement": None if fit.t1 is None else fit.t1 / t1,
                "predicted_enhancement": 1.0 / (1.0 - depth),
            }
        )
    return summary, []


def _qubit_bath_seed(job):
    """One seed across the whole t1_min grid (runs in worker processes)."""
    ens_cfg, seed, grid, gap, mode, horizon, n_times, tol = job
    rows, failures = [], []
    base = sample_ensemble(ens_cfg.replace(seed=seed))
    for t1_min in grid:
        try:
            gen = build_generator(base.with_t1_min(t1_min), gap, mode=mode)
            trace = propagate(gen, horizon, n_times, tolerance=tol)
        except TlsGapError as exc:
            failures.append({"seed": seed, "t1_min_s": t1_min, "error": f"{type(exc).__name__}: {exc}"})
            rows.append(None)
            continue
        rows.append((trace.times, trace.p_qubit, trace.metadata["method"]))
    return rows, failures


def _map(fn, jobs, n_workers):
    if n_workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(fn, jobs))


def _run_qubit_bath(config: ExperimentConfig, root: Path, n_workers: int):
    p = config.params
    n_times = int(p.get("n_times", 1001))
    gap = config.gap if config.preset == "custom" else None
    mode = p.get("gap_mode", "isotropic")
    grid = list(config.t1_min_grid)
    jobs = [(config.ensemble, s, grid, gap, mode, config.horizon, n_times, config.tolerance) for s in config.seeds]
    results = _map(_qubit_bath_seed, jobs, n_workers)

    failures = [f for _, fl in results for f in fl]
    heat_rows, fit_rows, summary = [], [], []
    for k, t1_min in enumerate(grid):
        traces, fits = [], []
        for seed, (rows, _) in zip(config.seeds, results):
            if rows[k] is None:
                continue
            times, pq, _method = rows[k]
            traces.append(pq)
            fit = fit_decay(times, pq)
            fits.append(fit)
            heat_rows.extend((t1_min, t, v, seed) for t, v in zip(times, pq))
            fit_rows.append((t1_min, seed, fit.t1, fit.crossing_time, fit.oscillatory, fit.non_decaying))
        if not traces:
            continue
        median = np.median(np.vstack(traces), axis=0)
        mfit = fit_decay(times, median)
        heat_rows.extend((t1_min, t, v, "median") for t, v in zip(times, median))
        fit_rows.append((t1_min, "median", mfit.t1, mfit.crossing_time, mfit.oscillatory, mfit.non_decaying))
        summary.append(
            {
                "t1_min_s": t1_min,
                "n_seeds": len(traces),
                "median_t1_s": float(np.median([f.t1_or_inf for f in fits])),
                "median_trace_t1_s": mfit.t1,
                "median_trace_oscillatory": mfit.oscillatory,
                "median_trace_non_decaying": mfit.non_decaying,
                "min_median_p_qubit": float(median.min()),
            }
        )
    _write_rows(root / "heatmap.csv", ("t1_min_s", "time_s", "p_qubit", "seed"), heat_rows)
    _write_rows(
        root / "fits.csv", ("t1_min_s", "seed", "t1_s", "crossing_s", "oscillatory", "non_decaying"), fit_rows
    )
    return summary, failures


def _bulk_seed(job):
    ens_cfg, seed, horizon, n_times, tol = job
    try:
        gen = build_generator(sample_ensemble(ens_cfg.replace(seed=seed)))
        trace = propagate(gen, horizon, n_times, tolerance=tol)
    except TlsGapError as exc:
        return None, {"seed": seed, "omega_rabi_max_hz": ens_cfg.omega_rabi_max, "error": f"{type(exc).__name__}: {exc}"}
    return trace, None


def _run_bulk(config: ExperimentConfig, root: Path, n_workers: int):
    p = config.params
    refs = list(p.get("reference_t1", [None] * len(p["omegas"])))
    fit_rows, summary, failures = [], [], []
    t1_min = config.t1_min_grid[0] if config.t1_min_grid else config.ensemble.t1_min
    for omega, horizon, ref in zip(p["omegas"], p["horizons"], refs):
        ens = config.ensemble.replace(omega_rabi_max=float(omega), t1_min=float(t1_min))
        jobs = [(ens, s, float(horizon), int(p.get("n_times", 301)), config.tolerance) for s in config.seeds]
        t1s = []
        for seed, (trace, fail) in zip(config.seeds, _map(_bulk_seed, jobs, n_workers)):
            if fail:
                failures.append(fail)
                continue
            trace.to_csv(root / f"bulk_{omega / 1e3:g}kHz_seed{seed}.csv")
            fit = trace.fit()
            t1s.append(fit.t1_or_inf)
            q = quality_factor(fit.t1, ens.qubit_frequency) if fit.t1 else None
            fit_rows.append((omega, seed, fit.t1, q, fit.oscillatory, fit.non_decaying))
        med = float(np.median(t1s)) if t1s else None
        summary.append(
            {
                "omega_rabi_max_hz": float(omega),
                "n_tls": ens.resolved_n_tls(),
                "median_t1_s": med,
                "quality_factor": quality_factor(med, ens.qubit_frequency) if med and math.isfinite(med) else None,
                "qubit_frequency_hz": ens.qubit_frequency,
                "reference_t1_s": ref,
            }
        )
    _write_rows(root / "bulk_fits.csv", ("omega_rabi_max_hz", "seed", "t1_s", "quality_factor", "oscillatory", "non_decaying"), fit_rows)
    return summary, failures


def _run_angular(config: ExperimentConfig, root: Path):
    p = config.params
    profiles = [("gap", config.gap)]
    if p.get("curve"):
        profiles.append((str(p["curve"]), load_suppression_curve(p["curve"])))
    summary = []
    for source, profile in profiles:
        for wname in p["weights"]:
            avg = angular_average(profile, ANGULAR_WEIGHTS[wname])
            summary.append(
                {
                    "source": source,
                    "weight": wname,
                    "mean_depth": avg.mean_depth,
                    "mean_rate_factor": avg.mean_rate_factor,
                    "mean_t1_factor": avg.mean_t1_factor,
                }
            )
    _write_rows(root / "angular.csv", list(summary[0]), [list(r.values()) for r in summary])
    return summary, []


def _run_loss(config: ExperimentConfig, root: Path):
    p = config.params
    model = LossModel(float(p["tan_delta0"]), 1.0, float(p.get("t2_over_t1", 2.0)))
    rows = power_sweep(model, float(p["t1_factor"]), default_field_ratios(int(p.get("n_fields", 61))))
    write_power_sweep_csv(rows, root / "loss_sweep.csv")
    return [{"t1_factor": float(p["t1_factor"]), "high_field_ratio": float(rows[-1, 3])}], []


def run_preset(config: ExperimentConfig, jobs: int = 1) -> RunManifest:
    """Run one preset end to end and write its data files plus ``manifest.json``."""
    validate_config(config)
    root = Path(config.output_dir)
    _prepare_output_dir(root)
    start = time.perf_counter()
    if config.preset == "fig3":
        summary, failures = _run_fig3(config, root)
    elif config.preset in QUBIT_BATH_PRESETS:
        summary, failures = _run_qubit_bath(config, root, jobs)
    elif config.preset == "bulk_validation":
        summary, failures = _run_bulk(config, root, jobs)
    elif config.preset == "angular_average":
        summary, failures = _run_angular(config, root)
    else:
        summary, failures = _run_loss(config, root)
    if summary:
        _write_rows(root / "summary.csv", list(summary[0]), [list(r.values()) for r in summary])
    manifest = RunManifest(
        preset=config.preset,
        output_dir=str(root),
        config=config.to_dict(),
        files=_file_entries(root),
        wall_clock_s=time.perf_counter() - start,
        versions=_versions(),
        failures=failures,
        summary=_jsonable(summary),
    )
    manifest.write()
    return manifest


# ---------------------------------------------------------------- sweeps


def derive_seed(base_seed: int, point_index: int) -> int:
    """Seed for sweep point ``point_index``; point 0 keeps the base seed."""
    if point_index == 0:
        return int(base_seed)
    ss = np.random.SeedSequence(entropy=int(base_seed), spawn_key=(int(point_index),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _set_path(config: ExperimentConfig, path: str, value) -> ExperimentConfig:
    head, _, tail = path.partition(".")
    if head == "ensemble" and tail:
        return config.replace(ensemble=config.ensemble.replace(**{tail: value}))
    if head == "gap" and tail:
        gap = config.gap or GapSpec()
        changes = {tail: value}
        if tail == "depth":
            changes.update(s_parallel=value, s_perpendicular=value)
        config = config.replace(gap=dataclasses.replace(gap, **changes))
        if tail == "depth" and config.preset == "fig3":
            config = config.replace(params={**config.params, "depths": [value]})
        return config
    if head == "params" and tail:
        return config.replace(params={**config.params, tail: value})
    if head in ("horizon", "tolerance") and not tail:
        return config.replace(**{head: float(value)})
    if head == "t1_min_grid" and not tail:
        return config.replace(t1_min_grid=tuple(np.atleast_1d(value).astype(float)))
    raise ConfigError(f"cannot sweep {path!r}: use ensemble.*, gap.*, params.*, horizon, tolerance or t1_min_grid")


def sweep(config: ExperimentConfig, axes: dict[str, list], jobs: int = 1) -> RunManifest:
    """Cartesian-product sweep; each point runs the preset in ``point_NNN/``.

    Writes ``sweep.csv`` (long format: axis values joined to each point's
    summary rows) and a top-level manifest.
    """
    if not axes or any(len(v) == 0 for v in axes.values()):
        raise ConfigError("sweep needs at least one nonempty axis")
    names = list(axes)
    points = list(itertools.product(*(axes[n] for n in names)))
    configs = []
    for i, values in enumerate(points):
        cfg = config
        for name, value in zip(names, values):
            cfg = _set_path(cfg, name, value)
        cfg = cfg.replace(
            seeds=tuple(derive_seed(s, i) for s in config.seeds),
            output_dir=str(Path(config.output_dir) / f"point_{i:03d}"),
        )
        validate_config(cfg)
        configs.append(cfg)

    root = Path(config.output_dir)
    _prepare_output_dir(root)
    start = time.perf_counter()
    long_rows, header, failures = [], ["point", *names, "seeds"], []
    for i, (values, cfg) in enumerate(zip(points, configs)):
        m = run_preset(cfg, jobs=jobs)
        failures.extend({"point": i, **f} for f in m.failures)
        for row in m.summary or [{}]:
            for k in row:
                if k not in header:
                    header.append(k)
            long_rows.append({"point": i, **dict(zip(names, values)), "seeds": " ".join(map(str, cfg.seeds)), **row})
    _write_rows(root / "sweep.csv", header, [[r.get(h) for h in header] for r in long_rows])
    manifest = RunManifest(
        preset=f"sweep:{config.preset}",
        output_dir=str(root),
        config={**config.to_dict(), "axes": _jsonable(axes)},
        files=_file_entries(root),
        wall_clock_s=time.perf_counter() - start,
        versions=_versions(),
        failures=failures,
        summary=_jsonable(long_rows),
    )
    manifest.write()
    return manifest


# ---------------------------------------------------------------- plot data


def emit_plot_data(manifest: RunManifest) -> list[Path]:
    """Reshape a run's CSVs into plot-ready files under ``plot/``.

    fig3 runs give one wide line-series table (a column per depth); qubit-bath
    runs give a median-p_qubit matrix with a row per t1_min and a column per
    time.  The manifest is updated in place and rewritten.
    """
    data = manifest.data_files()
    if not data:
        raise ConfigError("manifest lists no data files")
    root = Path(manifest.output_dir)
    missing = [p for p in data if not p.exists()]
    if missing:
        raise ConfigError(f"data files missing on disk: {missing[:3]}")
    plot_dir = root / "plot"
    plot_dir.mkdir(exist_ok=True)
    written = []

    fig3 = sorted(p for p in data if p.name.startswith("fig3_depth_"))
    if fig3:
        cols, times = [], None
        for path in fig3:
            arr = np.loadtxt(path, delimiter=",", skiprows=1, usecols=(0, 1), ndmin=2)
            times = arr[:, 0]
            cols.append(arr[:, 1])
        header = ["time_s"] + [f"p_excited_depth_{p.stem.removeprefix('fig3_depth_')}" for p in fig3]
        written.append(_write_rows(plot_dir / "fig3_series.csv", header, np.column_stack([times, *cols])))

    heat = root / "heatmap.csv"
    if heat in data:
        rows: dict[float, dict[float, float]] = {}
        with heat.open() as fh:
            for r in csv.DictReader(fh):
                if r["seed"] == "median":
                    rows.setdefault(float(r["t1_min_s"]), {})[float(r["time_s"])] = float(r["p_qubit"])
        t1s = sorted(rows)
        times = sorted(rows[t1s[0]])
        matrix = [[t1, *(rows[t1][t] for t in times)] for t1 in t1s]
        written.append(_write_rows(plot_dir / "fig4_matrix.csv", ["t1_min_s\\time_s", *times], matrix))

    if not written:
        # tables from the other presets are already plot-ready series
        return data
    manifest.files = _file_entries(root)
    manifest.write()
    return written
