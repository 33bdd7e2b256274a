"""Experiment runner: SNR sweeps, reference curves, geometry diagnostics.

Subcommands:
  simulate   run sweep curves from a JSON config or a named preset,
             writing one CSV per curve plus a combined SVG and a summary
  bounds     tabulate one reference curve over a sigma grid
  dimension  box-counting dimension of a codec's constellation
  stretch    perturbation stretch profile of a codec

Exit codes: 0 success, 2 configuration problem, 3 capacity limit, 4 I/O.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import re
import sys
from dataclasses import dataclass

import numpy as np

from . import analysis, channel, harness, svgplot
from .analysis import BOUND_KINDS, BoundSpec
from .codecs import CapacityError, CodecSpec
from .harness import SweepPlan

SCHEMA_VERSION = 1

CSV_HEADER = "label,snr_db,sigma,trials,distortion,std_err,sdr_db,capped"

_SOURCE_VARIANCE = {"uniform": 1.0 / 12.0, "gaussian": 1.0}

# SNR below this puts sigma outside the reference curves' domain.
_OVERLAY_SNR_FLOOR = channel.snr_db_from_sigma(analysis.SIGMA_MAX) + 1e-6


class ConfigError(Exception):
    """Invalid configuration input; maps to exit code 2."""


# ---------------------------------------------------------------------------
# configuration model

@dataclass(frozen=True)
class CurveJob:
    label: str
    spec: CodecSpec
    grid: tuple
    fit_window: tuple | None


@dataclass(frozen=True)
class OverlayJob:
    label: str
    spec: BoundSpec
    anchor: str | None


@dataclass(frozen=True)
class DimensionJob:
    label: str
    spec: CodecSpec
    epsilons: tuple
    samples: int


@dataclass(frozen=True)
class Experiment:
    name: str
    title: str
    master_seed: int
    min_trials: int
    max_trials: int
    rel_se_target: float
    curves: tuple
    overlays: tuple
    dimension_checks: tuple


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def _codec_from_dict(data, where: str) -> CodecSpec:
    _require(isinstance(data, dict), f"{where}: codec must be an object")
    allowed = {"scheme", "n", "a", "b", "alpha", "k", "p",
               "grouping_variant", "inner"}
    for key in data:
        _require(key in allowed, f"{where}: unknown codec field {key!r}")
    kwargs = dict(data)
    if "b" in kwargs and kwargs["b"] is not None:
        _require(isinstance(kwargs["b"], (list, tuple)),
                 f"{where}: b must be a list")
        kwargs["b"] = tuple(int(v) for v in kwargs["b"])
    if "inner" in kwargs and kwargs["inner"] is not None:
        kwargs["inner"] = _codec_from_dict(kwargs["inner"], where + ".inner")
    try:
        return CodecSpec(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _overlay_from_dict(data, where: str) -> OverlayJob:
    _require(isinstance(data, dict), f"{where}: overlay must be an object")
    allowed = {"kind", "n", "alpha", "m", "rate", "scale", "anchor", "label"}
    for key in data:
        _require(key in allowed, f"{where}: unknown overlay field {key!r}")
    kwargs = {k: v for k, v in data.items() if k in
              ("kind", "n", "alpha", "m", "rate", "scale")}
    try:
        spec = BoundSpec(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    anchor = data.get("anchor")
    if anchor is not None:
        _require(isinstance(anchor, str), f"{where}: anchor must be a string")
    if spec.kind == "opta_slb":
        _require(anchor is None,
                 f"{where}: opta_slb is an absolute reference; drop the anchor")
    else:
        _require(anchor is not None,
                 f"{where}: {spec.kind} carries an undetermined constant; "
                 f"set anchor to a curve label")
    label = data.get("label") or spec.describe()
    return OverlayJob(label=str(label), spec=spec, anchor=anchor)


def _check_label(label, where: str) -> str:
    _require(isinstance(label, str) and label.strip() != "",
             f"{where}: label must be a non-empty string")
    _require("," not in label and "\n" not in label,
             f"{where}: label may not contain commas or newlines")
    return label


def _grid_from(data, where: str) -> tuple:
    _require(isinstance(data, (list, tuple)) and len(data) > 0,
             f"{where}: snr grid must be a non-empty list")
    try:
        return tuple(float(v) for v in data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: snr grid entries must be numbers") from exc


def parse_config(data) -> Experiment:
    _require(isinstance(data, dict), "top level must be an object")
    allowed = {"schema_version", "name", "title", "master_seed", "snr_grid_db",
               "sweep", "curves", "overlays", "dimension_checks"}
    for key in data:
        _require(key in allowed, f"unknown top-level field {key!r}")
    _require(data.get("schema_version") == SCHEMA_VERSION,
             f"schema_version must be {SCHEMA_VERSION}")
    name = data.get("name", "experiment")
    _check_label(name, "name")

    sweep_cfg = data.get("sweep", {})
    _require(isinstance(sweep_cfg, dict), "sweep must be an object")
    for key in sweep_cfg:
        _require(key in ("min_trials", "max_trials", "rel_se_target"),
                 f"unknown sweep field {key!r}")
    min_trials = int(sweep_cfg.get("min_trials", 100_000))
    max_trials = int(sweep_cfg.get("max_trials", 10_000_000))
    rel_se = float(sweep_cfg.get("rel_se_target", 0.1))

    default_grid = None
    if "snr_grid_db" in data:
        default_grid = _grid_from(data["snr_grid_db"], "snr_grid_db")

    curves = []
    for i, entry in enumerate(data.get("curves", [])):
        where = f"curves[{i}]"
        _require(isinstance(entry, dict), f"{where}: must be an object")
        for key in entry:
            _require(key in ("label", "codec", "snr_grid_db", "fit_window_db"),
                     f"{where}: unknown field {key!r}")
        label = _check_label(entry.get("label"), where)
        spec = _codec_from_dict(entry.get("codec"), where + ".codec")
        if "snr_grid_db" in entry:
            grid = _grid_from(entry["snr_grid_db"], where + ".snr_grid_db")
        elif default_grid is not None:
            grid = default_grid
        else:
            raise ConfigError(f"{where}: no snr grid given and no default set")
        window = None
        if entry.get("fit_window_db") is not None:
            w = entry["fit_window_db"]
            _require(isinstance(w, (list, tuple)) and len(w) == 2,
                     f"{where}: fit_window_db must be [lo, hi]")
            window = (float(w[0]), float(w[1]))
            _require(window[0] < window[1],
                     f"{where}: fit window must satisfy lo < hi")
        curves.append(CurveJob(label=label, spec=spec, grid=grid,
                               fit_window=window))

    overlays = tuple(_overlay_from_dict(entry, f"overlays[{i}]")
                     for i, entry in enumerate(data.get("overlays", [])))

    dims = []
    for i, entry in enumerate(data.get("dimension_checks", [])):
        where = f"dimension_checks[{i}]"
        _require(isinstance(entry, dict), f"{where}: must be an object")
        for key in entry:
            _require(key in ("label", "codec", "epsilons", "samples"),
                     f"{where}: unknown field {key!r}")
        label = _check_label(entry.get("label"), where)
        spec = _codec_from_dict(entry.get("codec"), where + ".codec")
        eps = entry.get("epsilons")
        if eps is None:
            eps = [2.0 ** -e for e in range(4, 13)]
        _require(isinstance(eps, (list, tuple)) and len(eps) >= 2,
                 f"{where}: epsilons must list at least two box sizes")
        samples = int(entry.get("samples", 200_000))
        dims.append(DimensionJob(label=label, spec=spec,
                                 epsilons=tuple(float(e) for e in eps),
                                 samples=samples))

    _require(curves or dims, "config defines no curves and no dimension checks")
    _require(not (overlays and not curves),
             "overlays need at least one curve to plot against")

    labels = [c.label for c in curves] + [d.label for d in dims]
    _require(len(set(labels)) == len(labels), "labels must be unique")
    files = [_safe_name(v) for v in labels]
    _require(len(set(files)) == len(files),
             "labels collide after filename sanitizing")

    curve_ns = {c.spec.n for c in curves}
    curve_labels = {c.label for c in curves}
    for i, ov in enumerate(overlays):
        _require(ov.spec.n in curve_ns,
                 f"overlays[{i}]: no curve uses n={ov.spec.n}")
        if ov.anchor is not None:
            _require(ov.anchor in curve_labels,
                     f"overlays[{i}]: anchor {ov.anchor!r} names no curve")

    return Experiment(
        name=name,
        title=data.get("title", name),
        master_seed=int(data.get("master_seed", 0x5EED)),
        min_trials=min_trials,
        max_trials=max_trials,
        rel_se_target=rel_se,
        curves=tuple(curves),
        overlays=overlays,
        dimension_checks=tuple(dims),
    )


# ---------------------------------------------------------------------------
# presets


def _span(lo: int, hi: int, step: int) -> list:
    return [float(v) for v in range(lo, hi + 1, step)]


def _preset_fig3():
    return {
        "schema_version": 1,
        "name": "fig3",
        "title": "bandwidth expansion n=4: fractal and folded codes",
        "master_seed": 24269,
        "snr_grid_db": _span(0, 80, 5),
        "sweep": {"min_trials": 100_000, "max_trials": 2_000_000,
                  "rel_se_target": 0.1},
        "curves": [
            {"label": "fractal alpha=3",
             "codec": {"scheme": "scheme1", "n": 4, "alpha": 3.0},
             "fit_window_db": [40.0, 80.0]},
            {"label": "fractal alpha=4",
             "codec": {"scheme": "scheme1", "n": 4, "alpha": 4.0},
             "fit_window_db": [40.0, 80.0]},
            {"label": "shift map a=3",
             "codec": {"scheme": "shift_map", "n": 4, "a": 3},
             "fit_window_db": [50.0, 80.0]},
            {"label": "repetition",
             "codec": {"scheme": "repetition", "n": 4},
             "fit_window_db": [20.0, 80.0]},
        ],
        "overlays": [
            {"kind": "opta_slb", "n": 4},
            {"kind": "scheme1_upper", "n": 4, "alpha": 3.0,
             "anchor": "fractal alpha=3"},
            {"kind": "scheme1_upper", "n": 4, "alpha": 4.0,
             "anchor": "fractal alpha=4"},
            {"kind": "shiftmap_upper", "n": 4, "anchor": "shift map a=3"},
        ],
    }


def _preset_fig4():
    return {
        "schema_version": 1,
        "name": "fig4",
        "title": "layered digit codes, n=4",
        "master_seed": 24269,
        "snr_grid_db": _span(0, 100, 5),
        "sweep": {"min_trials": 100_000, "max_trials": 2_000_000,
                  "rel_se_target": 0.1},
        "curves": [
            {"label": "layered standard",
             "codec": {"scheme": "scheme2", "n": 4,
                       "grouping_variant": "standard"},
             "fit_window_db": [40.0, 100.0]},
            {"label": "layered shifted",
             "codec": {"scheme": "scheme2", "n": 4,
                       "grouping_variant": "shifted"},
             "fit_window_db": [40.0, 100.0]},
        ],
        "overlays": [
            {"kind": "opta_slb", "n": 4},
            {"kind": "scheme2_upper", "n": 4, "rate": 2.0,
             "anchor": "layered standard"},
        ],
    }


def _preset_bounds_gallery():
    return {
        "schema_version": 1,
        "name": "bounds-gallery",
        "title": "reference curve shapes against one measured code",
        "master_seed": 24269,
        "snr_grid_db": _span(10, 50, 5),
        "sweep": {"min_trials": 20_000, "max_trials": 200_000,
                  "rel_se_target": 0.2},
        "curves": [
            {"label": "shift map a=3 n=2",
             "codec": {"scheme": "shift_map", "n": 2, "a": 3},
             "fit_window_db": [20.0, 50.0]},
        ],
        "overlays": [
            {"kind": "opta_slb", "n": 2},
            {"kind": "shiftmap_upper", "n": 2, "anchor": "shift map a=3 n=2"},
            {"kind": "shiftmap_lower", "n": 2, "scale": 0.1,
             "anchor": "shift map a=3 n=2"},
            {"kind": "scheme1_upper", "n": 2, "alpha": 4.0,
             "anchor": "shift map a=3 n=2"},
            {"kind": "scheme2_upper", "n": 2, "rate": 2.0,
             "anchor": "shift map a=3 n=2"},
            {"kind": "type1_upper", "n": 2, "anchor": "shift map a=3 n=2"},
            {"kind": "type2_upper", "n": 2, "rate": 2.0,
             "anchor": "shift map a=3 n=2"},
            {"kind": "hda_lower", "n": 2, "m": 1,
             "anchor": "shift map a=3 n=2"},
        ],
    }


def _preset_dimension_check():
    eps = [2.0 ** -e for e in range(4, 13)]
    return {
        "schema_version": 1,
        "name": "dimension-check",
        "title": "box-counting dimension checks",
        "master_seed": 24269,
        "dimension_checks": [
            {"label": "fractal n=2 alpha=4",
             "codec": {"scheme": "scheme1", "n": 2, "alpha": 4.0},
             "epsilons": eps, "samples": 250_000},
            {"label": "fractal n=2 alpha=8",
             "codec": {"scheme": "scheme1", "n": 2, "alpha": 8.0},
             "epsilons": eps, "samples": 250_000},
            {"label": "shift map a=3 n=2 image",
             "codec": {"scheme": "shift_map", "n": 2, "a": 3},
             "epsilons": [2.0 ** -e for e in range(4, 11)],
             "samples": 250_000},
        ],
    }


PRESETS = {
    "fig3": _preset_fig3,
    "fig4": _preset_fig4,
    "bounds-gallery": _preset_bounds_gallery,
    "dimension-check": _preset_dimension_check,
}


# ---------------------------------------------------------------------------
# emitters


def _safe_name(label: str) -> str:
    cleaned = re.sub(r"[^A-Za-z0-9._-]+", "_", label).strip("_")
    return cleaned or "item"


def format_point(label: str, p) -> str:
    return ",".join([
        label,
        repr(p.snr_db),
        repr(p.sigma),
        str(p.trials),
        repr(p.distortion),
        repr(p.std_err),
        repr(p.sdr_db),
        "1" if p.capped else "0",
    ])


def write_curve_csv(path: str, label: str, points) -> None:
    lines = [CSV_HEADER]
    lines.extend(format_point(label, p) for p in points)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_curve_csv(path: str):
    """Parse an emitted curve CSV back into (label, [SdrPoint]) pairs."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().split("\n") if ln]
    if not lines or lines[0] != CSV_HEADER:
        raise ConfigError(f"{path}: missing curve CSV header")
    out = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 8:
            raise ConfigError(f"{path}: malformed row {ln!r}")
        label = parts[0]
        point = harness.SdrPoint(
            snr_db=float(parts[1]),
            sigma=float(parts[2]),
            trials=int(parts[3]),
            distortion=float(parts[4]),
            std_err=float(parts[5]),
            sdr_db=float(parts[6]),
            capped=parts[7] == "1",
        )
        out.append((label, point))
    return out


def _overlay_points(job: OverlayJob, curves_by_label, all_points, src_var):
    snrs = [p.snr_db for pts in all_points.values() for p in pts]
    snr_lo = max(min(snrs), _OVERLAY_SNR_FLOOR)
    snr_hi = max(snrs)
    if snr_hi <= snr_lo:
        return job.spec, []
    grid = np.linspace(snr_lo, snr_hi, 121)
    spec = job.spec
    if job.anchor is not None:
        anchor_job = curves_by_label[job.anchor]
        pts = [p for p in all_points[job.anchor] if p.distortion > 0.0]
        if anchor_job.fit_window is not None:
            lo, hi = anchor_job.fit_window
            inside = [p for p in pts if lo <= p.snr_db <= hi]
            pts = inside or pts
        if not pts:
            raise ConfigError(
                f"overlay {job.label!r}: anchor curve has no usable points")
        best = max(pts, key=lambda p: p.snr_db)
        spec = analysis.anchored(spec, best.sigma, best.distortion)
    sig = channel.sigma_from_snr_db(grid)
    vals = analysis.bound_eval(spec, sig)
    sdr = 10.0 * np.log10(src_var / vals)
    return spec, list(zip(grid.tolist(), sdr.tolist()))


def _fit_note(job: CurveJob, points) -> str:
    if job.fit_window is None:
        return "no fit window"
    finite = [(p.snr_db, p.sdr_db) for p in points if math.isfinite(p.sdr_db)]
    if len(finite) < 4:
        return "fit window: too few points"
    x, y = zip(*finite)
    try:
        fit = analysis.slope_fit(x, y, job.fit_window)
    except ValueError:
        return "fit window: too few points"
    lo, hi = job.fit_window
    return (f"slope[{lo:g}..{hi:g} dB] = {fit.slope:.3f} "
            f"over {fit.n_points} points")


# ---------------------------------------------------------------------------
# subcommand drivers


def _resolve_workers(flag_value):
    if flag_value is not None:
        value = flag_value
    else:
        raw = os.environ.get("JSCC_WORKERS")
        if raw is None:
            return 1
        try:
            value = int(raw)
        except ValueError as exc:
            raise ConfigError(f"JSCC_WORKERS must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ConfigError("worker count must be at least 1")
    return value


def _load_experiment(args) -> Experiment:
    if args.preset is not None:
        data = PRESETS[args.preset]()
    else:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"{args.config}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
        except OSError as exc:
            raise ConfigError(f"cannot read {args.config}: {exc}") from exc
    exp = parse_config(data)
    if args.seed is not None:
        exp = dataclasses.replace(exp, master_seed=args.seed)
    return exp


def run_simulate(args) -> int:
    exp = _load_experiment(args)
    workers = _resolve_workers(args.workers)
    out_dir = args.out
    os.makedirs(out_dir, exist_ok=True)

    summary = [f"experiment {exp.name}",
               f"seed {exp.master_seed}",
               f"workers {workers}"]
    all_points = {}
    curves_by_label = {c.label: c for c in exp.curves}
    src_vars = {}
    for job in exp.curves:
        try:
            plan = SweepPlan(codec=job.spec, snr_grid_db=job.grid,
                             min_trials=exp.min_trials,
                             max_trials=exp.max_trials,
                             rel_se_target=exp.rel_se_target,
                             master_seed=exp.master_seed)
        except ValueError as exc:
            raise ConfigError(f"curve {job.label!r}: {exc}") from exc
        curve = harness.sweep(plan, workers=workers)
        all_points[job.label] = curve.points
        src_vars[job.label] = _SOURCE_VARIANCE[job.spec.source_kind]
        path = os.path.join(out_dir, _safe_name(job.label) + ".csv")
        write_curve_csv(path, job.label, curve.points)
        capped = sum(1 for p in curve.points if p.capped)
        summary.append(f"curve {job.label}: {len(curve.points)} points, "
                       f"{capped} capped, {_fit_note(job, curve.points)}")

    series = []
    for job in exp.curves:
        pts = [(p.snr_db, p.sdr_db) for p in all_points[job.label]
               if math.isfinite(p.sdr_db)]
        series.append({"label": job.label, "points": pts, "dashed": False})
    for job in exp.overlays:
        anchor_var = (src_vars[job.anchor] if job.anchor is not None
                      else 1.0 / 12.0)
        fitted, pts = _overlay_points(job, curves_by_label, all_points,
                                      anchor_var)
        series.append({"label": job.label, "points": pts, "dashed": True})
        if job.anchor is None:
            summary.append(f"overlay {job.label}: absolute")
        else:
            summary.append(f"overlay {job.label}: anchored to {job.anchor}, "
                           f"scale {fitted.scale:.6g}")

    for check_index, job in enumerate(exp.dimension_checks):
        codec = harness.cached_codec(job.spec)
        rng = channel.derived_rng(exp.master_seed, 0xD1, check_index)
        est = analysis.boxcount_dimension(
            analysis.constellation_sampler(codec), job.epsilons, job.samples,
            rng=rng)
        path = os.path.join(out_dir, _safe_name(job.label) + ".csv")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("epsilon,count\n")
            for eps, cnt in zip(est.epsilons, est.counts):
                fh.write(f"{eps!r},{cnt}\n")
        summary.append(f"dimension {job.label}: fitted {est.fitted_dimension:.4f}, "
                       f"saturated {int(est.saturated)}, "
                       f"residual {est.fit_residual:.4f}")

    if exp.curves:
        svg = svgplot.svg_document(series, title=exp.title,
                                   x_label="channel SNR (dB)",
                                   y_label="SDR (dB)")
        with open(os.path.join(out_dir, _safe_name(exp.name) + ".svg"),
                  "w", encoding="utf-8", newline="\n") as fh:
            fh.write(svg)

    text = "\n".join(summary) + "\n"
    with open(os.path.join(out_dir, _safe_name(exp.name) + "_summary.txt"),
              "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    sys.stdout.write(text)
    return 0


def _codec_from_json(text: str) -> CodecSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--codec: {exc.msg} at column {exc.colno}") from exc
    return _codec_from_dict(data, "--codec")


def run_bounds(args) -> int:
    kwargs = {"kind": args.kind, "n": args.n, "scale": args.scale,
              "rate": args.rate}
    if args.alpha is not None:
        kwargs["alpha"] = args.alpha
    if args.m is not None:
        kwargs["m"] = args.m
    try:
        spec = BoundSpec(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    lo, hi = args.sigma_lo, args.sigma_hi
    if not 0.0 < lo < hi or hi > analysis.SIGMA_MAX:
        raise ConfigError(
            f"sigma range must satisfy 0 < lo < hi <= {analysis.SIGMA_MAX:.6f}")
    sig = np.geomspace(lo, hi, args.points)
    vals = analysis.bound_eval(spec, sig)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("kind,sigma,distortion\n")
        for s, v in zip(sig.tolist(), vals.tolist()):
            fh.write(f"{spec.kind},{s!r},{v!r}\n")
    print(f"wrote {args.points} rows for {spec.describe()} to {args.out}")
    return 0


def run_dimension(args) -> int:
    spec = _codec_from_json(args.codec)
    try:
        codec = harness.cached_codec(spec)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if args.epsilons is not None:
        eps = tuple(float(v) for v in args.epsilons.split(","))
    else:
        eps = tuple(2.0 ** -e for e in range(4, 13))
    rng = channel.derived_rng(args.seed, 0xD1, 0)
    try:
        est = analysis.boxcount_dimension(
            analysis.constellation_sampler(codec), eps, args.samples, rng=rng)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("epsilon,count\n")
        for e, c in zip(est.epsilons, est.counts):
            fh.write(f"{e!r},{c}\n")
    print(f"fitted_dimension {est.fitted_dimension:.4f} "
          f"saturated {int(est.saturated)} residual {est.fit_residual:.4f}")
    return 0


def run_stretch(args) -> int:
    spec = _codec_from_json(args.codec)
    try:
        codec = harness.cached_codec(spec)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if args.deltas is not None:
        deltas = tuple(float(v) for v in args.deltas.split(","))
    else:
        deltas = tuple(np.geomspace(1e-2, 1e-4, 7).tolist())
    rng = channel.derived_rng(args.seed, 0x57, 0)
    try:
        prof = analysis.stretch_profile(codec, deltas, args.samples, rng=rng)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("delta,mean_square\n")
        for d, v in zip(prof.deltas, prof.mean_square):
            fh.write(f"{d!r},{v!r}\n")
    print(f"gamma {prof.gamma:.4f} residual {prof.fit_residual:.4f}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jscc",
        description="Delay-limited joint source-channel code simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run sweep curves from a config")
    group = sim.add_mutually_exclusive_group(required=True)
    group.add_argument("--config", help="JSON experiment file")
    group.add_argument("--preset", choices=sorted(PRESETS),
                       help="built-in experiment")
    sim.add_argument("--seed", type=int, default=None,
                     help="override the master seed")
    sim.add_argument("--out", default=".", help="output directory")
    sim.add_argument("--workers", type=int, default=None,
                     help="worker threads (default: JSCC_WORKERS or 1)")
    sim.set_defaults(func=run_simulate)

    bnd = sub.add_parser("bounds", help="tabulate a reference curve")
    bnd.add_argument("--kind", required=True, choices=BOUND_KINDS)
    bnd.add_argument("--n", required=True, type=int)
    bnd.add_argument("--alpha", type=float, default=None)
    bnd.add_argument("--m", type=int, default=None)
    bnd.add_argument("--rate", type=float, default=1.0)
    bnd.add_argument("--scale", type=float, default=1.0)
    bnd.add_argument("--sigma-lo", type=float, default=1e-4)
    bnd.add_argument("--sigma-hi", type=float, default=0.7)
    bnd.add_argument("--points", type=int, default=25)
    bnd.add_argument("--out", required=True)
    bnd.set_defaults(func=run_bounds)

    dim = sub.add_parser("dimension", help="box-counting dimension of a codec")
    dim.add_argument("--codec", required=True,
                     help="codec spec as JSON, e.g. "
                          '\'{"scheme":"scheme1","n":2,"alpha":4}\'')
    dim.add_argument("--epsilons", default=None,
                     help="comma-separated box sizes, decreasing")
    dim.add_argument("--samples", type=int, default=200_000)
    dim.add_argument("--seed", type=int, default=0x5EED)
    dim.add_argument("--out", required=True)
    dim.set_defaults(func=run_dimension)

    stp = sub.add_parser("stretch", help="stretch profile of a codec")
    stp.add_argument("--codec", required=True)
    stp.add_argument("--deltas", default=None,
                     help="comma-separated perturbations, decreasing")
    stp.add_argument("--samples", type=int, default=100_000)
    stp.add_argument("--seed", type=int, default=0x5EED)
    stp.add_argument("--out", required=True)
    stp.set_defaults(func=run_stretch)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
