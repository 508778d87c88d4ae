"""Experiment persistence: JSON manifests, CSV outputs, and figures.

A manifest records the full configuration, the seed, and the derived summary
statistics; re-running from a manifest must reproduce the summary
bit-identically, which the tests enforce by hashing.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .distributions import EmpiricalDist, q_gaussian_pdf
from .experiments import (
    BeckScalingReport,
    DensityEstimate,
    ExperimentConfig,
    ProbeReport,
    TTProtocolReport,
    run_experiment,
)
from .dynamics import Observable

HISTOGRAM_HEADER = ("bin_left", "bin_right", "count", "density")


@dataclass
class RunManifest:
    command: str
    config: dict
    seed: int
    workers: int | None
    wall_time_s: float
    outputs: list[str]
    summary: dict
    version: str = __version__

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @staticmethod
    def load(path) -> "RunManifest":
        with open(path) as fh:
            data = json.load(fh)
        return RunManifest(**data)


def config_to_dict(cfg: ExperimentConfig) -> dict:
    return {
        "kind": cfg.kind,
        "N": cfg.N,
        "T": cfg.T,
        "seed": cfg.seed,
        "alpha": None if cfg.alpha is None else float(cfg.alpha),
        "x0": None if cfg.x0 is None else float(cfg.x0),
        "observable": cfg.observable.kind,
        "gamma": cfg.observable.gamma,
        "workers": cfg.workers,
        "t_snapshot": cfg.t_snapshot,
        "horizons": None if cfg.horizons is None else list(cfg.horizons),
        "windows": cfg.windows if isinstance(cfg.windows, str) else [list(w) for w in cfg.windows],
    }


def config_from_dict(data: dict) -> ExperimentConfig:
    obs = (Observable.indicator(data["gamma"]) if data["observable"] == "indicator"
           else Observable.sawtooth())
    windows = data.get("windows", "dyadic")
    if not isinstance(windows, str):
        windows = tuple(tuple(w) for w in windows)
    return ExperimentConfig(
        kind=data["kind"], N=data["N"], T=data["T"], seed=data["seed"],
        alpha=data.get("alpha"), x0=data.get("x0"), observable=obs,
        workers=data.get("workers"), t_snapshot=data.get("t_snapshot"),
        horizons=None if data.get("horizons") is None else tuple(data["horizons"]),
        windows=windows,
    )


def write_histogram_csv(histogram, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(HISTOGRAM_HEADER)
        for row in histogram.csv_rows():
            writer.writerow([repr(row[0]), repr(row[1]), row[2], repr(row[3])])


def _json_safe(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def result_summary(result) -> dict:
    if isinstance(result, EmpiricalDist):
        return _json_safe(result.meta)
    if isinstance(result, DensityEstimate):
        return _json_safe(result.meta)
    if isinstance(result, BeckScalingReport):
        summary = _json_safe(result.meta)
        summary.update({
            "u_slope": result.u_slope, "u_stderr": result.u_stderr,
            "u_correlation": result.u_correlation,
            "v2_slope": result.v2_slope, "v2_stderr": result.v2_stderr,
            "v2_correlation": result.v2_correlation,
            "v_constant": result.v_constant,
            "v_constant_stderr": result.v_constant_stderr,
            "u_t": result.u_t.tolist(), "v_t": result.v_t.tolist(),
        })
        return summary
    if isinstance(result, ProbeReport):
        summary = _json_safe(result.meta)
        summary["ks_matrix"] = result.ks_matrix.tolist()
        return summary
    if isinstance(result, TTProtocolReport):
        return _json_safe(result.meta)
    raise TypeError(f"no summary for {type(result)!r}")


def _overlays_for(result):
    """Fitted-curve overlays drawn on experiment histograms."""
    if isinstance(result, EmpiricalDist):
        meta = result.meta
        overlays = []
        if "rho_fit" in meta:
            rho = meta["rho_fit"]
            overlays.append((f"Cauchy fit (rho={rho:.2f})",
                             lambda y, r=rho: r / math.pi / (1.0 + (r * np.asarray(y)) ** 2)))
        if "rho_reference" in meta:
            ref = meta["rho_reference"]
            overlays.append((f"Cauchy (rho={ref:.2f})",
                             lambda y, r=ref: r / math.pi / (1.0 + (r * np.asarray(y)) ** 2)))
        if meta.get("kind") == "temporal":
            overlays.append(("standard normal",
                             lambda y: np.exp(-np.asarray(y) ** 2 / 2.0) / math.sqrt(2 * math.pi)))
        return overlays
    if isinstance(result, TTProtocolReport):
        q, beta = result.q_fit, result.beta_fit_scaled
        return [(f"q-Gaussian fit (q={q:.3f})",
                 lambda y: q_gaussian_pdf(y, q, beta))]
    return []


def run_and_persist(cfg: ExperimentConfig, out_dir, command: str,
                    make_figure: bool = False) -> tuple[RunManifest, list[Path]]:
    """Run the experiment and write `<kind>_<seed>_<T>.{json,csv}` (and
    `.svg` when a figure is requested).  Returns the manifest together with
    every path written so the caller can clean up after a failure."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    base = f"{cfg.kind}_{cfg.seed}_{cfg.T}"
    t0 = time.perf_counter()
    result = run_experiment(cfg)
    wall = time.perf_counter() - t0
    written: list[Path] = []
    outputs: list[str] = []
    hist = getattr(result, "histogram", None)
    if hist is not None:
        csv_path = out_dir / f"{base}.csv"
        write_histogram_csv(hist, csv_path)
        written.append(csv_path)
        outputs.append(str(csv_path))
    if make_figure:
        from . import plotting

        svg_path = out_dir / f"{base}.svg"
        if hist is not None:
            plotting.save_histogram(hist, svg_path, overlays=_overlays_for(result),
                                    title=cfg.kind)
        elif isinstance(result, BeckScalingReport):
            plotting.save_scaling_plot(result.horizons, result.u_t, result.v_t,
                                       svg_path, title=cfg.kind)
        else:
            svg_path = None
        if svg_path is not None:
            written.append(svg_path)
            outputs.append(str(svg_path))
    manifest = RunManifest(
        command=command,
        config=config_to_dict(cfg),
        seed=cfg.seed,
        workers=cfg.workers,
        wall_time_s=wall,
        outputs=outputs,
        summary=result_summary(result),
    )
    manifest_path = out_dir / f"{base}.json"
    manifest_path.write_text(manifest.to_json())
    written.append(manifest_path)
    return manifest, written
