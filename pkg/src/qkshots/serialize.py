"""File formats: kernel matrices as CSV with a JSON metadata sidecar,
scaling series as long-format CSV, budgets and fits as JSON.

All JSON is written UTF-8 with sorted keys; every file (or its sidecar)
embeds a provenance block with the tool version and the fully resolved
configuration that produced it.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .feature_map import FeatureMapConfig
from .kernels import KernelMatrix
from .scaling import ScalingFit, ScalingSeries


def _jsonable(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, float) and math.isinf(value):
        return None
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def provenance(command: str, config: dict, seed: int | None) -> dict:
    return {
        "tool": "qkshots",
        "version": __version__,
        "command": command,
        "seed": seed,
        "config": _jsonable(config),
    }


def write_json(path, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(_jsonable(payload), handle, indent=2, sort_keys=True)
        handle.write("\n")
    return path


def write_kernel_csv(path, kernel: KernelMatrix, extra: dict | None = None) -> tuple[Path, Path]:
    """Write an m x m kernel matrix as CSV plus a `.meta.json` sidecar with
    family, feature-map and sampling metadata."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow([f"k{i}" for i in range(kernel.m)])
        for row in kernel.values:
            writer.writerow([f"{v:.17g}" for v in row])
    meta = {
        "family": kernel.family,
        "gamma": kernel.gamma,
        "m": kernel.m,
        "feature_map": asdict(kernel.config),
        "metadata": dict(kernel.metadata),
    }
    meta.update(extra or {})
    meta_path = write_json(path.with_suffix(".meta.json"), meta)
    return path, meta_path


def read_kernel_csv(path, meta_path=None) -> KernelMatrix:
    """Round-trip loader for :func:`write_kernel_csv` output."""
    path = Path(path)
    meta_path = Path(meta_path) if meta_path else path.with_suffix(".meta.json")
    with open(meta_path, encoding="utf-8") as handle:
        meta = json.load(handle)
    values = np.loadtxt(path, delimiter=",", skiprows=1)
    return KernelMatrix(
        values=np.atleast_2d(values),
        family=meta["family"],
        config=FeatureMapConfig(**meta["feature_map"]),
        gamma=meta["gamma"],
        metadata=meta.get("metadata", {}),
    )


def write_series_csv(path, series_list) -> Path:
    """Long-format series CSV: statistic, n, value (plot-ready)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["statistic", "n", "value"])
        for series in series_list:
            for n, value in zip(series.qubit_counts, series.values):
                writer.writerow([series.statistic, int(n), f"{value:.17g}"])
    return path


def read_series_csv(path) -> dict[str, ScalingSeries]:
    path = Path(path)
    rows: dict[str, list[tuple[int, float]]] = {}
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        for record in reader:
            rows.setdefault(record["statistic"], []).append(
                (int(record["n"]), float(record["value"]))
            )
    out = {}
    for name, pairs in rows.items():
        pairs.sort()
        out[name] = ScalingSeries(
            statistic=name,
            qubit_counts=np.array([p[0] for p in pairs]),
            values=np.array([p[1] for p in pairs]),
        )
    return out


def fit_payload(fit: ScalingFit, extrapolations: dict[int, float] | None = None) -> dict:
    payload = fit.to_dict()
    if extrapolations:
        payload["extrapolations"] = {
            str(n): value for n, value in extrapolations.items()
        }
    return payload
