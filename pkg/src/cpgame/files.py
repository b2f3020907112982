"""CSV, config, and manifest I/O.

Every float is written with repr (shortest round-trip form), so emitted
files re-ingest losslessly and replays compare bit-identical. Interval
indices are 1-based on disk.
"""

import csv
import hashlib
import json
import os

import numpy as np
import yaml

from . import __version__
from .kernels import BACKEND
from .model import ScenarioError, build_scenario


def _fmt(value):
    return repr(float(value))


def read_series(path, base_dir=None):
    """Read an `interval,value` CSV: 1-based, strictly increasing, dense."""
    if base_dir and not os.path.isabs(path):
        path = os.path.join(base_dir, path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["interval", "value"]:
            raise ScenarioError(f"{path}: expected header 'interval,value'")
        values = []
        for row in reader:
            if not row:
                continue
            idx, value = int(row[0]), float(row[1])
            if idx != len(values) + 1:
                raise ScenarioError(f"{path}: interval indices must be 1..n dense, got {idx}")
            values.append(value)
    if not values:
        raise ScenarioError(f"{path}: no data rows")
    return np.array(values)


def write_series(path, values):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["interval", "value"])
        for t, value in enumerate(values, start=1):
            writer.writerow([t, _fmt(value)])


def read_table(path):
    """Generic reader for emitted CSVs: (header, rows of strings)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [row for row in reader if row]


def write_table(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def load_config(path):
    with open(path) as fh:
        config = yaml.safe_load(fh)
    if not isinstance(config, dict):
        raise ScenarioError(f"{path}: config must be a mapping")
    return config


def scenario_from_config_file(path):
    return build_scenario(load_config(path), base_dir=os.path.dirname(os.path.abspath(path)))


def write_trajectory_csv(path, trajectory, scenario):
    rows = []
    for state in trajectory.rounds:
        for i, agent in enumerate(scenario.agents):
            x = agent.baseline + state.actions[i]
            for t in range(x.shape[0]):
                rows.append([state.round_index, agent.id, t + 1, _fmt(x[t])])
    write_table(path, ["round", "agent", "interval", "consumption_mw"], rows)


def write_peak_series_csv(path, trajectory):
    rows = [[k, _fmt(p)] for k, p in enumerate(trajectory.peak_series)]
    write_table(path, ["round", "peak_mw"], rows)


def write_profile_csv(path, values):
    write_series(path, values)


def write_library_csv(path, library):
    n = library.deltas.shape[1]
    header = ["action", "label"] + [f"t{t + 1}" for t in range(n)]
    rows = [
        [k, library.labels[k]] + [_fmt(v) for v in library.deltas[k]]
        for k in range(len(library))
    ]
    write_table(path, header, rows)


def write_sweep_rows_csv(path, summary):
    rows = [
        [r.dynamics, _fmt(r.cap_mw), r.n_agents, _fmt(r.final_peak_mw), _fmt(r.reduction_pct)]
        for r in summary.rows
    ]
    write_table(
        path, ["dynamics", "cap_mw", "players", "final_peak_mw", "reduction_pct"], rows
    )


def render_summary_table(summary):
    """Aligned text table: average/best/worst reduction per dynamics."""

    def stats(dynamics):
        rows = summary.by_dynamics(dynamics)
        if not rows:
            return ["-", "-", "-"]
        best = max(rows, key=lambda r: r.reduction_pct)
        worst = min(rows, key=lambda r: r.reduction_pct)
        return [
            f"{summary.average_for(dynamics):.2f}",
            f"{best.reduction_pct:.2f} ({best.label})",
            f"{worst.reduction_pct:.2f} ({worst.label})",
        ]

    brd, fpd = stats("brd"), stats("fpd")
    labels = ["Average over all cases", "Best case", "Worst case"]
    width = max(len(s) for s in labels)
    b_width = max(len(s) for s in ["BRD"] + brd)
    lines = [f"{'Peak reduction (%)':<{width}}  {'BRD':<{b_width}}  FPD"]
    for label, b, f in zip(labels, brd, fpd):
        lines.append(f"{label:<{width}}  {b:<{b_width}}  {f}")
    return "\n".join(lines) + "\n"


def write_ip_sweep_csv(path, results):
    rows = [
        [_fmt(r.aware_fraction), _fmt(r.mean_pct), _fmt(r.std_pct), r.scale_down_count]
        for r in results
    ]
    write_table(
        path,
        ["aware_fraction", "mean_reduction_pct", "std_reduction_pct", "scale_downs"],
        rows,
    )


def write_ip_runs_csv(path, results):
    rows = []
    for r in results:
        for run, value in enumerate(r.reductions_pct):
            rows.append([_fmt(r.aware_fraction), run, _fmt(value)])
    write_table(path, ["aware_fraction", "run", "reduction_pct"], rows)


def config_hash(config):
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def write_manifest(path, command, config, seed):
    """Replay record: the exact inputs plus environment fingerprints."""
    manifest = {
        "command": command,
        "config": config,
        "config_hash": config_hash(config),
        "seed": int(seed),
        "package_version": __version__,
        "numpy_version": np.__version__,
        "kernel_backend": BACKEND,
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def load_manifest(path):
    with open(path) as fh:
        return json.load(fh)
