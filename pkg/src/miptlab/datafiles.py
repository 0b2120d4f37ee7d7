"""Versioned CSV and flat manifest serialization.

Every output file embeds the schema version, the units, and the exact
configuration (including the master seed) needed to regenerate it.
Readers reject unknown schema versions.
"""

from __future__ import annotations

import os
from typing import Iterable

import numpy as np

from .circuit import CircuitConfig, EnsembleSummary
from .scaling import CollapseResult, SweepDataset

SCHEMA_VERSION = "v1"
UNITS = "bits"

KIND_SERIES = "ensemble_series"
KIND_CHANNEL = "channel_series"
KIND_SWEEP = "sweep"
KIND_COLLAPSED = "collapsed"
KIND_COLLAPSED_DYNAMIC = "collapsed_dynamic"
KIND_PROFILE = "steady_profile"


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, kind: str, meta: dict, header: list[str], rows: Iterable[tuple]) -> None:
    with open(path, "w") as fh:
        fh.write(f"# schema={SCHEMA_VERSION}\n")
        fh.write(f"# kind={kind}\n")
        fh.write(f"# units={UNITS}\n")
        for k in sorted(meta):
            fh.write(f"# {k}={meta[k]}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_csv(path) -> tuple[dict, list[str], dict[str, np.ndarray]]:
    """Returns (meta, header, columns); raises on schema mismatch."""
    meta: dict[str, str] = {}
    header: list[str] | None = None
    rows: list[list[str]] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    k, v = body.split("=", 1)
                    meta[k.strip()] = v.strip()
                continue
            if header is None:
                header = [c.strip() for c in line.split(",")]
            else:
                rows.append(line.split(","))
    if meta.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema {meta.get('schema')!r} in {path}")
    if header is None:
        raise ValueError(f"no data in {path}")
    cols: dict[str, np.ndarray] = {}
    for i, name in enumerate(header):
        raw = [r[i] for r in rows]
        try:
            cols[name] = np.array([float(v) for v in raw])
        except ValueError:
            cols[name] = np.array(raw)
    return meta, header, cols


def write_manifest(path, mapping: dict) -> None:
    with open(path, "w") as fh:
        for k, v in mapping.items():
            fh.write(f"{k} = {_fmt(v)}\n")


def read_manifest(path) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or "=" not in line:
                continue
            k, v = line.split("=", 1)
            out[k.strip()] = v.strip()
    return out


# ---------------- concrete writers/readers ----------------


def _config_meta(config: CircuitConfig) -> dict:
    meta = dict(config.manifest())
    meta["LA"] = str(config.subsystem_size)
    meta["config_digest"] = config.digest()
    return meta


def write_series(path, summary: EnsembleSummary, kind: str = KIND_SERIES) -> None:
    meta = _config_meta(summary.config)
    meta["steady_value"] = repr(summary.steady_value)
    meta["steady_err"] = repr(summary.steady_err)
    rows = zip(
        summary.times,
        summary.mean_entropy,
        summary.stderr,
        [summary.n_trajectories] * len(summary.times),
    )
    write_csv(path, kind, meta, ["t", "mean_S", "stderr", "n"], rows)


def read_series(path) -> tuple[dict, dict[str, np.ndarray]]:
    meta, header, cols = read_csv(path)
    if meta.get("kind") not in (KIND_SERIES, KIND_CHANNEL):
        raise ValueError(f"expected a series CSV, got kind={meta.get('kind')!r}")
    return meta, cols


def write_profile(path, summary: EnsembleSummary) -> None:
    """Tail-averaged steady entropy for every prefix cut L_A = 0..L."""
    if summary.profile_mean is None:
        raise ValueError("summary holds no profile (record_profile was off)")
    meta = _config_meta(summary.config)
    la = np.arange(len(summary.profile_mean))
    rows = zip(la, summary.profile_mean, summary.profile_err)
    write_csv(path, KIND_PROFILE, meta, ["LA", "S_mean", "S_err"], rows)


def read_profile(path) -> tuple[dict, dict[str, np.ndarray]]:
    meta, header, cols = read_csv(path)
    if meta.get("kind") != KIND_PROFILE:
        raise ValueError(f"expected a profile CSV, got kind={meta.get('kind')!r}")
    return meta, cols


SWEEP_HEADER = ["model", "L", "p", "LA", "S_mean", "S_err", "n_traj", "T"]


def write_sweep(path, rows: list[dict], meta: dict) -> None:
    rows = sorted(rows, key=lambda r: (r["model"], r["L"], r["p"]))
    write_csv(
        path,
        KIND_SWEEP,
        meta,
        SWEEP_HEADER,
        ([r[k] for k in SWEEP_HEADER] for r in rows),
    )


def read_sweep(path) -> SweepDataset:
    meta, header, cols = read_csv(path)
    if meta.get("kind") != KIND_SWEEP:
        raise ValueError(f"expected a sweep CSV, got kind={meta.get('kind')!r}")
    models = set(cols["model"].tolist())
    if len(models) > 1:
        raise ValueError(f"sweep mixes models {sorted(models)}")
    ds_meta = dict(meta)
    ds_meta["model"] = models.pop() if models else ""
    return SweepDataset(
        L=cols["L"].astype(int),
        p=cols["p"],
        S=cols["S_mean"],
        err=cols["S_err"],
        n_traj=cols["n_traj"].astype(int),
        meta=ds_meta,
    )


def write_collapsed(path, data: SweepDataset, result: CollapseResult, window=None) -> None:
    ds = data.restrict(*window) if window is not None else data
    x = (ds.p - result.p_c) * ds.L.astype(float) ** (1.0 / result.nu)
    y = ds.S / ds.L.astype(float) ** result.gamma
    y_err = ds.err / ds.L.astype(float) ** result.gamma
    meta = {
        "p_c": repr(result.p_c),
        "nu": repr(result.nu),
        "gamma": repr(result.gamma),
        "cost": repr(result.cost),
        "model": data.meta.get("model", ""),
    }
    if window is not None:
        meta["window"] = f"{window[0]},{window[1]}"
    order = np.lexsort((ds.p, ds.L))
    rows = zip(ds.L[order], ds.p[order], x[order], y[order], y_err[order])
    write_csv(path, KIND_COLLAPSED, meta, ["L", "p", "x", "y", "y_err"], rows)


def write_collapsed_dynamic(path, series: dict, result: CollapseResult) -> None:
    meta = {"gamma": repr(result.gamma), "z": repr(result.z), "cost": repr(result.cost)}
    if result.p_c is not None:
        meta["p_c"] = repr(result.p_c)
    rows = []
    for L in sorted(series):
        t, s, e = series[L]
        scale = float(L) ** result.gamma
        for ti, si, ei in zip(t, s, e):
            if ti <= 0:
                continue
            rows.append((L, ti, ti * float(L) ** (-result.z), si / scale, ei / scale))
    write_csv(path, KIND_COLLAPSED_DYNAMIC, meta, ["L", "t", "x", "y", "y_err"], rows)


def write_fit_report(path, result: CollapseResult, derived: dict | None = None, extra: dict | None = None) -> None:
    rep: dict[str, object] = {}
    for name in ("p_c", "nu", "gamma", "z"):
        v = getattr(result, name)
        if v is not None:
            rep[name] = v
            if name in result.ci:
                rep[f"{name}_ci_lo"], rep[f"{name}_ci_hi"] = result.ci[name]
    rep["cost"] = result.cost
    rep["n_points"] = result.n_points
    if result.window is not None:
        rep["window_lo"], rep["window_hi"] = result.window
    if result.boundary_flags:
        rep["boundary_flags"] = ",".join(result.boundary_flags)
    for k, v in result.diagnostics.items():
        rep[f"diag_{k}"] = v
    if derived:
        for name, rec in derived.items():
            key = name.replace("*", "x").replace("(", "").replace(")", "").replace("-", "_")
            rep[f"derived_{key}"] = rec["value"]
            if "lo" in rec:
                rep[f"derived_{key}_lo"], rep[f"derived_{key}_hi"] = rec["lo"], rec["hi"]
    if extra:
        rep.update(extra)
    write_manifest(path, rep)


def ensure_dir(path) -> str:
    os.makedirs(path, exist_ok=True)
    return path
