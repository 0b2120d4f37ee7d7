"""Assemble the production figure CSVs from the acceptance cache, fit them
through the CLI, copy everything into data/figures and frontend/fixtures,
and render the SVG analogs.

Run after `python3 tests/acceptance_data.py` has populated the cache:

    MIPTLAB_ACCEPT=full python3 scripts/build_figures_data.py
"""

from __future__ import annotations

import shutil
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

import acceptance_data as ad  # noqa: E402

from miptlab import datafiles as df  # noqa: E402
from miptlab.cli import main as cli_main  # noqa: E402

FIG = ROOT / "data" / "figures"
FIXTURES = ROOT / "frontend" / "fixtures"


def assemble_sweep(model: str, ps, seed: int, out: Path) -> None:
    rows = []
    for L in ad.B1_SIZES_FULL:
        for p in ps:
            cell = ad.cached_ensemble(ad.sweep_cell_config(model, L, p, seed))
            rows.append({
                "model": model, "L": L, "p": p, "LA": L // 4,
                "S_mean": cell["steady"], "S_err": max(cell["steady_err"], 1e-9),
                "n_traj": ad.SWEEP_TRAJ, "T": ad.SWEEP_T,
            })
    df.write_sweep(out, rows, {
        "model": model, "T": ad.SWEEP_T, "cut": repr(0.25),
        "n_traj": ad.SWEEP_TRAJ, "master_seed": seed,
    })
    print(f"wrote {out}")


def run_cli(*argv: str) -> None:
    rc = cli_main(list(argv))
    if rc != 0:
        raise SystemExit(f"cli {' '.join(argv)} failed with {rc}")


def main() -> None:
    FIG.mkdir(parents=True, exist_ok=True)
    assemble_sweep("B1", ad.B1_PS, 42, FIG / "sweep_B1.csv")
    assemble_sweep("B2", ad.B2_PS, 43, FIG / "sweep_B2.csv")

    run_cli("collapse", "--data", str(FIG / "sweep_B1.csv"), "--window", "0.05,0.30",
            "--min-L", "64", "--out", str(FIG / "collapse_B1"), "--fit-seed", "7")
    run_cli("collapse", "--data", str(FIG / "sweep_B2.csv"), "--window", "0.30,1.00",
            "--min-L", "64", "--out", str(FIG / "collapse_B2"), "--fit-seed", "7")

    rep = df.read_manifest(FIG / "collapse_B1.report")
    p_c = round(float(rep["p_c"]), 3)
    gamma = float(rep["gamma"])
    series_paths = []
    for L in ad.DYNAMIC_SIZES:
        src, _ = ad._series_paths(ad.dynamic_config(L, p_c))
        dst = FIG / f"dynamic_L{L}.csv"
        shutil.copyfile(src, dst)
        series_paths.append(str(dst))
        print(f"wrote {dst}")
    run_cli("dynamic", "--series", *series_paths, "--gamma", repr(gamma),
            "--out", str(FIG / "dynamic_collapse"), "--fit-seed", "7")

    FIXTURES.mkdir(parents=True, exist_ok=True)
    for name in ("sweep_B1.csv", "sweep_B2.csv", "dynamic_L64.csv", "dynamic_L128.csv", "dynamic_L256.csv"):
        shutil.copyfile(FIG / name, FIXTURES / name)
    shutil.copyfile(FIG / "collapse_B1.csv", FIXTURES / "collapse_B1.csv")
    shutil.copyfile(FIG / "collapse_B2.csv", FIXTURES / "collapse_B2.csv")
    print("fixtures refreshed")

    dyn = df.read_manifest(FIG / "dynamic_collapse.report")
    rendered = FIG / "rendered"
    node = ["node", str(ROOT / "frontend" / "dist" / "cli.js")]
    subprocess.run([*node, "sweep", "--csv", str(FIG / "sweep_B1.csv"), "--pc", rep["p_c"],
                    "--outdir", str(rendered)], check=True)
    rep2 = df.read_manifest(FIG / "collapse_B2.report")
    subprocess.run([*node, "sweep", "--csv", str(FIG / "sweep_B2.csv"), "--pc", rep2["p_c"],
                    "--outdir", str(rendered)], check=True)
    subprocess.run([*node, "collapse", "--csv", str(FIG / "collapse_B1.csv"),
                    "--outdir", str(rendered)], check=True)
    subprocess.run([*node, "collapse", "--csv", str(FIG / "collapse_B2.csv"),
                    "--outdir", str(rendered)], check=True)
    subprocess.run([*node, "dynamic", "--series", *series_paths,
                    "--gamma", rep["gamma"], "--z", dyn["z"], "--outdir", str(rendered)], check=True)
    print("rendered SVG analogs")


if __name__ == "__main__":
    main()
