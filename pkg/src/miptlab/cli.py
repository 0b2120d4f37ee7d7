"""Batch front-end: single runs, (L, p) sweeps, collapse fits, validation.

Exit codes: 0 ok, 1 usage error, 2 runtime failure. Flags mirror the flat
key=value config-file format one to one (flags win). MIPTLAB_WORKERS and
MIPTLAB_OUTDIR provide environment overrides.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
import time

import numpy as np

from . import __version__
from . import datafiles as df
from .circuit import (
    DEFAULT_T_CLIFFORD,
    DEFAULT_T_DENSE,
    MODELS,
    CircuitConfig,
    ConfigError,
    run_channel,
    run_ensemble,
    run_trajectory_mirrored,
)
from .scaling import (
    CollapseError,
    derived_exponents,
    fit_dynamic_collapse,
    fit_static_collapse,
    side_diagnostics,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _workers(args) -> int:
    if args.workers is not None:
        return max(1, args.workers)
    env = os.environ.get("MIPTLAB_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _outdir(args) -> str:
    out = args.outdir or os.environ.get("MIPTLAB_OUTDIR") or "."
    return df.ensure_dir(out)


def _parse_ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _parse_floats(text: str) -> list[float]:
    if ":" in text:
        lo, hi, step = (float(v) for v in text.split(":"))
        n = int(round((hi - lo) / step))
        vals = [round(lo + i * step, 10) for i in range(n + 1)]
        return [v for v in vals if v <= hi + 1e-12]
    return [float(v) for v in text.split(",") if v.strip()]


def _default_T(model: str) -> int:
    return DEFAULT_T_CLIFFORD if MODELS[model][1] == "clifford" else DEFAULT_T_DENSE


_CONFIG_KEYS = {
    "model": str,
    "L": int,
    "p": float,
    "T": int,
    "traj": int,
    "seed": int,
    "cut": float,
    "workers": int,
    "outdir": str,
    "tag": str,
    "channel": lambda v: v.lower() in ("1", "true", "yes"),
    "record_each_layer": lambda v: v.lower() in ("1", "true", "yes"),
    "record_profile": lambda v: v.lower() in ("1", "true", "yes"),
    "override_capacity": lambda v: v.lower() in ("1", "true", "yes"),
    "Ls": str,
    "ps": str,
}


def _apply_config_file(args) -> None:
    if not getattr(args, "config", None):
        return
    data = df.read_manifest(args.config)
    for key, raw in data.items():
        k = key.replace("-", "_")
        if k not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r} in {args.config}")
        if getattr(args, k, None) is None:
            setattr(args, k, _CONFIG_KEYS[k](raw))


def _build_config(args) -> CircuitConfig:
    if args.model is None or args.L is None or args.p is None:
        raise ConfigError("model, L and p are required (flags or config file)")
    if args.model not in MODELS:
        raise ConfigError(f"unknown model {args.model!r}")
    return CircuitConfig(
        model=args.model,
        L=args.L,
        p=args.p,
        T=args.T if args.T is not None else _default_T(args.model),
        cut=args.cut if args.cut is not None else 0.25,
        n_trajectories=args.traj if args.traj is not None else 100,
        master_seed=args.seed if args.seed is not None else 0,
        record_each_layer=bool(args.record_each_layer),
        record_profile=bool(args.record_profile),
        override_capacity=bool(args.override_capacity),
    )


def _run_manifest(path, config: CircuitConfig, wall: float, outputs: list[str], extra: dict | None = None) -> None:
    man: dict[str, object] = dict(config.manifest())
    man["config_digest"] = config.digest()
    man["code_version"] = __version__
    man["wall_time_s"] = round(wall, 3)
    man["outputs"] = ",".join(outputs)
    if extra:
        man.update(extra)
    df.write_manifest(path, man)


def cmd_run(args) -> int:
    _apply_config_file(args)
    config = _build_config(args)
    workers = _workers(args)
    outdir = _outdir(args)
    t0 = time.time()
    if args.channel:
        summary = run_channel(config, workers=workers)
        kind = df.KIND_CHANNEL
        prefix = "channel"
    else:
        summary = run_ensemble(config, workers=workers)
        kind = df.KIND_SERIES
        prefix = "series"
    wall = time.time() - t0
    tag = f"_{args.tag}" if args.tag else ""
    base = f"{prefix}_{config.model}_L{config.L}_p{config.p:g}{tag}_{config.digest()[:8]}"
    csv_path = os.path.join(outdir, base + ".csv")
    df.write_series(csv_path, summary, kind=kind)
    man_path = os.path.join(outdir, base + ".manifest")
    _run_manifest(
        man_path,
        config,
        wall,
        [csv_path],
        {"steady_value": summary.steady_value, "steady_err": summary.steady_err},
    )
    print(csv_path)
    return EXIT_OK


def _cell_seed(master: int, model: str, L: int, p: float) -> int:
    digest = hashlib.sha256(f"{master}|{model}|{L}|{p!r}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def cmd_sweep(args) -> int:
    _apply_config_file(args)
    if args.model is None or not args.Ls or not args.ps:
        raise ConfigError("sweep needs --model, --Ls and --ps")
    if args.model not in MODELS:
        raise ConfigError(f"unknown model {args.model!r}")
    Ls = _parse_ints(args.Ls)
    ps = _parse_floats(args.ps)
    if not Ls or not ps:
        raise ConfigError("empty sweep grid")
    T = args.T if args.T is not None else _default_T(args.model)
    traj = args.traj if args.traj is not None else 100
    cut = args.cut if args.cut is not None else 0.25
    master = args.seed if args.seed is not None else 0
    workers = _workers(args)
    outdir = _outdir(args)
    cells_dir = df.ensure_dir(os.path.join(outdir, "cells"))

    rows = []
    failures = []
    for L in Ls:
        for p in ps:
            config = CircuitConfig(
                model=args.model, L=L, p=p, T=T, cut=cut,
                n_trajectories=traj, master_seed=_cell_seed(master, args.model, L, p),
            )
            base = f"cell_{args.model}_L{L}_p{p:g}"
            man_path = os.path.join(cells_dir, base + ".manifest")
            csv_path = os.path.join(cells_dir, base + ".csv")
            row = {
                "model": args.model, "L": L, "p": p, "LA": config.subsystem_size,
                "n_traj": traj, "T": T,
            }
            if args.resume and os.path.exists(man_path):
                man = df.read_manifest(man_path)
                if man.get("config_digest") == config.digest():
                    row["S_mean"] = float(man["steady_value"])
                    row["S_err"] = max(float(man["steady_err"]), 1e-9)
                    rows.append(row)
                    print(f"[sweep] reuse  L={L} p={p:g}")
                    continue
            t0 = time.time()
            try:
                summary = run_ensemble(config, workers=workers)
            except Exception as exc:  # record and continue with remaining cells
                failures.append((L, p, str(exc)))
                print(f"[sweep] FAIL   L={L} p={p:g}: {exc}", file=sys.stderr)
                continue
            wall = time.time() - t0
            df.write_series(csv_path, summary)
            _run_manifest(
                man_path, config, wall, [csv_path],
                {"steady_value": summary.steady_value, "steady_err": summary.steady_err},
            )
            row["S_mean"] = summary.steady_value
            row["S_err"] = max(summary.steady_err, 1e-9)
            rows.append(row)
            print(f"[sweep] done   L={L} p={p:g}  S={summary.steady_value:.4f} ({wall:.1f}s)")
    out_name = args.out or os.path.join(outdir, f"sweep_{args.model}.csv")
    meta = {
        "model": args.model, "T": T, "cut": repr(cut), "n_traj": traj,
        "master_seed": master, "code_version": __version__,
    }
    if rows:
        df.write_sweep(out_name, rows, meta)
        print(out_name)
    if failures:
        print(f"{len(failures)} cells failed", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_collapse(args) -> int:
    data = df.read_sweep(args.data)
    if args.min_L:
        keep = data.L >= args.min_L
        from .scaling import SweepDataset

        data = SweepDataset(
            data.L[keep], data.p[keep], data.S[keep], data.err[keep], data.n_traj[keep], data.meta
        )
    window = None
    if args.window:
        lo, hi = (float(v) for v in args.window.split(","))
        window = (lo, hi)
    initial = None
    if args.pc0 is not None and args.nu0 is not None and args.gamma0 is not None:
        initial = (args.pc0, args.nu0, args.gamma0)
    result = fit_static_collapse(
        data,
        initial=initial,
        window=window,
        n_restarts=args.restarts,
        n_bootstrap=args.bootstrap,
        seed=args.fit_seed,
    )
    derived = derived_exponents(result)
    outdir = _outdir(args)
    stem = args.out or os.path.join(outdir, "collapse_" + os.path.splitext(os.path.basename(args.data))[0])
    report = stem + ".report"
    collapsed = stem + ".csv"
    df.write_fit_report(report, result, derived)
    df.write_collapsed(collapsed, data, result, window=window)
    for name in ("p_c", "nu", "gamma"):
        ci = f"  ci {result.ci[name]}" if name in result.ci else ""
        print(f"{name} = {getattr(result, name):.4f}{ci}")
    print(f"cost = {result.cost:.4f}  points = {result.n_points}")
    if result.boundary_flags:
        print(f"WARNING: fit at bounds for {result.boundary_flags}", file=sys.stderr)
    for rec in side_diagnostics(data):
        print(f"  side p={rec['p']:.3f} slope={rec['slope']:+.3f}")
    print(report)
    print(collapsed)
    return EXIT_OK


def cmd_dynamic(args) -> int:
    series = {}
    p_c = None
    for path in args.series:
        meta, cols = df.read_series(path)
        L = int(meta["L"])
        series[L] = (cols["t"], cols["mean_S"], cols["stderr"])
        p_c = float(meta["p"])
    result = fit_dynamic_collapse(
        series,
        gamma=args.gamma,
        t_min=args.t_min,
        n_bootstrap=args.bootstrap,
        seed=args.fit_seed,
        p_c=p_c,
        nu=args.nu,
    )
    outdir = _outdir(args)
    stem = args.out or os.path.join(outdir, "dynamic_collapse")
    df.write_fit_report(stem + ".report", result)
    df.write_collapsed_dynamic(stem + ".csv", series, result)
    z_ci = f"  ci {result.ci['z']}" if "z" in result.ci else ""
    print(f"z = {result.z:.4f}{z_ci}")
    print(f"growth exponent = {result.diagnostics['growth_exponent']:.4f}")
    print(f"tail slope = {result.diagnostics['tail_slope']:.4f}")
    print(stem + ".report")
    print(stem + ".csv")
    return EXIT_OK


# ---------------- validation suite ----------------


def _naive_rank(bits: np.ndarray) -> int:
    rows = [int("".join(str(int(b)) for b in row[::-1]), 2) for row in bits]
    rank = 0
    for col in range(bits.shape[1]):
        pivot = None
        for r in range(rank, len(rows)):
            if (rows[r] >> col) & 1:
                pivot = r
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(len(rows)):
            if r != rank and ((rows[r] >> col) & 1):
                rows[r] ^= rows[rank]
        rank += 1
    return rank


def _validate_checks():
    from . import gf2
    from .clifford_group import GROUP_ORDER, get_table
    from .dense import sample_haar_u4_batch
    from .pauli import PauliOperator, cnot_ctrl_first, hadamard
    from .stabilizer import StabilizerState

    rng = np.random.default_rng(20181102)

    def clifford_count():
        assert len(get_table()) == GROUP_ORDER, f"{len(get_table())} != {GROUP_ORDER}"

    def gf2_rank_oracle():
        for _ in range(200):
            m = rng.integers(0, 2, size=(rng.integers(1, 64), rng.integers(1, 64)))
            got = gf2.rank(gf2.BitMatrix.from_bits(m))
            want = _naive_rank(m)
            assert got == want, f"{got} != {want}"

    def born_rule():
        shots = 4096
        hits = 0
        for _ in range(shots):
            s = StabilizerState.plus_state(1)
            hits += s.measure_pauli(PauliOperator.single_z(1, 0), rng)
        f = hits / shots
        assert abs(f - 0.5) <= 3 * 0.5 / np.sqrt(shots), f"frequency {f}"
        bell = StabilizerState.zero_state(2)
        bell.apply_clifford(hadamard(), (0,))
        bell.apply_clifford(cnot_ctrl_first(), (0, 1))
        assert bell.measure_pauli(PauliOperator.zz(2, 0, 1), rng) == 0

    def haar_unitarity():
        us = sample_haar_u4_batch(rng, 300)
        eye = np.eye(4)
        err = np.abs(us @ np.conj(np.swapaxes(us, 1, 2)) - eye).max()
        assert err < 1e-10, f"unitarity error {err}"

    def backend_equivalence():
        for model in ("B1", "B2"):
            config = CircuitConfig(model=model, L=6, p=0.5, T=8, cut=0.5, n_trajectories=2, master_seed=99)
            for k in range(3):
                _, sp, dp = run_trajectory_mirrored(config, k)
                diff = np.max(np.abs(sp - dp))
                assert diff < 1e-9, f"{model} trajectory {k}: {diff}"

    return [
        ("clifford_enumeration_count", clifford_count),
        ("gf2_rank_vs_naive_oracle", gf2_rank_oracle),
        ("born_rule_statistics", born_rule),
        ("haar_unitarity", haar_unitarity),
        ("backend_equivalence", backend_equivalence),
    ]


def cmd_validate(args) -> int:
    failed = 0
    for name, check in _validate_checks():
        try:
            check()
        except Exception as exc:
            failed += 1
            print(f"FAIL {name}: {exc}")
        else:
            print(f"PASS {name}")
    return EXIT_RUNTIME if failed else EXIT_OK


# ---------------- parser ----------------


def build_parser() -> _Parser:
    parser = _Parser(prog="miptlab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"miptlab {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p):
        p.add_argument("--workers", type=int, default=None, help="parallel trajectory workers")
        p.add_argument("--outdir", default=None, help="output directory")
        p.add_argument("--config", default=None, help="flat key=value config file; flags override")

    run = sub.add_parser("run", help="run one ensemble (or channel) and write its series CSV")
    run.add_argument("--model", choices=sorted(MODELS), default=None)
    run.add_argument("--L", type=int, default=None)
    run.add_argument("--p", type=float, default=None)
    run.add_argument("--T", type=int, default=None)
    run.add_argument("--traj", type=int, default=None, help="trajectories (or channel realizations)")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--cut", type=float, default=None, help="subsystem fraction L_A/L")
    run.add_argument("--channel", action=argparse.BooleanOptionalAction, default=None,
                     help="density-matrix run: thermal entropy series")
    run.add_argument("--record-each-layer", dest="record_each_layer",
                     action=argparse.BooleanOptionalAction, default=None)
    run.add_argument("--record-profile", dest="record_profile",
                     action=argparse.BooleanOptionalAction, default=None)
    run.add_argument("--override-capacity", dest="override_capacity",
                     action=argparse.BooleanOptionalAction, default=None)
    run.add_argument("--tag", default=None)
    common(run)
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="steady-state sweep over an (L, p) grid; resumable")
    sweep.add_argument("--model", choices=sorted(MODELS), default=None)
    sweep.add_argument("--Ls", default=None, help="comma list, e.g. 64,128,256")
    sweep.add_argument("--ps", default=None, help="comma list or lo:hi:step")
    sweep.add_argument("--T", type=int, default=None)
    sweep.add_argument("--traj", type=int, default=None)
    sweep.add_argument("--seed", type=int, default=None)
    sweep.add_argument("--cut", type=float, default=None)
    sweep.add_argument("--out", default=None, help="sweep CSV path")
    sweep.add_argument("--resume", action=argparse.BooleanOptionalAction, default=True)
    common(sweep)
    sweep.set_defaults(func=cmd_sweep)

    col = sub.add_parser("collapse", help="static finite-size-scaling fit of a sweep CSV")
    col.add_argument("--data", required=True)
    col.add_argument("--window", default=None, help="p window lo,hi")
    col.add_argument("--min-L", dest="min_L", type=int, default=None, help="drop sizes below this")
    col.add_argument("--pc0", type=float, default=None)
    col.add_argument("--nu0", type=float, default=None)
    col.add_argument("--gamma0", type=float, default=None)
    col.add_argument("--restarts", type=int, default=20)
    col.add_argument("--bootstrap", type=int, default=1000)
    col.add_argument("--fit-seed", dest="fit_seed", type=int, default=0)
    col.add_argument("--out", default=None, help="output stem for .report/.csv")
    common(col)
    col.set_defaults(func=cmd_collapse)

    dyn = sub.add_parser("dynamic", help="dynamic collapse of S(t) series at criticality")
    dyn.add_argument("--series", nargs="+", required=True, help="ensemble series CSVs, one per L")
    dyn.add_argument("--gamma", type=float, required=True)
    dyn.add_argument("--nu", type=float, default=None)
    dyn.add_argument("--t-min", dest="t_min", type=float, default=8.0,
                     help="drop the first periods from the fit (local transient)")
    dyn.add_argument("--bootstrap", type=int, default=500)
    dyn.add_argument("--fit-seed", dest="fit_seed", type=int, default=0)
    dyn.add_argument("--out", default=None)
    common(dyn)
    dyn.set_defaults(func=cmd_dynamic)

    val = sub.add_parser("validate", help="cross-backend and statistics self-checks")
    common(val)
    val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not getattr(args, "command", None):
        parser.print_help()
        return EXIT_USAGE
    try:
        return args.func(args)
    except (ConfigError, CollapseError, ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
