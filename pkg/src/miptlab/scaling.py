"""Finite-size-scaling analysis: data collapse, exponents, diagnostics.

The static collapse rescales steady-state entropies to
y = S / L^gamma against x = (p - p_c) L^(1/nu) and scores parameter
triples by how far each point falls from the local master curve
interpolated through the bracketing points of the *other* system sizes
(error-weighted squared deviation, Houdayer-Hartmann style). The dynamic
collapse scores y = S L^-gamma against log10(t L^-z) the same way.

Fits are derivative-free simplex searches with random multi-starts;
uncertainties come from a parametric bootstrap of the cell means.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize


class CollapseError(RuntimeError):
    """Degenerate collapse input or a fit that failed to converge."""


@dataclass
class SweepDataset:
    """Steady-state entanglement records S(L, p) with standard errors."""

    L: np.ndarray
    p: np.ndarray
    S: np.ndarray
    err: np.ndarray
    n_traj: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.L = np.asarray(self.L, dtype=int)
        self.p = np.asarray(self.p, dtype=float)
        self.S = np.asarray(self.S, dtype=float)
        self.err = np.asarray(self.err, dtype=float)
        self.n_traj = np.asarray(self.n_traj, dtype=int)
        n = len(self.L)
        if not (len(self.p) == len(self.S) == len(self.err) == len(self.n_traj) == n):
            raise ValueError("column lengths differ")
        if np.any(self.err <= 0):
            raise ValueError("standard errors must be positive")
        keys = set(zip(self.L.tolist(), self.p.tolist()))
        if len(keys) != n:
            raise ValueError("duplicate (L, p) records")

    def __len__(self) -> int:
        return len(self.L)

    def sizes(self) -> np.ndarray:
        return np.unique(self.L)

    def restrict(self, p_min: float, p_max: float) -> "SweepDataset":
        m = (self.p >= p_min) & (self.p <= p_max)
        return SweepDataset(self.L[m], self.p[m], self.S[m], self.err[m], self.n_traj[m], dict(self.meta))

    def with_values(self, S: np.ndarray) -> "SweepDataset":
        return SweepDataset(self.L, self.p, S, self.err, self.n_traj, dict(self.meta))


@dataclass
class CollapseResult:
    """Fitted collapse parameters with bootstrap confidence intervals."""

    p_c: float | None
    nu: float | None
    gamma: float
    z: float | None
    cost: float
    ci: dict[str, tuple[float, float]]
    window: tuple[float, float] | None
    n_points: int
    boundary_flags: list[str] = field(default_factory=list)
    samples: dict[str, np.ndarray] = field(default_factory=dict)
    diagnostics: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.cost < 0:
            raise ValueError("cost must be nonnegative")
        if self.p_c is not None and not 0.0 < self.p_c < 1.0:
            raise ValueError("p_c out of (0, 1)")
        if self.nu is not None and self.nu <= 0:
            raise ValueError("nu must be positive")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma out of [0, 1]")


def _merge_ties(cx, cy, cs):
    """Collapse candidates with exactly equal x into one inverse-variance-
    weighted point (keeps the estimator order-independent)."""
    ux, inv = np.unique(cx, return_inverse=True)
    if len(ux) == len(cx):
        return cx, cy, cs
    w = 1.0 / cs**2
    wsum = np.zeros(len(ux))
    ysum = np.zeros(len(ux))
    np.add.at(wsum, inv, w)
    np.add.at(ysum, inv, w * cy)
    return ux, ysum / wsum, np.sqrt(1.0 / wsum)


def _master_curve_cost(x, y, sy, group):
    """Mean error-weighted squared deviation from the cross-size local
    linear master curve: the line through the two nearest points of the
    other sizes (one-sided neighborhoods extrapolate, with the propagated
    variance growing accordingly). Invariant under record reordering and
    continuous in the scaling parameters except exactly at cross-size
    x-collisions, where tied candidates are variance-weight merged."""
    total = 0.0
    n_used = 0
    for s in np.unique(group):
        own = group == s
        cand = ~own
        if np.count_nonzero(cand) < 2:
            continue
        order = np.argsort(x[cand], kind="stable")
        cx, cy, cs = _merge_ties(x[cand][order], y[cand][order], sy[cand][order])
        if len(cx) < 2:
            continue
        xi, yi, si = x[own], y[own], sy[own]
        lo = np.clip(np.searchsorted(cx, xi, side="right") - 1, 0, len(cx) - 2)
        hi = lo + 1
        w = (xi - cx[lo]) / (cx[hi] - cx[lo])
        yhat = (1 - w) * cy[lo] + w * cy[hi]
        var = ((1 - w) * cs[lo]) ** 2 + (w * cs[hi]) ** 2
        total += float(np.sum((yi - yhat) ** 2 / (si**2 + var)))
        n_used += int(np.count_nonzero(own))
    if n_used < 3:
        raise CollapseError("fewer than 3 cross-size overlapping points; collapse cost undefined")
    return total / n_used


def collapse_cost(
    data: SweepDataset,
    p_c: float,
    nu: float,
    gamma: float,
    window: tuple[float, float] | None = None,
) -> float:
    """Collapse quality of (p_c, nu, gamma) on the dataset (lower is better)."""
    ds = data.restrict(*window) if window is not None else data
    scale = ds.L.astype(float) ** gamma
    x = (ds.p - p_c) * ds.L.astype(float) ** (1.0 / nu)
    return _master_curve_cost(x, ds.S / scale, ds.err / scale, ds.L)


_DEF_NU_BOUNDS = (0.5, 5.0)
_DEF_GAMMA_BOUNDS = (0.0, 1.0)


def _simplex(fun, x0, bounds, maxiter=2000):
    return optimize.minimize(
        fun,
        np.asarray(x0, dtype=float),
        method="Nelder-Mead",
        bounds=bounds,
        options={"maxiter": maxiter, "xatol": 1e-5, "fatol": 1e-8},
    )


def _percentile_ci(samples: np.ndarray, estimate: float) -> tuple[float, float]:
    lo, hi = np.percentile(samples, [2.5, 97.5])
    return (min(float(lo), estimate), max(float(hi), estimate))


def fit_static_collapse(
    data: SweepDataset,
    initial: tuple[float, float, float] | None = None,
    bounds: dict[str, tuple[float, float]] | None = None,
    window: tuple[float, float] | None = None,
    n_restarts: int = 20,
    n_bootstrap: int = 1000,
    seed: int = 0,
) -> CollapseResult:
    """Fit (p_c, nu, gamma) by multi-start Nelder-Mead on the collapse cost.

    `window` restricts the measurement rates used (defaults to the full
    dataset). The dataset must span both sides of the fitted p_c and hold
    at least 3 distinct sizes.
    """
    ds = data.restrict(*window) if window is not None else data
    if len(ds.sizes()) < 3:
        raise CollapseError("need at least 3 distinct system sizes to fit a collapse")
    p_lo, p_hi = float(ds.p.min()), float(ds.p.max())
    span = p_hi - p_lo
    if span <= 0:
        raise CollapseError("dataset spans a single measurement rate")
    b = {
        "p_c": (p_lo + 0.02 * span, p_hi - 0.02 * span),
        "nu": _DEF_NU_BOUNDS,
        "gamma": _DEF_GAMMA_BOUNDS,
    }
    if bounds:
        b.update(bounds)
    box = [b["p_c"], b["nu"], b["gamma"]]

    def objective(theta):
        try:
            return _master_curve_cost_static(ds, theta)
        except CollapseError:
            return np.inf

    rng = np.random.default_rng(seed)
    starts = []
    if initial is not None:
        starts.append(np.asarray(initial, dtype=float))
    for _ in range(n_restarts):
        starts.append(np.array([rng.uniform(lo, hi) for lo, hi in box]))
    best = None
    n_converged = 0
    for x0 in starts:
        res = _simplex(objective, x0, box)
        if np.isfinite(res.fun):
            n_converged += 1
            if best is None or res.fun < best.fun:
                best = res
    if best is None:
        raise CollapseError(
            f"no start converged out of {len(starts)} (window={window}, sizes={ds.sizes().tolist()})"
        )
    theta = best.x
    flags = [
        name
        for name, (lo, hi), v in zip(("p_c", "nu", "gamma"), box, theta)
        if min(v - lo, hi - v) < 1e-3 * (hi - lo)
    ]

    samples = {"p_c": [], "nu": [], "gamma": []}
    for _ in range(n_bootstrap):
        sb = ds.S + ds.err * rng.standard_normal(len(ds))
        dsb = ds.with_values(sb)

        def objective_b(th, _dsb=dsb):
            try:
                return _master_curve_cost_static(_dsb, th)
            except CollapseError:
                return np.inf

        rb = _simplex(objective_b, theta, box, maxiter=600)
        for k, v in zip(("p_c", "nu", "gamma"), rb.x):
            samples[k].append(float(v))
    samples = {k: np.array(v) for k, v in samples.items()}
    ci = {
        k: _percentile_ci(samples[k], est)
        for k, est in zip(("p_c", "nu", "gamma"), theta)
        if len(samples[k])
    }
    return CollapseResult(
        p_c=float(theta[0]),
        nu=float(theta[1]),
        gamma=float(theta[2]),
        z=None,
        cost=float(best.fun),
        ci=ci,
        window=window,
        n_points=len(ds),
        boundary_flags=flags,
        samples=samples,
    )


def _master_curve_cost_static(ds: SweepDataset, theta) -> float:
    p_c, nu, gamma = float(theta[0]), float(theta[1]), float(theta[2])
    scale = ds.L.astype(float) ** gamma
    x = (ds.p - p_c) * ds.L.astype(float) ** (1.0 / nu)
    return _master_curve_cost(x, ds.S / scale, ds.err / scale, ds.L)


# ---------------- dynamic collapse ----------------


def _dynamic_points(series: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]], t_min: float):
    Ls, ts, Ss, errs = [], [], [], []
    for L, (t, s, e) in sorted(series.items()):
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        e = np.asarray(e, dtype=float)
        m = t >= t_min
        Ls.append(np.full(m.sum(), L))
        ts.append(t[m])
        Ss.append(s[m])
        errs.append(np.maximum(e[m], 1e-9))
    return (np.concatenate(Ls), np.concatenate(ts), np.concatenate(Ss), np.concatenate(errs))


def _dynamic_cost(L, t, S, err, gamma, z):
    scale = L.astype(float) ** gamma
    x = np.log10(t) - z * np.log10(L.astype(float))
    return _master_curve_cost(x, S / scale, err / scale, L)


def fit_dynamic_collapse(
    series: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]],
    gamma: float,
    z_bounds: tuple[float, float] = (0.4, 2.5),
    t_min: float = 1.0,
    early_t_min: float = 8.0,
    flat_x_min: float = 1.0,
    n_restarts: int = 20,
    n_bootstrap: int = 500,
    seed: int = 0,
    p_c: float | None = None,
    nu: float | None = None,
) -> CollapseResult:
    """Collapse S_A(t) L^-gamma against t L^-z at criticality, fitting z.

    `series` maps L -> (times, mean entropy, stderr) from an initial
    product state. gamma comes from the static fit. Also fits the
    early-time growth exponent (log-log slope of the largest size over
    t <= early_x_max * L^z) and the collapsed tail slope beyond
    x >= flat_x_min (flat master curve means steady state reached);
    both land in `diagnostics`.
    """
    if len(series) < 3:
        raise CollapseError("need time series for at least 3 sizes")
    L, t, S, err = _dynamic_points(series, t_min)

    def objective(zv):
        try:
            return _dynamic_cost(L, t, S, err, gamma, float(np.atleast_1d(zv)[0]))
        except CollapseError:
            return np.inf

    rng = np.random.default_rng(seed)
    starts = [np.array([z0]) for z0 in rng.uniform(*z_bounds, size=n_restarts)]
    starts.insert(0, np.array([1.0]))
    best = None
    for x0 in starts:
        res = _simplex(objective, x0, [z_bounds], maxiter=500)
        if np.isfinite(res.fun) and (best is None or res.fun < best.fun):
            best = res
    if best is None:
        raise CollapseError("dynamic collapse failed to converge from any start")
    z = float(best.x[0])
    flags = ["z"] if min(z - z_bounds[0], z_bounds[1] - z) < 1e-3 * (z_bounds[1] - z_bounds[0]) else []

    zs = []
    for _ in range(n_bootstrap):
        Sb = S + err * rng.standard_normal(len(S))
        rb = _simplex(lambda zv: _dynamic_cost_safe(L, t, Sb, err, gamma, zv), np.array([z]), [z_bounds], maxiter=300)
        zs.append(float(rb.x[0]))
    zs = np.array(zs)

    early = growth_exponent(series, t_min=early_t_min)
    tail = _tail_slope(L, t, S, gamma, z, flat_x_min)
    return CollapseResult(
        p_c=p_c,
        nu=nu,
        gamma=gamma,
        z=z,
        cost=float(best.fun),
        ci={"z": _percentile_ci(zs, z)} if len(zs) else {},
        window=None,
        n_points=len(S),
        boundary_flags=flags,
        samples={"z": zs},
        diagnostics={"growth_exponent": early, "tail_slope": tail},
    )


def _dynamic_cost_safe(L, t, S, err, gamma, zv):
    try:
        return _dynamic_cost(L, t, S, err, gamma, float(np.atleast_1d(zv)[0]))
    except CollapseError:
        return np.inf


def growth_exponent(series, t_min: float = 8.0, sat_fraction: float = 0.75) -> float:
    """Early-time power-law exponent: log-log slope of S(t) on the largest
    size, between the few-period transient and the saturation shoulder.

    The first periods after the product state grow steeper than the
    asymptotic law (a size-independent local transient), so the window
    starts at t_min ~ 8; it ends where S first reaches `sat_fraction` of
    its own saturation value, which needs no dynamic exponent as input.
    """
    L = max(series)
    t, s, _ = series[L]
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    sat = s[t >= 0.8 * t.max()].mean()
    above = t[s >= sat_fraction * sat]
    if above.size == 0:
        raise CollapseError("series never approaches saturation")
    for cap in (above.min(), 2 * above.min()):
        m = (t >= t_min) & (t <= cap) & (s > 0)
        if m.sum() >= 3:
            break
    if m.sum() < 3:
        raise CollapseError("not enough early-time points for a growth-exponent fit")
    return float(np.polyfit(np.log(t[m]), np.log(s[m]), 1)[0])


def _tail_slope(L, t, S, gamma, z, x_min: float) -> float:
    x = np.log10(t) - z * np.log10(L.astype(float))
    y = S / L.astype(float) ** gamma
    m = x >= np.log10(x_min)
    if m.sum() < 3:
        return float("nan")
    return float(np.polyfit(x[m], y[m], 1)[0])


# ---------------- derived quantities & diagnostics ----------------


def derived_exponents(result: CollapseResult) -> dict[str, dict[str, float]]:
    """Pure arithmetic on the fitted exponents with bootstrap-propagated CIs.

    Reports (1-gamma)*nu (vanishing of the volume-law coefficient),
    gamma*nu (divergence of the area-law value), and nu*(z-gamma)
    (vanishing of the entanglement velocity) when z is available.
    """
    if result.nu is None:
        raise ValueError("derived exponents need a fitted nu")
    out: dict[str, dict[str, float]] = {}

    def entry(name, value, samples):
        rec = {"value": float(value)}
        if samples is not None and len(samples):
            lo, hi = _percentile_ci(samples, float(value))
            rec["lo"], rec["hi"] = lo, hi
        out[name] = rec

    s_nu = result.samples.get("nu")
    s_gamma = result.samples.get("gamma")
    both = s_nu is not None and s_gamma is not None and len(s_nu) == len(s_gamma)
    entry(
        "(1-gamma)*nu",
        (1 - result.gamma) * result.nu,
        (1 - s_gamma) * s_nu if both else None,
    )
    entry("gamma*nu", result.gamma * result.nu, s_gamma * s_nu if both else None)
    if result.z is not None:
        s_z = result.samples.get("z")
        if s_z is not None and len(s_z):
            entry("nu*(z-gamma)", result.nu * (result.z - result.gamma), (s_z - result.gamma) * result.nu)
        else:
            entry("nu*(z-gamma)", result.nu * (result.z - result.gamma), None)
    return out


def side_diagnostics(data: SweepDataset, n_sizes: int = 2) -> list[dict[str, float]]:
    """log S vs log L slope over the largest `n_sizes` sizes, per p.

    Slope ~ 1 marks the volume-law side, ~ 0 the area-law side, ~ gamma
    the critical fan; used to bracket p_c before fitting.
    """
    if len(data.sizes()) < 3:
        raise ValueError("side diagnostics need at least 3 sizes per p")
    out = []
    for p in np.unique(data.p):
        m = data.p == p
        order = np.argsort(data.L[m])
        Ls = data.L[m][order].astype(float)
        Ss = data.S[m][order]
        keep = Ss > 0
        Ls, Ss = Ls[keep], Ss[keep]
        if len(Ls) < 2:
            continue
        Ls, Ss = Ls[-n_sizes:], Ss[-n_sizes:]
        slope = float(np.polyfit(np.log(Ls), np.log(Ss), 1)[0]) if len(Ls) > 1 else float("nan")
        out.append({"p": float(p), "slope": slope, "n_sizes": int(len(Ls))})
    return out


def loglinear_comparison(data: SweepDataset, cut: float = 0.25) -> list[dict[str, float]]:
    """Alternative-form fit S = a(p) log(L_A) + b(p) L_A, reported per p.

    Comparison output only; the collapse fits above are the ones used for
    acceptance.
    """
    out = []
    for p in np.unique(data.p):
        m = data.p == p
        la = cut * data.L[m].astype(float)
        design = np.stack([np.log(la), la], axis=1)
        coef, *_ = np.linalg.lstsq(design, data.S[m], rcond=None)
        out.append({"p": float(p), "a": float(coef[0]), "b": float(coef[1])})
    return out


def master_tail_slopes(
    data: SweepDataset,
    result: CollapseResult,
    x_cut: float = 1.0,
    window: tuple[float, float] | None = None,
) -> dict[str, float]:
    """Soft consistency check of the collapsed master-curve tails.

    Reports log-log slopes: F(x) should grow like |x|^((1-gamma) nu) as
    x -> -inf and decay like x^(-gamma nu) as x -> +inf. Reported, never
    asserted (finite sizes reach the asymptotics slowly).
    """
    ds = data.restrict(*window) if window is not None else data
    x = (ds.p - result.p_c) * ds.L.astype(float) ** (1.0 / result.nu)
    y = ds.S / ds.L.astype(float) ** result.gamma
    out = {}
    left = (x <= -x_cut) & (y > 0)
    if left.sum() >= 3:
        out["left_slope"] = float(np.polyfit(np.log(-x[left]), np.log(y[left]), 1)[0])
    right = (x >= x_cut) & (y > 0)
    if right.sum() >= 3:
        out["right_slope"] = float(np.polyfit(np.log(x[right]), np.log(y[right]), 1)[0])
    out["expected_left"] = (1 - result.gamma) * result.nu
    out["expected_right"] = -result.gamma * result.nu
    return out
