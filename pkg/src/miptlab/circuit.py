"""Brick-layer hybrid circuit driver.

Builds the alternating odd-link/even-link gate pattern under open
boundaries, marks each gate as measure-then-unitary (UP) with probability
p, drives quantum trajectories on the stabilizer backend (Clifford
models B1/B2) or the dense backend (Haar models A1/A2), and aggregates
trajectory ensembles and density-matrix channel runs.

Determinism contract: everything a trajectory does is derived from
(master_seed, trajectory index) through one counter-seeded stream, with a
fixed consumption order per layer: UP flags for all gates left to right,
then measurement outcomes for the flagged gates left to right, then the
unitaries left to right. Results never depend on worker scheduling.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import dense
from .clifford_group import get_table
from .stabilizer import StabilizerState

MODELS: dict[str, tuple[str, str]] = {
    "A1": ("P1", "haar"),
    "A2": ("P2", "haar"),
    "B1": ("P1", "clifford"),
    "B2": ("P2", "clifford"),
}

DENSE_MAX_QUBITS = 16
CHANNEL_MAX_QUBITS = 10
CHANNEL_OVERRIDE_MAX_QUBITS = 12
STEADY_TAIL_FRACTION = 0.2

DEFAULT_T_DENSE = 200
DEFAULT_T_CLIFFORD = 600


class ConfigError(ValueError):
    """Invalid circuit configuration."""


class CapacityError(ConfigError):
    """Requested system size exceeds the backend's capacity guard."""


def default_record_times(T: int) -> tuple[int, ...]:
    """Every period up to t=50, then every 10 periods (entropy evaluation
    stays subdominant to gate application)."""
    times = list(range(0, min(T, 50) + 1))
    t = 60
    while t <= T:
        times.append(t)
        t += 10
    if times[-1] != T:
        times.append(T)
    return tuple(times)


@dataclass(frozen=True)
class CircuitConfig:
    """Full specification of one circuit experiment.

    cut is the subsystem fraction L_A / L (1/4 unless stated otherwise);
    record_each_layer additionally samples entropies after the odd layer
    (used by the Zeno-profile experiments, where the steady profile must
    average both layer parities); record_profile stores S(L_A) for every
    prefix cut at tail-window record times.
    """

    model: str
    L: int
    p: float
    T: int
    cut: float = 0.25
    n_trajectories: int = 100
    master_seed: int = 0
    record_times: tuple[float, ...] | None = None
    record_each_layer: bool = False
    record_profile: bool = False
    override_capacity: bool = False

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}")
        if self.L < 4 or self.L % 2:
            raise ConfigError("L must be even and >= 4")
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError("p must lie in [0, 1]")
        if self.T < 0:
            raise ConfigError("T must be >= 0")
        if not 0.0 < self.cut <= 0.5:
            raise ConfigError("cut fraction must lie in (0, 1/2]")
        la = self.cut * self.L
        if abs(la - round(la)) > 1e-9:
            raise ConfigError(f"cut * L = {la} is not an integer")
        if self.n_trajectories < 1:
            raise ConfigError("need at least one trajectory")
        if self.record_times is not None:
            ts = tuple(float(t) for t in self.record_times)
            if any(t < 0 or t > self.T for t in ts) or list(ts) != sorted(set(ts)):
                raise ConfigError("record_times must be sorted, unique, within [0, T]")
            object.__setattr__(self, "record_times", ts)

    @property
    def subsystem_size(self) -> int:
        return int(round(self.cut * self.L))

    @property
    def projector_set(self) -> str:
        return MODELS[self.model][0]

    @property
    def engine(self) -> str:
        return MODELS[self.model][1]

    def times(self) -> tuple[float, ...]:
        if self.record_times is not None:
            return self.record_times
        return tuple(float(t) for t in default_record_times(self.T))

    def manifest(self) -> dict[str, str]:
        """Flat key/value form, the unit of hashing and serialization."""
        rt = "default" if self.record_times is None else ",".join(repr(t) for t in self.record_times)
        return {
            "model": self.model,
            "L": str(self.L),
            "p": repr(self.p),
            "T": str(self.T),
            "cut": repr(self.cut),
            "n_trajectories": str(self.n_trajectories),
            "master_seed": str(self.master_seed),
            "record_times": rt,
            "record_each_layer": str(self.record_each_layer),
            "record_profile": str(self.record_profile),
            "override_capacity": str(self.override_capacity),
        }

    def digest(self) -> str:
        text = "\n".join(f"{k}={v}" for k, v in self.manifest().items())
        return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass
class TrajectoryRecord:
    """One quantum trajectory's sampled entropies."""

    config_digest: str
    index: int
    times: np.ndarray
    entropies: np.ndarray
    n_gates: int
    n_up_gates: int
    n_measurements: int
    profile_times: np.ndarray | None = None
    profiles: np.ndarray | None = None  # (len(profile_times), L + 1)


@dataclass
class EnsembleSummary:
    """Trajectory-ensemble averages of S_A(t) plus the steady-state estimate."""

    config: CircuitConfig
    times: np.ndarray
    mean_entropy: np.ndarray
    stderr: np.ndarray
    n_trajectories: int
    steady_value: float
    steady_err: float
    profile_mean: np.ndarray | None = None
    profile_err: np.ndarray | None = None
    n_gates: int = 0
    n_up_gates: int = 0


def layer_pairs(t: int, L: int) -> np.ndarray:
    """Site pairs of layer t (1-based): odd layers couple the odd links
    (0,1),(2,3),...; even layers the even links (1,2),(3,4),... under open
    boundaries (L/2 - 1 gates)."""
    if t < 1:
        raise ValueError("layer index starts at 1")
    start = 0 if t % 2 else 1
    first = np.arange(start, L - 1, 2)
    return np.stack([first, first + 1], axis=1)


def trajectory_rng(master_seed: int, index: int) -> np.random.Generator:
    """Counter-based per-trajectory stream (reproducible under parallelism)."""
    return np.random.default_rng(np.random.SeedSequence(entropy=master_seed, spawn_key=(index,)))


def _steady_mask(times: np.ndarray, T: int) -> np.ndarray:
    mask = times >= (1.0 - STEADY_TAIL_FRACTION) * T
    if not mask.any():
        mask = times == times.max()
    return mask


def run_trajectory(config: CircuitConfig, index: int) -> TrajectoryRecord:
    """Evolve one trajectory from |+>^L and sample S_A at the record times."""
    proj, family = MODELS[config.model]
    L = config.L
    la = config.subsystem_size
    timeset = set(config.times())
    rng = trajectory_rng(config.master_seed, index)

    if family == "clifford":
        state: object = StabilizerState.plus_state(L)
        table = get_table()
        entropy = lambda cut: float(state.entanglement_entropy(cut))  # noqa: E731
    else:
        if L > DENSE_MAX_QUBITS:
            raise CapacityError(f"dense backend capped at L = {DENSE_MAX_QUBITS}, got {L}")
        state = dense.PureState.plus_state(L)
        entropy = lambda cut: dense.renyi2_entropy(state, cut)  # noqa: E731

    odd_pairs = layer_pairs(1, L)
    even_pairs = layer_pairs(2, L)
    tail_start = (1.0 - STEADY_TAIL_FRACTION) * config.T

    rec_t: list[float] = []
    rec_s: list[float] = []
    prof_t: list[float] = []
    prof: list[list[float]] = []
    n_gates = n_up = n_meas = 0

    def sample(tval: float) -> None:
        rec_t.append(tval)
        rec_s.append(entropy(la))
        if config.record_profile and tval >= tail_start:
            prof_t.append(tval)
            prof.append([entropy(a) for a in range(L + 1)])

    if 0 in timeset:
        sample(0.0)
    for t in range(1, config.T + 1):
        for layer, pairs in ((1, odd_pairs), (2, even_pairs)):
            flags = rng.random(len(pairs)) < config.p
            n_gates += len(pairs)
            n_up += int(flags.sum())
            for qi in np.nonzero(flags)[0]:
                pair = pairs[qi]
                if family == "clifford":
                    outs = state.apply_measurement_block(pair, proj, rng)
                    n_meas += len(outs)
                else:
                    dense.project_and_sample(state, proj, pair, rng)
                    n_meas += 2 if proj == "P1" else 1
            if family == "clifford":
                idxs = table.sample_index(rng, size=len(pairs))
                state.apply_clifford_layer(pairs, table.table_bits[idxs], table.table_signs[idxs])
            else:
                us = dense.sample_haar_u4_batch(rng, len(pairs))
                for qi in range(len(pairs)):
                    dense.apply_unitary(state, us[qi], pairs[qi])
            if layer == 1 and config.record_each_layer and t in timeset:
                sample(t - 0.5)
        if t in timeset:
            sample(float(t))

    return TrajectoryRecord(
        config_digest=config.digest(),
        index=index,
        times=np.array(rec_t),
        entropies=np.array(rec_s),
        n_gates=n_gates,
        n_up_gates=n_up,
        n_measurements=n_meas,
        profile_times=np.array(prof_t) if prof_t else None,
        profiles=np.array(prof) if prof else None,
    )


def _trajectory_job(args: tuple[CircuitConfig, int]) -> TrajectoryRecord:
    return run_trajectory(*args)


def _aggregate(config: CircuitConfig, records: list[TrajectoryRecord]) -> EnsembleSummary:
    times = records[0].times
    ent = np.stack([r.entropies for r in records])
    n = len(records)
    mean = ent.mean(axis=0)
    stderr = ent.std(axis=0, ddof=1) / np.sqrt(n)
    mask = _steady_mask(times, config.T)
    tails = ent[:, mask].mean(axis=1)
    steady = float(tails.mean())
    steady_err = float(tails.std(ddof=1) / np.sqrt(n))
    profile_mean = profile_err = None
    if records[0].profiles is not None:
        per_traj = np.stack([r.profiles.mean(axis=0) for r in records])
        profile_mean = per_traj.mean(axis=0)
        profile_err = per_traj.std(axis=0, ddof=1) / np.sqrt(n)
    return EnsembleSummary(
        config=config,
        times=times,
        mean_entropy=mean,
        stderr=stderr,
        n_trajectories=n,
        steady_value=steady,
        steady_err=steady_err,
        profile_mean=profile_mean,
        profile_err=profile_err,
        n_gates=sum(r.n_gates for r in records),
        n_up_gates=sum(r.n_up_gates for r in records),
    )


def run_ensemble(config: CircuitConfig, workers: int = 1) -> EnsembleSummary:
    """Run the configured number of independent trajectories and aggregate.

    The result is bit-identical for a fixed config regardless of `workers`.
    """
    n = config.n_trajectories
    if n < 2:
        raise ConfigError("an ensemble needs at least 2 trajectories")
    jobs = [(config, k) for k in range(n)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_trajectory_job, jobs, chunksize=max(1, n // (4 * workers))))
    else:
        records = [run_trajectory(config, k) for k in range(n)]
    return _aggregate(config, records)


def _channel_job(args: tuple[CircuitConfig, int]) -> np.ndarray:
    config, index = args
    proj, family = MODELS[config.model]
    L = config.L
    rng = trajectory_rng(config.master_seed, index)
    rho = dense.MixedState.from_pure(dense.PureState.plus_state(L))
    timeset = set(config.times())
    odd_pairs = layer_pairs(1, L)
    even_pairs = layer_pairs(2, L)
    out = []
    if 0 in timeset:
        out.append(dense.thermal_entropy(rho))
    for t in range(1, config.T + 1):
        for pairs in (odd_pairs, even_pairs):
            flags = rng.random(len(pairs)) < config.p
            dense.channel_step(rho, pairs, flags, proj, rng)
        if t in timeset:
            out.append(dense.thermal_entropy(rho))
    return np.array(out)


def run_channel(config: CircuitConfig, workers: int = 1) -> EnsembleSummary:
    """Density-matrix (outcome-summed) evolution; S_th(t) averaged over
    `n_trajectories` independent unitary realizations."""
    proj, family = MODELS[config.model]
    if family != "haar":
        raise ConfigError("channel evolution is defined for the dense models A1/A2")
    cap = CHANNEL_OVERRIDE_MAX_QUBITS if config.override_capacity else CHANNEL_MAX_QUBITS
    if config.L > cap:
        raise CapacityError(
            f"channel evolution capped at L = {cap}"
            + ("" if config.override_capacity else " (set override_capacity for up to 12)")
        )
    n = config.n_trajectories
    jobs = [(config, k) for k in range(n)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            series = list(pool.map(_channel_job, jobs))
    else:
        series = [_channel_job(j) for j in jobs]
    ent = np.stack(series)
    times = np.array(config.times(), dtype=float)
    mask = _steady_mask(times, config.T)
    tails = ent[:, mask].mean(axis=1)
    return EnsembleSummary(
        config=config,
        times=times,
        mean_entropy=ent.mean(axis=0),
        stderr=ent.std(axis=0, ddof=1) / np.sqrt(n) if n > 1 else np.zeros(ent.shape[1]),
        n_trajectories=n,
        steady_value=float(tails.mean()),
        steady_err=float(tails.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0,
    )


def run_trajectory_mirrored(config: CircuitConfig, index: int):
    """Drive one Clifford-model trajectory through BOTH engines.

    Shared decision stream; Born coin flips happen in the stabilizer
    engine and the dense state is projected onto the same outcomes.
    Returns (times, stabilizer profiles, dense profiles), each profile row
    holding S(L_A) for every prefix cut L_A = 0..L. Oracle for the
    backend-equivalence acceptance criterion.
    """
    proj, family = MODELS[config.model]
    if family != "clifford":
        raise ConfigError("mirrored runs are defined for the Clifford models")
    L = config.L
    if L > DENSE_MAX_QUBITS:
        raise CapacityError("mirrored runs need the dense backend: L <= 16")
    rng = trajectory_rng(config.master_seed, index)
    table = get_table()
    stab = StabilizerState.plus_state(L)
    psi = dense.PureState.plus_state(L)
    odd_pairs = layer_pairs(1, L)
    even_pairs = layer_pairs(2, L)
    timeset = set(config.times())

    times = []
    stab_prof = []
    dense_prof = []

    def sample(tval: float) -> None:
        times.append(tval)
        stab_prof.append([float(stab.entanglement_entropy(a)) for a in range(L + 1)])
        dense_prof.append([dense.renyi2_entropy(psi, a) for a in range(L + 1)])

    if 0 in timeset:
        sample(0.0)
    for t in range(1, config.T + 1):
        for pairs in (odd_pairs, even_pairs):
            flags = rng.random(len(pairs)) < config.p
            for qi in np.nonzero(flags)[0]:
                pair = pairs[qi]
                outs = stab.apply_measurement_block(pair, proj, rng)
                outcome = 2 * outs[0] + outs[1] if proj == "P1" else outs[0]
                dense.project_onto(psi, proj, pair, outcome)
            idxs = table.sample_index(rng, size=len(pairs))
            stab.apply_clifford_layer(pairs, table.table_bits[idxs], table.table_signs[idxs])
            for qi in range(len(pairs)):
                dense.apply_unitary(psi, table.matrices[idxs[qi]], pairs[qi])
        if t in timeset:
            sample(float(t))
    return np.array(times), np.array(stab_prof), np.array(dense_prof)
