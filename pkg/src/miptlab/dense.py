"""Dense state-vector and density-matrix engine for the Haar-unitary models.

Also serves as the brute-force oracle the stabilizer engine is validated
against. Site 0 is the most significant tensor factor of the amplitude
index, so a prefix region {0..L_A-1} is the leading axis block.

All entropies are second Renyi entropies in bits: s2 = -log2 Tr rho^2.
"""

from __future__ import annotations

import numpy as np

NORM_ATOL = 1e-10
TRACE_ATOL = 1e-10
TRACE_DRIFT_MAX = 1e-8
HERMITICITY_ATOL = 1e-10
EIGENVALUE_FLOOR = -1e-10
PROBABILITY_FLOOR = 1e-12

PROJECTOR_SETS = ("P1", "P2")
# outcome groups of the pair basis (00, 01, 10, 11) for each projector set:
# P1 has four rank-1 outcomes, P2 the two Z1 Z2 parity sectors.
_P2_GROUP = np.array([0, 1, 1, 0])


class PureState:
    """L-qubit pure state as a flat vector of 2^L amplitudes."""

    __slots__ = ("n_qubits", "amps")

    def __init__(self, n_qubits: int, amps: np.ndarray, check: bool = True):
        amps = np.ascontiguousarray(amps, dtype=complex)
        if amps.shape != (1 << n_qubits,):
            raise ValueError("amplitude count must be 2^L")
        if check:
            norm = np.linalg.norm(amps)
            if abs(norm - 1.0) > NORM_ATOL:
                raise ValueError(f"state not normalized: |norm-1| = {abs(norm-1.0):.3e}")
        self.n_qubits = n_qubits
        self.amps = amps

    @classmethod
    def plus_state(cls, n_qubits: int) -> "PureState":
        amps = np.full(1 << n_qubits, 2.0 ** (-n_qubits / 2), dtype=complex)
        return cls(n_qubits, amps, check=False)

    @classmethod
    def zero_state(cls, n_qubits: int) -> "PureState":
        return cls.basis_state(n_qubits, 0)

    @classmethod
    def basis_state(cls, n_qubits: int, index: int) -> "PureState":
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(n_qubits, amps, check=False)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def copy(self) -> "PureState":
        return PureState(self.n_qubits, self.amps.copy(), check=False)


class MixedState:
    """L-qubit density matrix (2^L x 2^L)."""

    __slots__ = ("n_qubits", "matrix")

    def __init__(self, n_qubits: int, matrix: np.ndarray, check: bool = True):
        matrix = np.ascontiguousarray(matrix, dtype=complex)
        dim = 1 << n_qubits
        if matrix.shape != (dim, dim):
            raise ValueError("matrix must be 2^L x 2^L")
        if check:
            if np.max(np.abs(matrix - matrix.conj().T)) > HERMITICITY_ATOL:
                raise ValueError("density matrix not Hermitian")
            tr = np.trace(matrix)
            if abs(tr - 1.0) > TRACE_ATOL:
                raise ValueError(f"trace != 1: {tr}")
        self.n_qubits = n_qubits
        self.matrix = matrix

    @classmethod
    def from_pure(cls, psi: PureState) -> "MixedState":
        return cls(psi.n_qubits, np.outer(psi.amps, psi.amps.conj()), check=False)

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "MixedState":
        dim = 1 << n_qubits
        return cls(n_qubits, np.eye(dim, dtype=complex) / dim, check=False)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def copy(self) -> "MixedState":
        return MixedState(self.n_qubits, self.matrix.copy(), check=False)

    def check_positive(self) -> None:
        """Audit helper: eigenvalues must not dip below -1e-10."""
        ev = np.linalg.eigvalsh(self.matrix)
        if ev.min() < EIGENVALUE_FLOOR:
            raise ValueError(f"negative eigenvalue {ev.min():.3e}")


# ---------------- Haar sampling ----------------


def sample_haar_u4_batch(rng: np.random.Generator, n: int) -> np.ndarray:
    """n Haar-distributed U(4) matrices: QR of complex Ginibre with the
    R-diagonal phase correction that makes the decomposition unique."""
    a = rng.standard_normal((n, 4, 4)) + 1j * rng.standard_normal((n, 4, 4))
    q, r = np.linalg.qr(a)
    d = np.einsum("nii->ni", r)
    return q * (d / np.abs(d))[:, None, :]


def sample_haar_u4(rng: np.random.Generator) -> np.ndarray:
    return sample_haar_u4_batch(rng, 1)[0]


# ---------------- pure-state operations ----------------


def _pair_block(amps: np.ndarray, L: int, i: int, j: int) -> np.ndarray:
    """Amplitudes as a (4, 2^(L-2)) block; row index = 2*bit_i + bit_j."""
    t = amps.reshape((2,) * L)
    return np.moveaxis(t, (i, j), (0, 1)).reshape(4, -1)


def _pair_block_write(state: PureState, block: np.ndarray, i: int, j: int) -> None:
    L = state.n_qubits
    t = block.reshape((2, 2) + (2,) * (L - 2))
    state.amps = np.ascontiguousarray(np.moveaxis(t, (0, 1), (i, j))).reshape(-1)


def _check_sites(L: int, sites) -> tuple[int, int]:
    i, j = (int(sites[0]), int(sites[1]))
    if i == j or not (0 <= i < L and 0 <= j < L):
        raise ValueError(f"bad site pair {sites}")
    return i, j


def apply_unitary(state: PureState, u: np.ndarray, sites) -> PureState:
    """Apply a 4x4 unitary to the (i, j) subspace, in place."""
    i, j = _check_sites(state.n_qubits, sites)
    block = _pair_block(state.amps, state.n_qubits, i, j)
    _pair_block_write(state, u @ block, i, j)
    return state


def outcome_probabilities(state: PureState, set_id: str, pair) -> np.ndarray:
    """Born weights of the projector set on an adjacent pair."""
    i, j = _check_sites(state.n_qubits, pair)
    block = _pair_block(state.amps, state.n_qubits, i, j)
    p4 = np.einsum("ar,ar->a", block, block.conj()).real
    if set_id == "P1":
        return p4
    if set_id == "P2":
        return np.array([p4[0] + p4[3], p4[1] + p4[2]])
    raise ValueError(f"unknown projector set {set_id!r}")


def _project(state: PureState, set_id: str, pair, outcome: int, probs: np.ndarray) -> None:
    i, j = _check_sites(state.n_qubits, pair)
    block = _pair_block(state.amps, state.n_qubits, i, j).copy()
    if set_id == "P1":
        keep = np.zeros(4, dtype=bool)
        keep[outcome] = True
    else:
        keep = _P2_GROUP == outcome
    block[~keep] = 0.0
    block /= np.sqrt(probs[outcome])
    _pair_block_write(state, block, i, j)


def project_and_sample(state: PureState, set_id: str, pair, rng: np.random.Generator) -> int:
    """Sample a measurement outcome by Born's rule and collapse, in place.

    P1 outcomes index the pair basis (alpha = 2*bit_i + bit_j); P2 outcomes
    are the Z_i Z_j parity (0 = aligned). Raises if the weights are so
    small the state must have been corrupted.
    """
    probs = outcome_probabilities(state, set_id, pair)
    total = probs.sum()
    if np.all(probs < PROBABILITY_FLOOR):
        raise RuntimeError("all outcome probabilities vanish; state corrupted")
    if abs(total - 1.0) > 1e-10:
        raise RuntimeError(f"projector completeness violated: sum p = {total}")
    u = rng.random()
    outcome = int(np.searchsorted(np.cumsum(probs), u, side="right"))
    outcome = min(outcome, len(probs) - 1)
    _project(state, set_id, pair, outcome, probs)
    return outcome


def project_onto(state: PureState, set_id: str, pair, outcome: int) -> PureState:
    """Force a specific outcome (oracle use); errors on a ~zero-probability branch."""
    probs = outcome_probabilities(state, set_id, pair)
    if probs[outcome] < PROBABILITY_FLOOR:
        raise RuntimeError(f"forced outcome {outcome} has vanishing probability")
    _project(state, set_id, pair, outcome, probs)
    return state


def renyi2_entropy(state: PureState, region_size: int) -> float:
    """-log2 Tr rho_A^2 for the prefix region of `region_size` sites.

    The reduced purity is computed on the smaller side of the bipartition
    (they agree exactly for pure states), never materializing |psi><psi|.
    """
    L = state.n_qubits
    if not 0 <= region_size <= L:
        raise ValueError("region size out of range")
    if region_size in (0, L):
        return 0.0
    m = state.amps.reshape(1 << region_size, -1)
    if region_size <= L - region_size:
        g = m @ m.conj().T
    else:
        g = m.conj().T @ m
    purity = float(np.vdot(g, g).real)
    return -float(np.log2(purity))


# ---------------- channel (density-matrix) operations ----------------


def _rho_pair_block(mat: np.ndarray, L: int, i: int, j: int) -> np.ndarray:
    t = mat.reshape((2,) * (2 * L))
    return np.moveaxis(t, (i, j, L + i, L + j), (0, 1, 2, 3)).reshape(4, 4, -1)


def apply_channel_gate(rho: MixedState, u: np.ndarray, pair, set_id: str | None) -> MixedState:
    """One local channel: optional projector average, then unitary conjugation.

    With a projector set, applies sum_a U P_a rho P_a U† (same U for every
    outcome); with set_id=None it is plain conjugation by U.
    """
    L = rho.n_qubits
    i, j = _check_sites(L, pair)
    block = _rho_pair_block(rho.matrix, L, i, j)
    if set_id is not None:
        if set_id == "P1":
            mask = np.eye(4, dtype=bool)
        elif set_id == "P2":
            mask = _P2_GROUP[:, None] == _P2_GROUP[None, :]
        else:
            raise ValueError(f"unknown projector set {set_id!r}")
        block = np.where(mask[:, :, None], block, 0.0)
    block = np.einsum("kK,KBr,bB->kbr", u, block, u.conj())
    t = block.reshape((2, 2, 2, 2) + (2,) * (2 * L - 4))
    rho.matrix = np.ascontiguousarray(
        np.moveaxis(t, (0, 1, 2, 3), (i, j, L + i, L + j))
    ).reshape(1 << L, 1 << L)
    return rho


def channel_step(
    rho: MixedState,
    pairs: np.ndarray,
    up_flags: np.ndarray,
    set_id: str,
    rng: np.random.Generator,
) -> MixedState:
    """One circuit layer on the density matrix; unitaries drawn from `rng`."""
    us = sample_haar_u4_batch(rng, len(pairs))
    for q, pair in enumerate(pairs):
        apply_channel_gate(rho, us[q], pair, set_id if up_flags[q] else None)
    drift = abs(np.trace(rho.matrix) - 1.0)
    if drift > TRACE_DRIFT_MAX:
        raise RuntimeError(f"trace drift {drift:.3e} beyond {TRACE_DRIFT_MAX}")
    return rho


def thermal_entropy(rho: MixedState) -> float:
    """-log2 Tr rho^2 of the full mixed state (ensemble averaging is the caller's job)."""
    purity = float(np.vdot(rho.matrix, rho.matrix).real)
    return -float(np.log2(purity))
