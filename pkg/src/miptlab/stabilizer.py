"""CHP-style stabilizer tableau: Clifford gates, Pauli measurement, entropy.

The tableau keeps 2L generators for an L-qubit pure stabilizer state:
rows 0..L-1 are destabilizers, rows L..2L-1 stabilizers. Row i carries
X bits, Z bits (uint8 arrays) and a sign bit; destabilizer i anticommutes
with stabilizer i and commutes with every other generator, which makes
deterministic measurement outcomes an O(L^2) bookkeeping exercise instead
of a full linear solve.

Entanglement entropy of a contiguous prefix region A comes from the GF(2)
rank of the stabilizer rows restricted to A: S_A = rank(G_A) - |A|, in bits
(all Renyi indices coincide for stabilizer states).
"""

from __future__ import annotations

import numpy as np

from . import gf2
from .pauli import CliffordGate, PauliOperator, g_exponent


class StabilizerState:
    """Pure stabilizer state of L qubits in tableau form."""

    __slots__ = ("n_qubits", "x", "z", "r")

    def __init__(self, n_qubits: int):
        if n_qubits < 1:
            raise ValueError("need at least one qubit")
        L = n_qubits
        self.n_qubits = L
        self.x = np.zeros((2 * L, L), dtype=np.uint8)
        self.z = np.zeros((2 * L, L), dtype=np.uint8)
        self.r = np.zeros(2 * L, dtype=np.uint8)

    # ---------------- construction ----------------

    @classmethod
    def plus_state(cls, n_qubits: int) -> "StabilizerState":
        """|+>^L: stabilizers X_i, destabilizers Z_i."""
        s = cls(n_qubits)
        idx = np.arange(n_qubits)
        s.z[idx, idx] = 1
        s.x[n_qubits + idx, idx] = 1
        return s

    @classmethod
    def zero_state(cls, n_qubits: int) -> "StabilizerState":
        """|0>^L: stabilizers Z_i, destabilizers X_i."""
        s = cls(n_qubits)
        idx = np.arange(n_qubits)
        s.x[idx, idx] = 1
        s.z[n_qubits + idx, idx] = 1
        return s

    def copy(self) -> "StabilizerState":
        s = StabilizerState.__new__(StabilizerState)
        s.n_qubits = self.n_qubits
        s.x = self.x.copy()
        s.z = self.z.copy()
        s.r = self.r.copy()
        return s

    # ---------------- generator access ----------------

    def _row_pauli(self, row: int) -> PauliOperator:
        p = PauliOperator(self.x[row].copy(), self.z[row].copy())
        p.sign_bit = int(self.r[row])
        return p

    def stabilizer(self, i: int) -> PauliOperator:
        return self._row_pauli(self.n_qubits + i)

    def destabilizer(self, i: int) -> PauliOperator:
        return self._row_pauli(i)

    def stabilizer_labels(self) -> list[str]:
        return [self.stabilizer(i).label() for i in range(self.n_qubits)]

    def destabilizer_labels(self) -> list[str]:
        return [self.destabilizer(i).label() for i in range(self.n_qubits)]

    def __str__(self) -> str:
        return "\n".join(self.stabilizer_labels())

    # ---------------- Clifford gates ----------------

    def apply_clifford(self, gate: CliffordGate, sites) -> "StabilizerState":
        """Conjugate every generator by the gate acting on `sites`."""
        sites = tuple(int(s) for s in sites)
        if len(sites) != gate.arity:
            raise ValueError("site count must match gate arity")
        if len(set(sites)) != len(sites):
            raise ValueError("sites must be distinct")
        for s in sites:
            if not 0 <= s < self.n_qubits:
                raise ValueError(f"site {s} out of range")
        if gate.arity == 1:
            (i,) = sites
            idx = self.x[:, i] | (self.z[:, i] << 1)
            new = gate.table_bits[idx]
            self.x[:, i] = new[:, 0]
            self.z[:, i] = new[:, 1]
        else:
            i, j = sites
            idx = self.x[:, i] | (self.z[:, i] << 1) | (self.x[:, j] << 2) | (self.z[:, j] << 3)
            new = gate.table_bits[idx]
            self.x[:, i] = new[:, 0]
            self.z[:, i] = new[:, 1]
            self.x[:, j] = new[:, 2]
            self.z[:, j] = new[:, 3]
        self.r ^= gate.table_signs[idx]
        return self

    def apply_clifford_layer(self, pairs: np.ndarray, table_bits: np.ndarray, table_signs: np.ndarray) -> None:
        """Apply one 2-qubit gate per disjoint pair, all at once.

        pairs: (k, 2) site indices, disjoint. table_bits/table_signs are the
        stacked conjugation tables of the k gates ((k, 16, 4) and (k, 16)).
        """
        a = pairs[:, 0]
        b = pairs[:, 1]
        idx = self.x[:, a] | (self.z[:, a] << 1) | (self.x[:, b] << 2) | (self.z[:, b] << 3)
        cols = np.arange(pairs.shape[0])[None, :]
        nb = table_bits[cols, idx]
        self.x[:, a] = nb[..., 0]
        self.z[:, a] = nb[..., 1]
        self.x[:, b] = nb[..., 2]
        self.z[:, b] = nb[..., 3]
        self.r ^= np.bitwise_xor.reduce(table_signs[cols, idx], axis=1)

    # ---------------- measurement ----------------

    def _anticommute_vector(self, op: PauliOperator) -> np.ndarray:
        acc = np.zeros(2 * self.n_qubits, dtype=np.uint8)
        for j in np.nonzero(op.z)[0]:
            acc ^= self.x[:, j]
        for j in np.nonzero(op.x)[0]:
            acc ^= self.z[:, j]
        return acc

    def measure_pauli(self, op: PauliOperator, rng: np.random.Generator) -> int:
        """Projectively measure a Hermitian Pauli; returns the outcome bit.

        Outcome m means eigenvalue (-1)^m of `op`. If op commutes with the
        whole stabilizer group the outcome is deterministic (resolved via
        the destabilizers) and the state is untouched; otherwise one
        unbiased bit is drawn from `rng` and the tableau is updated so that
        (-1)^m op becomes a stabilizer.
        """
        if op.n_qubits != self.n_qubits:
            raise ValueError("operator size does not match state")
        L = self.n_qubits
        anti = self._anticommute_vector(op)
        stab_hits = np.nonzero(anti[L:])[0]
        if stab_hits.size == 0:
            return self._measure_deterministic(op, anti)
        p = L + int(stab_hits[0])
        targets = np.nonzero(anti)[0]
        targets = targets[(targets != p) & (targets != p - L)]
        if targets.size:
            stab_targets = targets[targets >= L]
            if stab_targets.size:
                # phase of R_p · R_h per target via three dot products
                px = self.x[p].astype(np.int32)
                pz = self.z[p].astype(np.int32)
                A = pz * (1 - 2 * px)
                B = px * (2 * pz - 1)
                C = 2 * (px - pz)
                xs = self.x[stab_targets]
                zs = self.z[stab_targets]
                gsum = xs @ A + zs @ B + (xs & zs) @ C
                total = gsum + 2 * self.r[stab_targets].astype(np.int32) + 2 * int(self.r[p])
                if np.any(total % 2):
                    raise AssertionError("±i phase failed to cancel in rowsum")
                self.r[stab_targets] = ((total % 4) // 2).astype(np.uint8)
            self.x[targets] ^= self.x[p]
            self.z[targets] ^= self.z[p]
        # retire the pivot into the destabilizer slot, install ±op
        self.x[p - L] = self.x[p]
        self.z[p - L] = self.z[p]
        self.r[p - L] = self.r[p]
        outcome = int(rng.integers(0, 2))
        self.x[p] = op.x
        self.z[p] = op.z
        self.r[p] = outcome ^ op.sign_bit
        return outcome

    def _measure_deterministic(self, op: PauliOperator, anti: np.ndarray) -> int:
        L = self.n_qubits
        acc_x = np.zeros(L, dtype=np.uint8)
        acc_z = np.zeros(L, dtype=np.uint8)
        phase = 0
        for j in np.nonzero(anti[:L])[0]:
            s = L + j
            phase += int(g_exponent(acc_x, acc_z, self.x[s], self.z[s]).sum())
            phase += 2 * int(self.r[s])
            acc_x ^= self.x[s]
            acc_z ^= self.z[s]
        if not (np.array_equal(acc_x, op.x) and np.array_equal(acc_z, op.z)):
            raise AssertionError("operator commutes with stabilizers but is not in the group")
        if phase % 2:
            raise AssertionError("±i phase failed to cancel in group expansion")
        return ((phase % 4) // 2) ^ op.sign_bit

    def apply_measurement_block(self, pair, set_id: str, rng: np.random.Generator):
        """Run one measurement block on an adjacent pair.

        P1 measures Z on both sites (lower site first); P2 measures the
        two-site parity Z_i Z_j. Returns the tuple of outcome bits.
        """
        i, j = (int(pair[0]), int(pair[1]))
        if not (0 <= i < self.n_qubits and 0 <= j < self.n_qubits) or i == j:
            raise ValueError("bad measurement pair")
        if set_id == "P1":
            m0 = self.measure_pauli(PauliOperator.single_z(self.n_qubits, i), rng)
            m1 = self.measure_pauli(PauliOperator.single_z(self.n_qubits, j), rng)
            return (m0, m1)
        if set_id == "P2":
            m = self.measure_pauli(PauliOperator.zz(self.n_qubits, i, j), rng)
            return (m,)
        raise ValueError(f"unknown measurement set {set_id!r}")

    # ---------------- entropy & invariants ----------------

    def entanglement_entropy(self, region_size: int) -> int:
        """Entropy in bits of the prefix region {0, ..., region_size-1}."""
        L = self.n_qubits
        if not 0 <= region_size <= L:
            raise ValueError("region size out of range")
        if region_size in (0, L):
            return 0
        sub = np.concatenate(
            [self.x[L:, :region_size], self.z[L:, :region_size]], axis=1
        )
        return gf2.rank(gf2.BitMatrix.from_bits(sub)) - region_size

    def check_invariants(self) -> None:
        """Raise if the tableau is not a valid stabilizer/destabilizer pair basis."""
        L = self.n_qubits
        xi = self.x.astype(np.int32)
        zi = self.z.astype(np.int32)
        sp = (xi @ zi.T + zi @ xi.T) % 2
        want = np.zeros((2 * L, 2 * L), dtype=np.int64)
        idx = np.arange(L)
        want[idx, L + idx] = 1
        want[L + idx, idx] = 1
        if not np.array_equal(sp, want):
            raise ValueError("commutation structure violated")
        full = gf2.BitMatrix.from_bits(np.concatenate([self.x, self.z], axis=1))
        if gf2.rank(full) != 2 * L:
            raise ValueError("generators do not span the symplectic space")
        if not np.all((self.r == 0) | (self.r == 1)):
            raise ValueError("sign bits out of range")


def new_plus_product_state(n_qubits: int) -> StabilizerState:
    """The circuit initial state: product of |+> on every site."""
    return StabilizerState.plus_state(n_qubits)
