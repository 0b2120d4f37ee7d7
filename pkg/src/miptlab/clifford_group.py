"""Uniform sampling from the 2-qubit Clifford group (mod global phase).

The group is enumerated once by breadth-first closure over the generator
set {CNOT both orientations, H and S on either site}, canonicalized by the
signed generator-image signature; the 11520 classes are then sampled by
uniform index. Exact uniformity, trivially testable, ~2 MB of tables.
"""

from __future__ import annotations

import numpy as np

from .pauli import (
    CliffordGate,
    build_conjugation_tables,
    cnot_ctrl_first,
    cnot_ctrl_second,
    embed_one_qubit,
    hadamard,
    identity_gate,
    phase_gate,
)

GROUP_ORDER = 11520
_SAFETY_BOUND = 4 * GROUP_ORDER
_W4 = (1 << np.arange(4)).astype(np.uint8)


def default_generators() -> list[CliffordGate]:
    return [
        cnot_ctrl_first(),
        cnot_ctrl_second(),
        embed_one_qubit(hadamard(), 0),
        embed_one_qubit(hadamard(), 1),
        embed_one_qubit(phase_gate(), 0),
        embed_one_qubit(phase_gate(), 1),
    ]


def enumerate_2q_classes() -> list[CliffordGate]:
    """All 11520 phase-classes, sorted by canonical signature.

    Raises RuntimeError if the closure does not land exactly on the known
    group order (which would mean a generator-implementation bug).
    """
    gens = default_generators()
    ident = identity_gate(2)
    seen: dict[bytes, tuple[np.ndarray, np.ndarray, np.ndarray]] = {
        ident.key: (ident.image_bits, ident.image_signs, ident.matrix)
    }
    frontier = [ident.key]
    while frontier:
        fresh = []
        for key in frontier:
            bits, signs, mat = seen[key]
            idx = bits @ _W4
            for gen in gens:
                nb = gen.table_bits[idx]
                ns = signs ^ gen.table_signs[idx]
                nkey = nb.tobytes() + ns.tobytes()
                if nkey not in seen:
                    seen[nkey] = (nb, ns, gen.matrix @ mat)
                    fresh.append(nkey)
                    if len(seen) > _SAFETY_BOUND:
                        raise RuntimeError("Clifford closure exceeded safety bound")
        frontier = fresh
    if len(seen) != GROUP_ORDER:
        raise RuntimeError(f"Clifford closure has {len(seen)} classes, expected {GROUP_ORDER}")
    keys = sorted(seen)
    all_bits = np.stack([seen[k][0] for k in keys])
    all_signs = np.stack([seen[k][1] for k in keys])
    table_bits, table_signs = build_conjugation_tables(all_bits, all_signs)
    gates = []
    for i, key in enumerate(keys):
        g = CliffordGate.__new__(CliffordGate)
        g.arity = 2
        g.image_bits = all_bits[i]
        g.image_signs = all_signs[i]
        g.table_bits = table_bits[i]
        g.table_signs = table_signs[i]
        g.matrix = seen[key][2]
        gates.append(g)
    return gates


class CliffordGateTable:
    """Immutable, shareable table of the 11520 classes with stacked tables."""

    def __init__(self, gates: list[CliffordGate]):
        self.gates = gates
        self.table_bits = np.stack([g.table_bits for g in gates])
        self.table_signs = np.stack([g.table_signs for g in gates])
        self.matrices = np.stack([g.matrix for g in gates])
        self._index = {g.key: i for i, g in enumerate(gates)}

    def __len__(self) -> int:
        return len(self.gates)

    def sample_index(self, rng: np.random.Generator, size=None):
        return rng.integers(0, len(self.gates), size=size)

    def sample(self, rng: np.random.Generator) -> CliffordGate:
        return self.gates[int(self.sample_index(rng))]

    def index_of(self, gate: CliffordGate) -> int:
        try:
            return self._index[gate.key]
        except KeyError:
            raise KeyError("gate is not a canonical 2-qubit Clifford class") from None

    def dump_signatures(self, path) -> None:
        """Audit dump: one line per class with its four generator images."""
        with open(path, "w") as fh:
            for i, g in enumerate(self.gates):
                fh.write(f"{i}\t{g!r}\n")


_TABLE: CliffordGateTable | None = None


def get_table() -> CliffordGateTable:
    """Process-wide table, built on first use."""
    global _TABLE
    if _TABLE is None:
        _TABLE = CliffordGateTable(enumerate_2q_classes())
    return _TABLE


def sample_uniform_2q(rng: np.random.Generator, table: CliffordGateTable | None = None) -> CliffordGate:
    """One gate drawn uniformly from the 11520 classes."""
    if table is None:
        table = get_table()
    return table.sample(rng)
