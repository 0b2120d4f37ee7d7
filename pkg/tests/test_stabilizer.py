import numpy as np
import pytest

from miptlab import dense
from miptlab import pauli as P
from miptlab.stabilizer import StabilizerState, new_plus_product_state


def bell_pair() -> StabilizerState:
    s = StabilizerState.zero_state(2)
    s.apply_clifford(P.hadamard(), (0,))
    s.apply_clifford(P.cnot_ctrl_first(), (0, 1))
    return s


def ghz(L: int) -> StabilizerState:
    s = StabilizerState.zero_state(L)
    s.apply_clifford(P.hadamard(), (0,))
    for i in range(L - 1):
        s.apply_clifford(P.cnot_ctrl_first(), (i, i + 1))
    return s


def random_state(L: int, rng, table, depth: int = 12) -> StabilizerState:
    s = StabilizerState.plus_state(L)
    for _ in range(depth):
        i = int(rng.integers(0, L - 1))
        s.apply_clifford(table.sample(rng), (i, i + 1))
    return s


def test_plus_state_basics(rng):
    with pytest.raises(ValueError):
        StabilizerState(0)
    s = new_plus_product_state(1)
    # stabilized by X: measuring X is deterministic +
    assert s.measure_pauli(P.PauliOperator.single_x(1, 0), rng) == 0
    s4 = new_plus_product_state(4)
    for cut in range(5):
        assert s4.entanglement_entropy(cut) == 0
    s4.check_invariants()
    assert s4.stabilizer_labels() == ["+XIII", "+IXII", "+IIXI", "+IIIX"]


def test_born_rule_on_plus(rng):
    shots = 10_000
    hits = 0
    for _ in range(shots):
        s = StabilizerState.plus_state(2)
        hits += s.measure_pauli(P.PauliOperator.single_z(2, 0), rng)
    freq = hits / shots
    assert abs(freq - 0.5) <= 3 * 0.5 / np.sqrt(shots)


def test_hadamard_conjugation():
    s = StabilizerState.zero_state(1)
    s.apply_clifford(P.hadamard(), (0,))
    assert s.stabilizer_labels() == ["+X"]


def test_bell_pair_entropy_and_invariants():
    b = bell_pair()
    b.check_invariants()
    assert sorted(b.stabilizer_labels()) == ["+XX", "+ZZ"]
    assert b.entanglement_entropy(1) == 1


def test_apply_clifford_site_validation():
    s = StabilizerState.plus_state(4)
    with pytest.raises(ValueError):
        s.apply_clifford(P.cnot_ctrl_first(), (1, 1))
    with pytest.raises(ValueError):
        s.apply_clifford(P.cnot_ctrl_first(), (3, 4))
    with pytest.raises(ValueError):
        s.apply_clifford(P.hadamard(), (0, 1))


def test_measure_deterministic_cases(rng):
    s = StabilizerState.zero_state(2)
    assert s.measure_pauli(P.PauliOperator.single_z(2, 0), rng) == 0
    b = bell_pair()
    assert b.measure_pauli(P.PauliOperator.zz(2, 0, 1), rng) == 0
    # measuring a negated member flips the outcome bit
    minus_zz = P.PauliOperator(np.zeros(2, dtype=np.uint8), np.ones(2, dtype=np.uint8), sign=-1)
    assert b.measure_pauli(minus_zz, rng) == 1


def test_measure_random_collapses(rng):
    s = StabilizerState.plus_state(1)
    z = P.PauliOperator.single_z(1, 0)
    first = s.measure_pauli(z, rng)
    for _ in range(5):
        assert s.measure_pauli(z, rng) == first
    s.check_invariants()


def test_deterministic_measurement_preserves_entropy(rng, clifford_table):
    for _ in range(20):
        s = random_state(6, rng, clifford_table)
        before = [s.entanglement_entropy(a) for a in range(7)]
        z = P.PauliOperator.single_z(6, int(rng.integers(0, 6)))
        s.measure_pauli(z, rng)  # collapse once; second measurement is deterministic
        mid = [s.entanglement_entropy(a) for a in range(7)]
        s.measure_pauli(z, rng)
        after = [s.entanglement_entropy(a) for a in range(7)]
        assert mid == after
        s.check_invariants()


def test_p1_block_on_bell_disentangles(rng):
    b = bell_pair()
    b.apply_measurement_block((0, 1), "P1", rng)
    for cut in range(3):
        assert b.entanglement_entropy(cut) == 0
    b.check_invariants()


def test_p2_block_on_bell_is_identity(rng):
    b = bell_pair()
    outs = b.apply_measurement_block((0, 1), "P2", rng)
    assert outs == (0,)
    assert b.entanglement_entropy(1) == 1


def test_p2_block_on_plus_plus_entangles(rng):
    # dense oracle: measuring Z0 Z1 on |++> leaves a 1-bit entangled state
    for _ in range(10):
        s = StabilizerState.plus_state(2)
        psi = dense.PureState.plus_state(2)
        (m,) = s.apply_measurement_block((0, 1), "P2", rng)
        dense.project_onto(psi, "P2", (0, 1), m)
        assert s.entanglement_entropy(1) == 1
        assert abs(dense.renyi2_entropy(psi, 1) - 1.0) < 1e-10


def test_block_errors(rng):
    s = StabilizerState.plus_state(4)
    with pytest.raises(ValueError):
        s.apply_measurement_block((3, 4), "P1", rng)
    with pytest.raises(ValueError):
        s.apply_measurement_block((0, 1), "P3", rng)
    with pytest.raises(ValueError):
        s.measure_pauli(P.PauliOperator.single_z(3, 0), rng)


def test_ghz_entropy():
    g = ghz(6)
    for cut in range(1, 6):
        assert g.entanglement_entropy(cut) == 1
    g.check_invariants()


def suffix_entropy(s: StabilizerState, region_size: int) -> int:
    """Oracle: entropy of the LAST `region_size` sites via the rank formula."""
    from miptlab import gf2

    L = s.n_qubits
    if region_size in (0, L):
        return 0
    sub = np.concatenate([s.x[L:, L - region_size:], s.z[L:, L - region_size:]], axis=1)
    return gf2.rank(gf2.BitMatrix.from_bits(sub)) - region_size


def test_entropy_bounds_and_complement(rng, clifford_table):
    # pure-state symmetry: a prefix region and its complementary suffix
    # carry the same entropy (identical Schmidt spectra)
    for _ in range(25):
        s = random_state(8, rng, clifford_table)
        for cut in range(9):
            e = s.entanglement_entropy(cut)
            assert 0 <= e <= min(cut, 8 - cut)
            assert e == suffix_entropy(s, 8 - cut)


def test_entropy_matches_dense_on_random_states(rng, clifford_table):
    for _ in range(30):
        L = 6
        s = StabilizerState.plus_state(L)
        psi = dense.PureState.plus_state(L)
        for _ in range(10):
            i = int(rng.integers(0, L - 1))
            g = clifford_table.sample(rng)
            s.apply_clifford(g, (i, i + 1))
            dense.apply_unitary(psi, g.unitary(), (i, i + 1))
        for cut in range(L + 1):
            assert abs(s.entanglement_entropy(cut) - dense.renyi2_entropy(psi, cut)) < 1e-8


def test_gate_conjugation_matches_dense_oracle(rng, clifford_table):
    # random table gates acting on small stabilizer states vs matrix conjugation
    for _ in range(100):
        g = clifford_table.sample(rng)
        u = g.unitary()
        for lab in ("XI", "IZ", "YX", "ZZ"):
            op = P.PauliOperator.from_label(lab)
            assert np.allclose(g.conjugate_pauli(op).matrix(), u @ op.matrix() @ u.conj().T, atol=1e-9)


def test_invariants_after_random_operations(rng, clifford_table):
    L = 10
    s = StabilizerState.plus_state(L)
    for step in range(2000):
        r = rng.random()
        if r < 0.5:
            s.apply_clifford(clifford_table.sample(rng), tuple(rng.choice(L, 2, replace=False)))
        elif r < 0.75:
            s.measure_pauli(P.PauliOperator.single_z(L, int(rng.integers(0, L))), rng)
        else:
            i = int(rng.integers(0, L - 1))
            s.apply_measurement_block((i, i + 1), "P2", rng)
        if step % 500 == 499:
            s.check_invariants()
    s.check_invariants()


def test_layer_application_matches_sequential(rng, clifford_table):
    L = 8
    pairs = np.array([[0, 1], [2, 3], [4, 5], [6, 7]])
    idxs = clifford_table.sample_index(rng, size=4)
    a = StabilizerState.plus_state(L)
    b = a.copy()
    a.apply_clifford_layer(pairs, clifford_table.table_bits[idxs], clifford_table.table_signs[idxs])
    for q in range(4):
        b.apply_clifford(clifford_table.gates[int(idxs[q])], tuple(pairs[q]))
    assert np.array_equal(a.x, b.x)
    assert np.array_equal(a.z, b.z)
    assert np.array_equal(a.r, b.r)


def test_text_serialization():
    b = bell_pair()
    text = str(b)
    assert text.splitlines() == b.stabilizer_labels()
    assert all(line[0] in "+-" for line in b.destabilizer_labels())
