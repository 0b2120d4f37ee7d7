import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from miptlab import gf2


def naive_rank(bits) -> int:
    """Independent per-bit elimination oracle (plain ints, no packing)."""
    bits = np.asarray(bits) % 2
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


def test_rank_identity():
    assert gf2.rank(gf2.BitMatrix.from_bits(np.eye(4, dtype=int))) == 4


def test_rank_zero():
    assert gf2.rank(gf2.BitMatrix.zeros(3, 5)) == 0


def test_rank_dependent_rows():
    m = gf2.BitMatrix.from_bits([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    assert gf2.rank(m) == 2  # row1 XOR row2 = row3


def test_row_reduce_independent():
    m = gf2.BitMatrix.from_bits([[1, 1], [0, 1]])
    red, rank = gf2.row_reduce(m)
    assert rank == 2
    assert gf2.rank(red) == 2


def test_row_reduce_duplicate_rows():
    _, rank = gf2.row_reduce(gf2.BitMatrix.from_bits([[1, 1], [1, 1]]))
    assert rank == 1


def test_row_reduce_preserves_row_space_and_echelon():
    rng = np.random.default_rng(7)
    for _ in range(30):
        bits = rng.integers(0, 2, size=(rng.integers(1, 40), rng.integers(1, 40)))
        m = gf2.BitMatrix.from_bits(bits)
        red, rank = gf2.row_reduce(m)
        assert rank == gf2.rank(m)
        stacked = np.concatenate([bits, red.to_bits()], axis=0)
        assert gf2.rank(gf2.BitMatrix.from_bits(stacked)) == rank
        # echelon: pivot (first set bit) columns strictly increase
        pivots = []
        for row in red.to_bits():
            nz = np.nonzero(row)[0]
            if nz.size:
                pivots.append(nz[0])
        assert pivots == sorted(set(pivots))
        # zero rows at the bottom only
        nonzero = [row.any() for row in red.to_bits()]
        assert nonzero == sorted(nonzero, reverse=True)


def test_rank_vs_naive_oracle_64():
    rng = np.random.default_rng(11)
    bits = rng.integers(0, 2, size=(64, 64))
    assert gf2.rank(gf2.BitMatrix.from_bits(bits)) == naive_rank(bits)


def test_rank_vs_naive_oracle_random_shapes():
    rng = np.random.default_rng(12)
    for _ in range(300):
        r = int(rng.integers(1, 129))
        c = int(rng.integers(1, 129))
        bits = (rng.random((r, c)) < rng.random()).astype(np.uint8)
        assert gf2.rank(gf2.BitMatrix.from_bits(bits)) == naive_rank(bits)


def test_rank_bound_and_row_op_invariance():
    rng = np.random.default_rng(13)
    for _ in range(100):
        r = int(rng.integers(2, 50))
        c = int(rng.integers(2, 50))
        bits = rng.integers(0, 2, size=(r, c)).astype(np.uint8)
        rank0 = gf2.rank(gf2.BitMatrix.from_bits(bits))
        assert rank0 <= min(r, c)
        i, j = rng.choice(r, size=2, replace=False)
        swapped = bits.copy()
        swapped[[i, j]] = swapped[[j, i]]
        assert gf2.rank(gf2.BitMatrix.from_bits(swapped)) == rank0
        xored = bits.copy()
        xored[i] ^= xored[j]
        assert gf2.rank(gf2.BitMatrix.from_bits(xored)) == rank0


def test_pack_roundtrip_and_bit_access():
    rng = np.random.default_rng(5)
    bits = rng.integers(0, 2, size=(9, 131)).astype(np.uint8)
    m = gf2.BitMatrix.from_bits(bits)
    assert np.array_equal(m.to_bits(), bits)
    assert m.get(3, 130) == bits[3, 130]
    m.set(3, 130, 1 - bits[3, 130])
    assert m.get(3, 130) == 1 - bits[3, 130]
    with pytest.raises(IndexError):
        m.get(0, 131)
    with pytest.raises(IndexError):
        m.set(9, 0, 1)


def test_copy_is_independent():
    m = gf2.BitMatrix.from_bits([[1, 0], [0, 1]])
    c = m.copy()
    c.set(0, 1, 1)
    assert m.get(0, 1) == 0
    assert m != c


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 20).flatmap(
        lambda c: st.lists(
            st.lists(st.integers(0, 1), min_size=c, max_size=c), min_size=1, max_size=20
        )
    )
)
def test_rank_matches_naive_hypothesis(rows):
    bits = np.array(rows, dtype=np.uint8)
    assert gf2.rank(gf2.BitMatrix.from_bits(bits)) == naive_rank(bits)
