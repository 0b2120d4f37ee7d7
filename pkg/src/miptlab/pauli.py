"""Signed Pauli operators and Clifford gates represented by conjugation images.

Conventions used throughout the package:

- A Pauli is stored as per-site X/Z bits plus one overall sign bit; the
  site operator for bits (x, z) is the Hermitian one of {I, X, Z, Y},
  with Y = i X Z absorbed into the convention (never stored as a phase).
- A Clifford gate of arity n is determined by the signed images of the
  generators X_1, Z_1, ..., X_n, Z_n under conjugation. Composition and
  tableau updates only ever need these images.
"""

from __future__ import annotations

import numpy as np

_PAULI_CHARS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_CHAR_BITS = {v: k for k, v in _PAULI_CHARS.items()}

_I2 = np.eye(2, dtype=complex)
_MX = np.array([[0, 1], [1, 0]], dtype=complex)
_MY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_MZ = np.array([[1, 0], [0, -1]], dtype=complex)
_SITE_MATRICES = {(0, 0): _I2, (1, 0): _MX, (0, 1): _MZ, (1, 1): _MY}


def g_exponent(x1, z1, x2, z2):
    """Power of i picked up multiplying Hermitian site Paulis (x1,z1)·(x2,z2).

    Vectorized; each entry is in {-1, 0, 1}. The identity and equal-Pauli
    cases give 0; the six mixed cases give ±1 following X·Z = -iY cyclically.
    """
    x1 = np.asarray(x1, dtype=np.int32)
    z1 = np.asarray(z1, dtype=np.int32)
    x2 = np.asarray(x2, dtype=np.int32)
    z2 = np.asarray(z2, dtype=np.int32)
    return (
        x1 * z1 * (z2 - x2)
        + x1 * (1 - z1) * z2 * (2 * x2 - 1)
        + (1 - x1) * z1 * x2 * (1 - 2 * z2)
    )


class PauliOperator:
    """Hermitian Pauli on n qubits: X/Z bit strings and a ±1 sign."""

    __slots__ = ("x", "z", "sign_bit")

    def __init__(self, x, z, sign: int = 1):
        x = np.ascontiguousarray(x, dtype=np.uint8) & 1
        z = np.ascontiguousarray(z, dtype=np.uint8) & 1
        if x.ndim != 1 or x.shape != z.shape:
            raise ValueError("x and z bit strings must be 1-d and equal length")
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        self.x = x
        self.z = z
        self.sign_bit = 0 if sign == 1 else 1

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8))

    @classmethod
    def single_z(cls, n: int, site: int) -> "PauliOperator":
        op = cls.identity(n)
        op.z[site] = 1
        return op

    @classmethod
    def single_x(cls, n: int, site: int) -> "PauliOperator":
        op = cls.identity(n)
        op.x[site] = 1
        return op

    @classmethod
    def zz(cls, n: int, i: int, j: int) -> "PauliOperator":
        op = cls.identity(n)
        op.z[i] = 1
        op.z[j] = 1
        return op

    @classmethod
    def from_label(cls, label: str) -> "PauliOperator":
        """Parse e.g. '+XIZ', '-YY', 'ZZ' (sign optional, site 0 first)."""
        sign = 1
        if label and label[0] in "+-":
            sign = 1 if label[0] == "+" else -1
            label = label[1:]
        try:
            bits = [_CHAR_BITS[c] for c in label]
        except KeyError as exc:
            raise ValueError(f"invalid Pauli character in {label!r}") from exc
        if not bits:
            raise ValueError("empty Pauli label")
        x, z = zip(*bits)
        return cls(np.array(x, dtype=np.uint8), np.array(z, dtype=np.uint8), sign)

    @property
    def n_qubits(self) -> int:
        return self.x.shape[0]

    @property
    def sign(self) -> int:
        return -1 if self.sign_bit else 1

    def label(self) -> str:
        chars = "".join(_PAULI_CHARS[(int(a), int(b))] for a, b in zip(self.x, self.z))
        return ("-" if self.sign_bit else "+") + chars

    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())

    def commutes_with(self, other: "PauliOperator") -> bool:
        if other.n_qubits != self.n_qubits:
            raise ValueError("qubit count mismatch")
        overlap = int(np.sum(self.x & other.z)) + int(np.sum(self.z & other.x))
        return overlap % 2 == 0

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        """Operator product; valid only when the ±i factors cancel."""
        if not isinstance(other, PauliOperator):
            return NotImplemented
        if other.n_qubits != self.n_qubits:
            raise ValueError("qubit count mismatch")
        total = int(g_exponent(self.x, self.z, other.x, other.z).sum())
        total += 2 * (self.sign_bit + other.sign_bit)
        if total % 2:
            raise ValueError("product of anticommuting Paulis is not Hermitian")
        out = PauliOperator(self.x ^ other.x, self.z ^ other.z)
        out.sign_bit = (total % 4) // 2
        return out

    def matrix(self) -> np.ndarray:
        """Dense 2^n matrix; site 0 is the most significant tensor factor."""
        m = np.array([[self.sign]], dtype=complex)
        for a, b in zip(self.x, self.z):
            m = np.kron(m, _SITE_MATRICES[(int(a), int(b))])
        return m

    def copy(self) -> "PauliOperator":
        out = PauliOperator(self.x.copy(), self.z.copy())
        out.sign_bit = self.sign_bit
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return (
            self.sign_bit == other.sign_bit
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
        )

    def __repr__(self) -> str:
        return f"PauliOperator({self.label()!r})"


def _interleave(x: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Stack per-site bits into (..., 2n) order (x1, z1, x2, z2, ...)."""
    out = np.empty(x.shape[:-1] + (2 * x.shape[-1],), dtype=np.uint8)
    out[..., 0::2] = x
    out[..., 1::2] = z
    return out


def build_conjugation_tables(image_bits: np.ndarray, image_signs: np.ndarray):
    """Tabulate the conjugation action of many gates on all local Paulis.

    image_bits: (G, 2n, 2n) uint8 — row k is the image of generator k in
    the order X_1, Z_1, ..., X_n, Z_n; columns interleave (x1, z1, ...).
    image_signs: (G, 2n) sign bits.

    Returns (table_bits (G, 4^n, 2n), table_signs (G, 4^n)): entry m is
    the image of the local Pauli whose interleaved bits are the binary
    digits of m. Raises if any product leaves a dangling ±i (a non-
    symplectic image set).
    """
    image_bits = np.asarray(image_bits, dtype=np.uint8)
    image_signs = np.asarray(image_signs, dtype=np.uint8)
    n_gen = image_bits.shape[1]
    n_idx = 1 << n_gen
    exps = ((np.arange(n_idx)[:, None] >> np.arange(n_gen)[None, :]) & 1).astype(np.uint8)

    acc = np.zeros((image_bits.shape[0], n_idx, n_gen), dtype=np.uint8)
    phase = np.zeros((image_bits.shape[0], n_idx), dtype=np.int32)
    for k in range(n_gen):
        use = exps[:, k].astype(bool)
        img = image_bits[:, k, :][:, None, :]
        gk = np.zeros_like(phase)
        for s in range(n_gen // 2):
            gk += g_exponent(
                acc[..., 2 * s], acc[..., 2 * s + 1], img[..., 2 * s], img[..., 2 * s + 1]
            )
        phase[:, use] += gk[:, use]
        phase[:, use] += 2 * image_signs[:, k].astype(np.int32)[:, None]
        acc[:, use, :] ^= img
    # unfolding Y = iXZ on the input side contributes i^(x·z) per site
    unfold = np.zeros(n_idx, dtype=np.int32)
    for s in range(n_gen // 2):
        unfold += (exps[:, 2 * s] & exps[:, 2 * s + 1]).astype(np.int32)
    total = phase + unfold[None, :]
    if np.any(total % 2):
        raise ValueError("non-Hermitian conjugation image; gate images are not symplectic")
    signs = ((total % 4) // 2).astype(np.uint8)
    return acc, signs


def _required_gram(n_gen: int) -> np.ndarray:
    gram = np.zeros((n_gen, n_gen), dtype=np.uint8)
    for s in range(n_gen // 2):
        gram[2 * s, 2 * s + 1] = gram[2 * s + 1, 2 * s] = 1
    return gram


class CliffordGate:
    """Clifford unitary on 1 or 2 qubits, stored as generator images.

    ``table_bits``/``table_signs`` tabulate g P g† for every local Pauli P
    (4 entries for arity 1, 16 for arity 2), indexed by interleaved bits
    m = x1 + 2 z1 + 4 x2 + 8 z2. ``matrix`` carries a concrete unitary
    representative when one is known (enumerated gates always have one).
    """

    __slots__ = ("arity", "image_bits", "image_signs", "table_bits", "table_signs", "matrix")

    def __init__(self, image_bits, image_signs, matrix: np.ndarray | None = None):
        image_bits = np.ascontiguousarray(image_bits, dtype=np.uint8) & 1
        image_signs = np.ascontiguousarray(image_signs, dtype=np.uint8) & 1
        n_gen = image_bits.shape[0]
        if n_gen not in (2, 4) or image_bits.shape != (n_gen, n_gen):
            raise ValueError("expected (2n, 2n) image bits with n in {1, 2}")
        if image_signs.shape != (n_gen,):
            raise ValueError("image_signs shape mismatch")
        x = image_bits[:, 0::2]
        z = image_bits[:, 1::2]
        gram = ((x @ z.T) + (z @ x.T)) % 2
        if not np.array_equal(gram.astype(np.uint8), _required_gram(n_gen)):
            raise ValueError("images do not preserve the commutation structure")
        self.arity = n_gen // 2
        self.image_bits = image_bits
        self.image_signs = image_signs
        tb, ts = build_conjugation_tables(image_bits[None], image_signs[None])
        self.table_bits = tb[0]
        self.table_signs = ts[0]
        self.matrix = matrix

    @property
    def key(self) -> bytes:
        """Canonical identity of the gate modulo global phase."""
        return self.image_bits.tobytes() + self.image_signs.tobytes()

    def conjugate_pauli(self, op: PauliOperator) -> PauliOperator:
        """g op g† for a Pauli on exactly `arity` qubits."""
        if op.n_qubits != self.arity:
            raise ValueError("operator size must match gate arity")
        bits = _interleave(op.x[None, :], op.z[None, :])[0]
        idx = int(bits @ (1 << np.arange(2 * self.arity)))
        out_bits = self.table_bits[idx]
        out = PauliOperator(out_bits[0::2], out_bits[1::2])
        out.sign_bit = op.sign_bit ^ int(self.table_signs[idx])
        return out

    def then(self, other: "CliffordGate") -> "CliffordGate":
        """Gate equal to applying self first, then other."""
        if other.arity != self.arity:
            raise ValueError("arity mismatch")
        weights = 1 << np.arange(2 * self.arity)
        idx = self.image_bits @ weights
        bits = other.table_bits[idx]
        signs = self.image_signs ^ other.table_signs[idx]
        matrix = None
        if self.matrix is not None and other.matrix is not None:
            matrix = other.matrix @ self.matrix
        return CliffordGate(bits, signs, matrix)

    def unitary(self) -> np.ndarray:
        if self.matrix is None:
            raise ValueError("no unitary representative attached to this gate")
        return self.matrix

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CliffordGate):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        imgs = []
        for k in range(2 * self.arity):
            bits = self.image_bits[k]
            p = PauliOperator(bits[0::2], bits[1::2])
            p.sign_bit = int(self.image_signs[k])
            imgs.append(p.label())
        return f"CliffordGate({', '.join(imgs)})"


def _gate(images: list[str], matrix: np.ndarray | None = None) -> CliffordGate:
    ops = [PauliOperator.from_label(s) for s in images]
    n_gen = len(ops)
    bits = np.zeros((n_gen, n_gen), dtype=np.uint8)
    signs = np.zeros(n_gen, dtype=np.uint8)
    for k, op in enumerate(ops):
        bits[k] = _interleave(op.x[None], op.z[None])[0]
        signs[k] = op.sign_bit
    return CliffordGate(bits, signs, matrix)


_SQRT2 = np.sqrt(2.0)


def identity_gate(arity: int = 2) -> CliffordGate:
    if arity == 1:
        return _gate(["X", "Z"], _I2.copy())
    return _gate(["XI", "ZI", "IX", "IZ"], np.eye(4, dtype=complex))


def hadamard() -> CliffordGate:
    return _gate(["Z", "X"], np.array([[1, 1], [1, -1]], dtype=complex) / _SQRT2)


def phase_gate() -> CliffordGate:
    """The S = sqrt(Z) gate: X -> Y, Z -> Z."""
    return _gate(["Y", "Z"], np.array([[1, 0], [0, 1j]], dtype=complex))


def pauli_x_gate() -> CliffordGate:
    return _gate(["X", "-Z"], _MX.copy())


def pauli_z_gate() -> CliffordGate:
    return _gate(["-X", "Z"], _MZ.copy())


def cnot_ctrl_first() -> CliffordGate:
    """CNOT with control on the first site of the pair."""
    m = np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    )
    return _gate(["XX", "ZI", "IX", "ZZ"], m)


def cnot_ctrl_second() -> CliffordGate:
    """CNOT with control on the second site of the pair."""
    m = np.array(
        [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
    )
    return _gate(["XI", "ZZ", "XX", "IZ"], m)


def embed_one_qubit(g: CliffordGate, site: int) -> CliffordGate:
    """Lift a 1-qubit gate onto one site of a 2-qubit gate (other site idle)."""
    if g.arity != 1:
        raise ValueError("expected a 1-qubit gate")
    if site not in (0, 1):
        raise ValueError("site must be 0 or 1")
    bits = np.zeros((4, 4), dtype=np.uint8)
    signs = np.zeros(4, dtype=np.uint8)
    o = 2 * site
    for k in range(2):
        bits[o + k, o : o + 2] = g.image_bits[k]
        signs[o + k] = g.image_signs[k]
    other = 2 * (1 - site)
    bits[other, other] = 1
    bits[other + 1, other + 1] = 1
    matrix = None
    if g.matrix is not None:
        matrix = np.kron(g.matrix, _I2) if site == 0 else np.kron(_I2, g.matrix)
    return CliffordGate(bits, signs, matrix)
