"""Dense linear algebra over n-qubit registers.

Conventions
-----------
Qubit 0 is the most significant bit of the amplitude index, so for two
qubits ``|q0 q1>`` has index ``2*q0 + q1`` and an operator acting on qubit 1
alone is ``I (x) O``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_RTOL = 1e-10
IMAG_TOL = 1e-10
ZERO_NORM = 1e-14

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI_MATRICES = {"I": I2, "X": X, "Y": Y, "Z": Z}


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.flags.writeable = False
    return a


def _n_qubits_for(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if n < 0 or 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


@dataclass(frozen=True, eq=False)
class StateVector:
    """Immutable complex amplitude vector of an n-qubit register."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes)
        if amps.ndim != 1:
            raise ValueError("amplitudes must be a 1-d array")
        _n_qubits_for(amps.shape[0])
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def n_qubits(self) -> int:
        return _n_qubits_for(self.amplitudes.shape[0])

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)

    def __len__(self):
        return self.dim

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits}, norm={self.norm():.6g})"

    @classmethod
    def basis(cls, bits: str | Sequence[int]) -> "StateVector":
        """Computational basis state, e.g. ``StateVector.basis("011")``."""
        bits = [int(b) for b in bits]
        idx = 0
        for b in bits:
            idx = (idx << 1) | b
        amps = np.zeros(1 << len(bits), dtype=complex)
        amps[idx] = 1.0
        return cls(amps)

    @classmethod
    def product(cls, single_qubit_states: Iterable[Sequence[complex]]) -> "StateVector":
        amps = np.ones(1, dtype=complex)
        for s in single_qubit_states:
            amps = np.kron(amps, np.asarray(s, dtype=complex))
        return normalize(amps)

    @classmethod
    def all_zero(cls, n: int) -> "StateVector":
        return cls.basis([0] * n)

    @classmethod
    def all_plus(cls, n: int) -> "StateVector":
        return cls(np.full(1 << n, 2.0 ** (-n / 2), dtype=complex))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "StateVector":
        """Haar-random state."""
        v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        return normalize(v)


@dataclass(frozen=True, eq=False)
class DenseOperator:
    """Immutable square operator on an n-qubit register.

    ``hermitian=True`` is only accepted when the entries pass the
    Hermiticity check.
    """

    entries: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        m = np.asarray(self.entries)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("operator must be a square matrix")
        _n_qubits_for(m.shape[0])
        object.__setattr__(self, "entries", _frozen(m))
        if self.hermitian and not is_hermitian(self.entries):
            raise ValueError("entries are not Hermitian within tolerance")

    @property
    def n_qubits(self) -> int:
        return _n_qubits_for(self.entries.shape[0])

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __matmul__(self, other):
        if isinstance(other, StateVector):
            return self.entries @ other.amplitudes
        return self.entries @ np.asarray(other)

    def __add__(self, other: "DenseOperator") -> "DenseOperator":
        return DenseOperator(self.entries + np.asarray(other),
                             hermitian=self.hermitian and getattr(other, "hermitian", False))

    def __sub__(self, other: "DenseOperator") -> "DenseOperator":
        return DenseOperator(self.entries - np.asarray(other),
                             hermitian=self.hermitian and getattr(other, "hermitian", False))

    def __mul__(self, scalar) -> "DenseOperator":
        herm = self.hermitian and np.isreal(scalar)
        return DenseOperator(self.entries * scalar, hermitian=bool(herm))

    __rmul__ = __mul__

    def __repr__(self):
        return f"DenseOperator(n_qubits={self.n_qubits}, hermitian={self.hermitian})"

    @classmethod
    def identity(cls, n: int) -> "DenseOperator":
        return cls(np.eye(1 << n, dtype=complex), hermitian=True)


def as_array(obj) -> np.ndarray:
    return np.asarray(obj, dtype=complex)


def is_hermitian(m, rtol: float = HERMITIAN_RTOL) -> bool:
    m = as_array(m)
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    return float(np.max(np.abs(m - m.conj().T), initial=0.0)) <= rtol * scale


def _require_hermitian(m: np.ndarray, what: str = "operator") -> None:
    if not is_hermitian(m):
        raise ValueError(f"{what} is not Hermitian within tolerance")


# ----------------------------------------------------------------------------
# Pauli strings
# ----------------------------------------------------------------------------

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}


def _popcount(a):
    return np.bitwise_count(np.asarray(a, dtype=np.int64)).astype(np.int64)


@dataclass(frozen=True, order=True)
class PauliString:
    """Tensor product of I, X, Y, Z letters stored as two bitmasks.

    Bit ``n_qubits - 1 - q`` of ``x`` (``z``) is set when qubit ``q`` carries
    an X-type (Z-type) factor; Y sets both.  This matches the amplitude
    index layout, so masks can be applied to indices directly.
    """

    n_qubits: int
    x: int
    z: int

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        x = z = 0
        for ch in label.upper():
            bx, bz = _LETTER_BITS[ch]
            x = (x << 1) | bx
            z = (z << 1) | bz
        return cls(len(label), x, z)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, 0, 0)

    @property
    def label(self) -> str:
        out = []
        for q in range(self.n_qubits):
            bit = self.n_qubits - 1 - q
            out.append(_BITS_LETTER[((self.x >> bit) & 1, (self.z >> bit) & 1)])
        return "".join(out)

    @property
    def weight(self) -> int:
        return int(bin(self.x | self.z).count("1"))

    @property
    def support(self) -> tuple[int, ...]:
        m = self.x | self.z
        return tuple(q for q in range(self.n_qubits) if (m >> (self.n_qubits - 1 - q)) & 1)

    def __str__(self):
        return self.label

    def __matmul__(self, other: "PauliString") -> tuple[complex, "PauliString"]:
        """Product ``self * other`` as ``(phase, string)``."""
        if self.n_qubits != other.n_qubits:
            raise ValueError("register size mismatch")
        # P = i^{|x&z|} X^x Z^z, and Z^z1 X^x2 = (-1)^{|z1&x2|} X^x2 Z^z1
        k = (bin(self.x & self.z).count("1") + bin(other.x & other.z).count("1")
             + 2 * bin(self.z & other.x).count("1"))
        x, z = self.x ^ other.x, self.z ^ other.z
        k -= bin(x & z).count("1")
        return 1j ** (k % 4), PauliString(self.n_qubits, x, z)

    def to_dense(self) -> np.ndarray:
        m = np.ones((1, 1), dtype=complex)
        for ch in self.label:
            m = np.kron(m, PAULI_MATRICES[ch])
        return m

    def apply(self, psi) -> np.ndarray:
        """Return ``P @ psi`` without building the dense matrix."""
        psi = as_array(psi)
        idx = np.arange(psi.shape[0], dtype=np.int64)
        src = idx ^ self.x
        y = bin(self.x & self.z).count("1")
        sign = 1 - 2 * (_popcount(src & self.z) & 1)
        return (1j ** (y % 4)) * sign * psi[src]

    def embed(self, support: Sequence[int], n_total: int) -> "PauliString":
        """Place this string (on ``len(support)`` qubits) into a larger register."""
        if len(support) != self.n_qubits:
            raise ValueError("support length must equal the string length")
        x = z = 0
        for j, q in enumerate(support):
            if not 0 <= q < n_total:
                raise ValueError(f"qubit index {q} out of range")
            bit_src = self.n_qubits - 1 - j
            bit_dst = n_total - 1 - q
            x |= ((self.x >> bit_src) & 1) << bit_dst
            z |= ((self.z >> bit_src) & 1) << bit_dst
        return PauliString(n_total, x, z)


def pauli_basis(n: int, include_identity: bool = False) -> list[PauliString]:
    """All 4^n strings on n qubits in a fixed order (identity first if kept)."""
    out = [PauliString(n, x, z) for x in range(1 << n) for z in range(1 << n)]
    if not include_identity:
        out = out[1:]
    return out


def pauli_sum_matrix(coefficients, n: int) -> np.ndarray:
    """Dense ``sum_i c_i P_i`` over ``pauli_basis(n, include_identity=True)``.

    Uses ``P|k> = i^{|x&z|} (-1)^{|z&k|} |k^x>``, so for each ``x`` the column
    weights are a signed transform of the ``z`` coefficients.
    """
    dim = 1 << n
    c = np.asarray(coefficients)
    if c.shape != (dim * dim,):
        raise ValueError(f"need 4^{n} coefficients")
    c = c.reshape(dim, dim)  # [x, z]
    idx = np.arange(dim, dtype=np.int64)
    phase = np.array([1, 1j, -1, -1j])[_popcount(idx[:, None] & idx[None, :]) % 4]
    sign = 1 - 2 * (_popcount(idx[:, None] & idx[None, :]) & 1)  # [z, k]
    w = (c * phase) @ sign  # [x, k]
    m = np.zeros((dim, dim), dtype=complex)
    m[idx[None, :] ^ idx[:, None], np.broadcast_to(idx, (dim, dim))] = w
    return m


# ----------------------------------------------------------------------------
# Operations
# ----------------------------------------------------------------------------

def _check_support(support: Sequence[int], n_total: int) -> list[int]:
    support = [int(q) for q in support]
    if len(set(support)) != len(support):
        raise ValueError(f"duplicate qubit indices in support {support}")
    for q in support:
        if not 0 <= q < n_total:
            raise ValueError(f"qubit index {q} out of range for {n_total} qubits")
    return support


def embed_operator(block, support: Sequence[int], n_total: int) -> DenseOperator:
    """Embed an m-qubit ``block`` acting on ``support`` into ``n_total`` qubits.

    ``support[j]`` is the register qubit that the block's j-th tensor factor
    acts on; the result is identity on all other qubits.
    """
    b = as_array(block)
    m = _n_qubits_for(b.shape[0])
    support = _check_support(support, n_total)
    if len(support) != m:
        raise ValueError(f"block acts on {m} qubits but support has {len(support)}")
    rest = [q for q in range(n_total) if q not in support]
    full = np.kron(b, np.eye(1 << len(rest), dtype=complex))
    order = support + rest
    if order != list(range(n_total)):
        t = full.reshape((2,) * (2 * n_total))
        pos = [order.index(q) for q in range(n_total)]
        t = t.transpose(pos + [n_total + p for p in pos])
        full = t.reshape(1 << n_total, 1 << n_total)
    herm = getattr(block, "hermitian", False) or is_hermitian(b)
    return DenseOperator(full, hermitian=bool(herm))


def apply_local(block, support: Sequence[int], psi) -> np.ndarray:
    """``embed_operator(block, support, n) @ psi`` via tensor contraction."""
    psi = as_array(psi)
    n = _n_qubits_for(psi.shape[0])
    support = _check_support(support, n)
    b = as_array(block)
    m = len(support)
    t = psi.reshape((2,) * n)
    bt = b.reshape((2,) * (2 * m))
    out = np.tensordot(bt, t, axes=(list(range(m, 2 * m)), support))
    # contracted axes come out first, in support order
    rest = [q for q in range(n) if q not in support]
    current = support + rest
    out = out.transpose([current.index(q) for q in range(n)])
    return out.reshape(-1)


def herm_exp(H, scale: complex) -> DenseOperator:
    """``exp(scale * H)`` for Hermitian ``H`` via eigendecomposition."""
    h = as_array(H)
    _require_hermitian(h, "H")
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    out = (v * np.exp(scale * w)) @ v.conj().T
    herm = np.isreal(scale)
    return DenseOperator(out, hermitian=bool(herm))


def expectation(state, O) -> float:
    psi = as_array(state)
    o = as_array(O)
    if o.shape != (psi.shape[0], psi.shape[0]):
        raise ValueError(f"dimension mismatch: state {psi.shape[0]}, operator {o.shape}")
    val = np.vdot(psi, o @ psi)
    if abs(val.imag) > IMAG_TOL * max(1.0, abs(val.real)):
        raise ValueError(f"expectation has imaginary part {val.imag:.3e}; operator not Hermitian?")
    return float(val.real)


def overlap_fidelity(a, b) -> float:
    """``|<a|b>|`` for unit vectors (phase invariant)."""
    a, b = as_array(a), as_array(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(min(abs(np.vdot(a, b)), 1.0))


def normalize(state) -> StateVector:
    psi = as_array(state)
    nrm = np.linalg.norm(psi)
    if not np.isfinite(nrm) or nrm < ZERO_NORM:
        raise ValueError(f"cannot normalize vector of norm {nrm:.3e}")
    return StateVector(psi / nrm)


def commutator(a, b) -> np.ndarray:
    a, b = as_array(a), as_array(b)
    return a @ b - b @ a
