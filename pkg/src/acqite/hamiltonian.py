"""Transverse-field Ising chains, their local decomposition, exact spectra."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .statespace import (DenseOperator, StateVector, X, Z, I2, apply_local,
                         embed_operator, is_hermitian)

MAX_EXACT_QUBITS = 14
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class LocalTerm:
    """One Hamiltonian piece acting on a few neighbouring qubits.

    On periodic chains the wrap-around bond has support ``(n-1, 0)``, which
    is contiguous modulo ``n``.
    """

    support: tuple[int, ...]
    block: DenseOperator

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(int(q) for q in self.support))
        if not isinstance(self.block, DenseOperator):
            object.__setattr__(self, "block", DenseOperator(self.block, hermitian=True))
        if self.block.n_qubits != len(self.support):
            raise ValueError("block size does not match support")
        if not is_hermitian(self.block.entries):
            raise ValueError("local term must be Hermitian")

    @property
    def size(self) -> int:
        return len(self.support)

    def embedded(self, n_total: int) -> DenseOperator:
        return embed_operator(self.block, self.support, n_total)

    def apply(self, psi) -> np.ndarray:
        return apply_local(self.block.entries, self.support, psi)


@dataclass(frozen=True)
class SpinChainModel:
    """TFIM ``H = J sum_j Z_j Z_{j+1} + h sum_j X_j``."""

    n_qubits: int
    J: float
    h: float
    boundary: str = "open"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"boundary must be 'open' or 'periodic', got {self.boundary!r}")

    @property
    def bonds(self) -> list[tuple[int, int]]:
        n = self.n_qubits
        if n == 1:
            return []
        bonds = [(j, j + 1) for j in range(n - 1)]
        if self.boundary == "periodic":
            bonds.append((n - 1, 0))
        return bonds

    def dense(self) -> DenseOperator:
        """Full Hamiltonian as a dense operator (cached)."""
        if "H" not in self._cache:
            n = self.n_qubits
            dim = 1 << n
            # diagonal ZZ part from bit parities, X part from single flips
            idx = np.arange(dim)
            bits = (idx[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1
            spins = 1 - 2 * bits
            diag = np.zeros(dim)
            for a, b in self.bonds:
                diag += self.J * spins[:, a] * spins[:, b]
            H = np.diag(diag).astype(complex)
            for q in range(n):
                H[idx, idx ^ (1 << (n - 1 - q))] += self.h
            self._cache["H"] = DenseOperator(H, hermitian=True)
        return self._cache["H"]

    def to_dict(self) -> dict:
        return {"n": self.n_qubits, "J": self.J, "h": self.h, "boundary": self.boundary}

    @classmethod
    def from_dict(cls, d: dict) -> "SpinChainModel":
        return build_tfim(int(d["n"]), float(d["J"]), float(d["h"]), d.get("boundary", "open"))


def build_tfim(n: int, J: float, h: float, boundary: str = "open") -> SpinChainModel:
    if n < 1:
        raise ValueError(f"need at least one qubit, got n={n}")
    return SpinChainModel(int(n), float(J), float(h), boundary)


def decompose_local(model: SpinChainModel, T: int = 2) -> list[LocalTerm]:
    """Split the model into terms acting on at most ``T`` neighbouring qubits.

    Grouping: one two-qubit term per bond holding ``J Z Z`` plus a share of
    the field on both ends. Each site's field ``h`` is divided evenly among
    the bonds touching it (``h/2`` per bond in the bulk, the full ``h`` on an
    open-chain edge). With ``n = 1``, or ``J = 0`` and ``T = 1``, the terms are
    single-site ``h X`` blocks. Terms are ordered by leftmost support qubit,
    the wrap bond last.
    """
    n = model.n_qubits
    bonds = model.bonds
    if T < 1:
        raise ValueError("T must be >= 1")
    if not bonds or (T == 1 and model.J == 0):
        return [LocalTerm((q,), DenseOperator(model.h * X, hermitian=True)) for q in range(n)]
    if T < 2:
        raise ValueError(f"T={T} is smaller than the interaction range 2 of the ZZ couplings")
    degree = np.zeros(n, dtype=int)
    for a, b in bonds:
        degree[a] += 1
        degree[b] += 1
    zz = np.kron(Z, Z)
    terms = []
    for a, b in bonds:
        block = (model.J * zz
                 + (model.h / degree[a]) * np.kron(X, I2)
                 + (model.h / degree[b]) * np.kron(I2, X))
        terms.append(LocalTerm((a, b), DenseOperator(block, hermitian=True)))
    return terms


def assemble(terms: list[LocalTerm], n: int) -> np.ndarray:
    H = np.zeros((1 << n, 1 << n), dtype=complex)
    for t in terms:
        H += t.embedded(n).entries
    return H


class Spectrum(NamedTuple):
    eigenvalues: np.ndarray
    ground_state: StateVector
    gap: float
    ground_space: np.ndarray  # columns span the (possibly degenerate) ground space

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    def ground_fidelity(self, psi) -> float:
        """``sqrt(<psi|P0|psi>)``; equals ``|<E0|psi>|`` when non-degenerate."""
        amps = np.asarray(psi, dtype=complex)
        w = self.ground_space.conj().T @ amps
        return float(min(np.sqrt(np.vdot(w, w).real), 1.0))


def exact_spectrum(model_or_H) -> Spectrum:
    """Full diagonalization; accepts a model or a dense Hermitian operator."""
    if isinstance(model_or_H, SpinChainModel):
        if model_or_H.n_qubits > MAX_EXACT_QUBITS:
            raise ValueError(f"n={model_or_H.n_qubits} exceeds dense budget of {MAX_EXACT_QUBITS}")
        cache = model_or_H._cache
        if "spectrum" in cache:
            return cache["spectrum"]
        H = model_or_H.dense().entries
    else:
        cache = None
        H = np.asarray(model_or_H, dtype=complex)
        if H.shape[0] > 1 << MAX_EXACT_QUBITS:
            raise ValueError("operator exceeds dense diagonalization budget")
    if np.all(H.imag == 0):
        w, v = np.linalg.eigh(H.real)
        v = v.astype(complex)
    else:
        w, v = np.linalg.eigh(H)
    scale = max(1.0, float(np.max(np.abs(w))))
    deg = int(np.sum(w - w[0] <= DEGENERACY_TOL * scale))
    gap = float(w[1] - w[0]) if len(w) > 1 else 0.0
    if deg > 1:
        gap = 0.0
    spec = Spectrum(w, StateVector(v[:, 0]), max(gap, 0.0), v[:, :deg])
    if cache is not None:
        cache["spectrum"] = spec
    return spec
