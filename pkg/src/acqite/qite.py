"""QITE: unitary reconstruction of normalized imaginary-time steps.

For each Hamiltonian piece ``h_k`` a Hermitian generator ``A`` supported on a
window of ``D`` qubits is fitted so that ``exp(-i dtau A) psi`` reproduces the
normalized ``exp(-dtau h_k) psi``. The fit minimizes

    || Delta_0 + i A psi ||^2,   A = sum_I a_I sigma_I  (a_I real),

with ``Delta_0 = (c^{-1/2} exp(-dtau h_k) psi - psi) / dtau``. Writing
``v_I = sigma_I psi`` the normal equations are

    S a = b,   S_IJ = Re <v_I|v_J>,   b_I = -Im <v_I|Delta_0>,

solved with a Tikhonov shift ``eps = 1e-8 tr(S) / 4^D``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .hamiltonian import LocalTerm, assemble
from .statespace import (DenseOperator, PauliString, StateVector, apply_local, as_array,
                         embed_operator, expectation, herm_exp, normalize, pauli_basis,
                         pauli_sum_matrix,
                         _n_qubits_for, _popcount)

MAX_DOMAIN = 6
TIKHONOV = 1e-8
_I_POWERS = np.array([1, 1j, -1, -1j])


@dataclass(frozen=True, eq=False)
class QiteGenerator:
    """Pauli-basis coefficients of one fitted generator.

    ``coefficients[i]`` multiplies ``pauli_basis(D, include_identity=True)[i]``
    acting on ``domain`` (the identity entry is always zero).
    """

    n_qubits: int
    domain: tuple[int, ...]
    coefficients: np.ndarray
    residual: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(int(q) for q in self.domain))
        c = np.array(self.coefficients, dtype=float)
        if c.shape != (4 ** len(self.domain),):
            raise ValueError("need 4^D coefficients")
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite generator coefficients")
        c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)

    @property
    def D(self) -> int:
        return len(self.domain)

    def local_matrix(self) -> np.ndarray:
        return pauli_sum_matrix(self.coefficients, self.D)

    def dense(self) -> DenseOperator:
        return embed_operator(DenseOperator(self.local_matrix(), hermitian=True),
                              self.domain, self.n_qubits)

    def terms(self, prune: float = 0.0) -> list[tuple[PauliString, float]]:
        """Non-negligible ``(register-wide string, coefficient)`` pairs."""
        out = []
        for a, p in zip(self.coefficients, pauli_basis(self.D, include_identity=True)):
            if abs(a) > prune and (p.x or p.z):
                out.append((p.embed(self.domain, self.n_qubits), float(a)))
        return out

    def apply_unitary(self, psi, t: float) -> np.ndarray:
        """``exp(-i t A) psi`` using the small local exponential."""
        U = herm_exp(self.local_matrix(), -1j * t).entries
        return apply_local(U, self.domain, psi)

    def to_dict(self) -> dict:
        return {"n_qubits": self.n_qubits, "domain": list(self.domain),
                "coefficients": [float(a) for a in self.coefficients],
                "residual": float(self.residual)}

    @classmethod
    def from_dict(cls, d: dict) -> "QiteGenerator":
        return cls(int(d["n_qubits"]), tuple(d["domain"]), np.asarray(d["coefficients"]),
                   float(d.get("residual", 0.0)))

    @classmethod
    def zero(cls, n_qubits: int, domain: Sequence[int]) -> "QiteGenerator":
        return cls(n_qubits, tuple(domain), np.zeros(4 ** len(domain)))


def domain_window(support: Sequence[int], D: int, n: int, periodic: bool = False) -> tuple[int, ...]:
    """Window of ``D`` consecutive qubits centred on ``support``.

    Open chains clip the window at the edges; periodic chains wrap. ``D >= n``
    gives the whole register.
    """
    support = list(support)
    m = len(support)
    if D < m:
        raise ValueError(f"domain size D={D} is smaller than the term support {support}")
    if D >= n:
        return tuple(range(n))
    left = support[0] - (D - m) // 2
    if periodic:
        return tuple((left + j) % n for j in range(D))
    left = min(max(left, 0), n - D)
    return tuple(range(left, left + D))


def build_target(term: LocalTerm, psi, dtau: float) -> np.ndarray:
    """``Delta_0 = (c^{-1/2} exp(-dtau h) psi - psi) / dtau`` on the full register."""
    if dtau <= 0:
        raise ValueError("dtau must be positive")
    psi = as_array(psi)
    E = herm_exp(term.block.entries, -dtau).entries
    phi = apply_local(E, term.support, psi)
    c = np.vdot(phi, phi).real  # = <psi|exp(-2 dtau h)|psi>
    if not c > 0 or not np.isfinite(c):
        raise FloatingPointError(f"normalization c={c} is not positive; dtau too large?")
    return (phi / np.sqrt(c) - psi) / dtau


def pauli_images(strings: Sequence[PauliString], psi) -> np.ndarray:
    """Columns ``sigma_I psi`` for all strings at once (dim x M)."""
    psi = as_array(psi)
    xs = np.array([p.x for p in strings], dtype=np.int64)
    zs = np.array([p.z for p in strings], dtype=np.int64)
    idx = np.arange(psi.shape[0], dtype=np.int64)
    src = idx[None, :] ^ xs[:, None]
    sign = 1 - 2 * (_popcount(src & zs[:, None]) & 1)
    phase = _I_POWERS[_popcount(xs & zs) % 4]
    return (phase[:, None] * sign * psi[src]).T


def fit_generator(images: np.ndarray, target: np.ndarray, eps_scale: float = TIKHONOV,
                  basis_size: int | None = None) -> tuple[np.ndarray, float]:
    """Tikhonov-regularized real least squares for ``min ||target + i V a||``.

    Returns ``(a, residual)``. When there are more unknowns than real
    equations the equivalent dual system is solved instead.
    """
    dim, M = images.shape
    B = np.vstack([-images.imag, images.real])  # realified i V
    y = -np.concatenate([target.real, target.imag])
    trace = float(np.sum(B * B))
    eps = eps_scale * trace / (basis_size or (M + 1))
    if M <= 2 * dim:
        S = B.T @ B
        b = B.T @ y
        a = np.linalg.solve(S + eps * np.eye(M), b)
    else:
        G = B @ B.T
        a = B.T @ np.linalg.solve(G + eps * np.eye(2 * dim), y)
    residual = float(np.linalg.norm(B @ a - y))
    return a, residual


def solve_generator(term: LocalTerm, psi, dtau: float, domain: Sequence[int],
                    eps_scale: float = TIKHONOV) -> QiteGenerator:
    psi = as_array(psi)
    n = _n_qubits_for(psi.shape[0])
    domain = tuple(int(q) for q in domain)
    if not set(term.support) <= set(domain):
        raise ValueError(f"domain {domain} does not contain term support {term.support}")
    if len(domain) > MAX_DOMAIN and len(domain) < n:
        raise ValueError(f"domain size {len(domain)} exceeds budget {MAX_DOMAIN}")
    D = len(domain)
    if len(domain) != len(set(domain)):
        raise ValueError("duplicate qubits in domain")
    local = pauli_basis(D, include_identity=False)
    strings = [p.embed(domain, n) for p in local]
    target = build_target(term, psi, dtau)
    V = pauli_images(strings, psi)
    a, res = fit_generator(V, target, eps_scale, basis_size=4 ** D)
    coeffs = np.concatenate([[0.0], a])
    return QiteGenerator(n, domain, coeffs, res)


class QiteSweep(NamedTuple):
    psi_next: StateVector
    generators: list
    energy_next: float


def ordered_terms(terms: Sequence[LocalTerm]) -> list[LocalTerm]:
    """Sweep order: ascending leftmost support qubit (wrap bond last)."""
    return sorted(terms, key=lambda t: t.support[0])


def qite_sweep(terms: Sequence[LocalTerm], psi, dtau: float, D: int, *, H=None,
               periodic: bool = False, sequential: bool = False,
               eps_scale: float = TIKHONOV) -> QiteSweep:
    """One QITE time step: fit a generator per term, apply their product.

    By default every generator is fitted against the incoming state, as in
    ``exp(-i dtau A_k) psi_n ~ exp(-dtau h_k) psi_n / norm``; with
    ``sequential=True`` each fit sees the state left by the previous factors.
    Factors are applied in :func:`ordered_terms` order.
    """
    psi = normalize(psi).amplitudes
    n = _n_qubits_for(psi.shape[0])
    H = assemble(list(terms), n) if H is None else as_array(H)
    terms = ordered_terms(terms)
    domains = [domain_window(t.support, D, n, periodic) for t in terms]
    if dtau == 0:
        gens = [QiteGenerator.zero(n, d) for d in domains]
        return QiteSweep(StateVector(psi), gens, expectation(psi, H))
    gens = []
    if sequential:
        cur = psi
        for t, d in zip(terms, domains):
            g = solve_generator(t, cur, dtau, d, eps_scale)
            gens.append(g)
            cur = g.apply_unitary(cur, dtau)
    else:
        gens = [solve_generator(t, psi, dtau, d, eps_scale) for t, d in zip(terms, domains)]
        cur = psi
        for g in gens:
            cur = g.apply_unitary(cur, dtau)
    out = normalize(cur)  # removes rounding drift only
    return QiteSweep(out, gens, expectation(out, H))


def sum_generators(generators: Sequence[QiteGenerator]) -> DenseOperator:
    """Register-wide ``sum_k A_k``."""
    if not generators:
        raise ValueError("no generators")
    n = generators[0].n_qubits
    total = np.zeros((1 << n, 1 << n), dtype=complex)
    for g in generators:
        if g.n_qubits != n:
            raise ValueError("generators act on different register sizes")
        total += g.dense().entries
    return DenseOperator(total, hermitian=True)
