"""Adaptive Compressed QITE.

Each outer iteration runs one QITE sweep, sums the fitted generators into a
single Hermitian ``A_n`` and moves along ``V_n(t) = exp(-i t A_n)`` for as long
as the energy keeps dropping. A new sweep is only requested once that
direction is exhausted; the run ends when a fresh sweep no longer lowers the
energy.

Derivative convention: for ``E(s) = <psi| e^{isA} H e^{-isA} |psi>``

    E'(0)  =  <psi| i[A, H] |psi>,
    E''(0) = -<psi| [A, [A, H]] |psi>.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .evolution import double_bracket_generator
from .hamiltonian import LocalTerm, SpinChainModel, decompose_local
from .qite import QiteGenerator, qite_sweep, sum_generators
from .statespace import (DenseOperator, StateVector, _require_hermitian, as_array,
                         expectation, herm_exp, normalize)

DEGENERATE_CURVATURE = 1e-12
MAX_LINE_SEARCH = 10_000
POWER_ITERATION_QUBITS = 10


@dataclass(frozen=True)
class StepPolicy:
    """How far to move along each compressed direction.

    ``fixed``             one step of length ``dtau``
    ``grid_line_search``  increments of ``dtau`` until the energy rises
    ``newton``            ``-E'/|E''|`` from the energy derivatives
    ``variance_bound``    ``V / (4 ||H|| <H^2>)``
    """

    kind: str = "grid_line_search"
    dtau: float = 0.1
    refine: bool = False
    newton_iters: int = 1
    max_backtracks: int = 30

    KINDS = ("fixed", "grid_line_search", "newton", "variance_bound")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown step policy {self.kind!r}; choose from {self.KINDS}")
        if not self.dtau > 0:
            raise ValueError("policy dtau must be positive")

    @classmethod
    def parse(cls, kind: str, dtau: float) -> "StepPolicy":
        return cls(kind=kind, dtau=dtau)


@dataclass(frozen=True, eq=False)
class AcqRecord:
    step: int
    generator: DenseOperator
    t: float
    energy: float
    qite_calls: int
    state: StateVector = field(repr=False)
    generators: tuple = field(default=(), repr=False)
    l_r: int = 0


class AcqTrace(list):
    """Accepted records plus the total number of QITE sweeps performed."""

    qite_calls: int = 0


class CompressedUnitary:
    """``V(t) = exp(-i t A)`` with ``A`` diagonalized once."""

    def __init__(self, A):
        a = as_array(A)
        _require_hermitian(a, "compressed generator")
        self.A = a
        self.w, self.v = np.linalg.eigh(0.5 * (a + a.conj().T))

    @classmethod
    def from_generators(cls, generators: Sequence[QiteGenerator]) -> "CompressedUnitary":
        return cls(sum_generators(generators).entries)

    def matrix(self, t: float) -> np.ndarray:
        return (self.v * np.exp(-1j * t * self.w)) @ self.v.conj().T

    def apply(self, psi, t: float) -> np.ndarray:
        c = self.v.conj().T @ as_array(psi)
        return self.v @ (np.exp(-1j * t * self.w) * c)


def compressed_unitary(generators: Sequence[QiteGenerator], t: float) -> DenseOperator:
    """``exp(-i t sum_k A_k)`` on the full register."""
    return DenseOperator(CompressedUnitary.from_generators(generators).matrix(t))


def product_unitary(generators: Sequence[QiteGenerator], t: float) -> np.ndarray:
    """``prod_k exp(-i t A_k)`` (first generator applied first)."""
    n = generators[0].n_qubits
    U = np.eye(1 << n, dtype=complex)
    for g in generators:
        U = herm_exp(g.dense().entries, -1j * t).entries @ U
    return U


def energy_derivatives(A, H, psi) -> tuple[float, float]:
    a, h = as_array(A), as_array(H)
    _require_hermitian(a, "A")
    _require_hermitian(h, "H")
    psi = as_array(psi)
    ah = a @ h - h @ a
    e1 = np.vdot(psi, 1j * (ah @ psi))
    aah = a @ ah - ah @ a
    e2 = -np.vdot(psi, aah @ psi)
    return float(e1.real), float(e2.real)


def newton_step(E1: float, E2: float, default: float = 0.0) -> float:
    """Minimizer of the local quadratic; ``-E1/|E2|`` if concave."""
    if abs(E2) < DEGENERATE_CURVATURE:
        return float(default)
    return -E1 / abs(E2)


def spectral_norm(H, power_iteration: bool | None = None, tol: float = 1e-12,
                  max_iter: int = 10_000, seed: int = 0) -> float:
    h = as_array(H)
    n = h.shape[0].bit_length() - 1
    if power_iteration is None:
        power_iteration = n > POWER_ITERATION_QUBITS
    if not power_iteration:
        return float(np.max(np.abs(np.linalg.eigvalsh(0.5 * (h + h.conj().T)))))
    # power iteration on H^2 converges to the largest |eigenvalue|^2
    rng = np.random.default_rng(seed)
    x = rng.normal(size=h.shape[0]) + 1j * rng.normal(size=h.shape[0])
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(max_iter):
        y = h @ (h @ x)
        new = float(np.linalg.norm(y))
        if new == 0.0:
            return 0.0
        x = y / new
        if abs(new - lam) <= tol * new:
            lam = new
            break
        lam = new
    return math.sqrt(lam)


def variance_bound_step(H, psi, norm: float | None = None) -> float:
    """``V / (4 ||H|| <H^2>)``."""
    h = as_array(H)
    psi = as_array(psi)
    hp = h @ psi
    h2 = float(np.vdot(hp, hp).real)
    if np.max(np.abs(h)) == 0.0:
        raise ValueError("variance bound undefined for the zero operator")
    E = float(np.vdot(psi, hp).real)
    V = max(h2 - E * E, 0.0)
    if V == 0.0:
        return 0.0
    norm = spectral_norm(h) if norm is None else norm
    return V / (4.0 * norm * h2)


class LineSearch(NamedTuple):
    l_r: int
    t: float
    psi_next: StateVector
    energy: float
    probes: int


def _energy(H, psi) -> float:
    return float(np.vdot(psi, H @ psi).real)


def line_search_stop(generators, psi, dtau: float, H, refine: bool = False,
                     max_steps: int = MAX_LINE_SEARCH) -> LineSearch:
    """Walk ``t = dtau, 2 dtau, ...`` along ``V(t)`` until the energy rises.

    Returns the last grid point before the first increase. If the very first
    probe already raises the energy, ``l_r = 0`` and the input state is
    returned unchanged. With ``refine`` the bracket around the last accepted
    point is polished by bounded Brent/golden search to 1e-6 in ``t``.
    ``generators`` may be a list of QITE generators or a ready
    :class:`CompressedUnitary`.
    """
    if dtau <= 0:
        raise ValueError("dtau must be positive")
    V = generators if isinstance(generators, CompressedUnitary) else \
        CompressedUnitary.from_generators(generators)
    h = as_array(H)
    psi = as_array(psi)
    E_prev = _energy(h, psi)
    l_r = 0
    best = psi
    probes = 0
    while l_r < max_steps:
        cand = V.apply(psi, (l_r + 1) * dtau)
        probes += 1
        E = _energy(h, cand)
        if E > E_prev or (l_r == 0 and E >= E_prev):
            break
        l_r += 1
        best, E_prev = cand, E
    t = l_r * dtau
    if refine and l_r > 0:
        res = minimize_scalar(lambda s: _energy(h, V.apply(psi, s)),
                              bounds=(max(t - dtau, 0.0), t + dtau), method="bounded",
                              options={"xatol": 1e-6})
        probes += int(res.nfev)
        if res.fun < E_prev:
            t = float(res.x)
            best = V.apply(psi, t)
            E_prev = float(res.fun)
    return LineSearch(l_r, t, normalize(best), E_prev, probes)


def _newton_time(V: CompressedUnitary, H, psi, policy: StepPolicy) -> float:
    t = 0.0
    for _ in range(policy.newton_iters):
        cur = V.apply(psi, t)
        e1, e2 = energy_derivatives(V.A, H, cur)
        dt = newton_step(e1, e2, policy.dtau)
        t += dt
        if abs(dt) < 1e-12:
            break
    return t


def _backtrack(V: CompressedUnitary, H, psi, t: float, E0: float, tries: int):
    for _ in range(tries + 1):
        if t > 0:
            cand = V.apply(psi, t)
            E = _energy(H, cand)
            if E < E0:
                return t, cand, E
        t *= 0.5
    return 0.0, psi, E0


def compressed_step(V: CompressedUnitary, H, psi, policy: StepPolicy) -> LineSearch:
    """Choose ``t`` along ``V(t)`` according to ``policy``.

    Newton and variance-bound steps are halved until the energy drops.
    """
    h = as_array(H)
    psi = as_array(psi)
    E0 = _energy(h, psi)
    if policy.kind == "grid_line_search":
        return line_search_stop(V, psi, policy.dtau, h, refine=policy.refine)
    if policy.kind == "fixed":
        t = policy.dtau
    elif policy.kind == "newton":
        t = _newton_time(V, h, psi, policy)
    else:
        t = variance_bound_step(h, psi)
    t, cand, E = _backtrack(V, h, psi, t, E0, policy.max_backtracks)
    return LineSearch(int(t > 0), t, normalize(cand), E, 1)


def acq_run(model, psi0, D: int, dtau: float, policy: StepPolicy | None = None, *,
            T: int = 2, max_steps: int = 200, compress: bool = True,
            sequential: bool = False,
            callback: Callable[[AcqRecord], None] | None = None) -> AcqTrace:
    """Run ACQ until a fresh QITE sweep stops lowering the energy.

    ``model`` is a :class:`SpinChainModel` or a ``(terms, H, periodic)``
    triple. Every outer iteration costs one QITE call. The sweep that fails
    to lower the energy is counted in no record and its state is discarded.

    With ``compress=False`` the QITE product ``U_n`` is applied instead of
    ``V_n(t)`` (``fixed`` policy then reproduces plain QITE exactly).
    """
    policy = policy or StepPolicy("grid_line_search", dtau)
    if isinstance(model, SpinChainModel):
        terms = decompose_local(model, T)
        H = model.dense().entries
        periodic = model.boundary == "periodic"
        if D < min(T, model.n_qubits) and model.J != 0:
            raise ValueError(f"D={D} must be at least T={T}")
    else:
        terms, H, periodic = model
        H = as_array(H)
    psi = normalize(psi0).amplitudes
    E = _energy(H, psi)
    records = AcqTrace()
    calls = 0
    for n in range(1, max_steps + 1):
        sweep = qite_sweep(terms, psi, dtau, D, H=H, periodic=periodic, sequential=sequential)
        calls += 1
        if not sweep.energy_next < E:
            break
        if compress:
            V = CompressedUnitary.from_generators(sweep.generators)
            step = compressed_step(V, H, psi, policy)
            if step.l_r == 0:
                break
            A = DenseOperator(V.A, hermitian=True)
            psi_next, E_next, t, l_r = step.psi_next.amplitudes, step.energy, step.t, step.l_r
        else:
            A = sum_generators(sweep.generators)
            psi_next, E_next, t, l_r = sweep.psi_next.amplitudes, sweep.energy_next, dtau, 1
        if not E_next < E:
            break
        psi, E = psi_next, E_next
        rec = AcqRecord(n, A, t, E, calls, StateVector(psi), tuple(sweep.generators), l_r)
        records.append(rec)
        if callback is not None:
            callback(rec)
    records.qite_calls = calls
    return records


def qite_run(model, psi0, D: int, dtau: float, *, T: int = 2, max_steps: int = 200,
             sequential: bool = False, stop_on_increase: bool = True):
    """Plain QITE stepping; stops at the first energy increase (that step dropped).

    Returns a list of ``(state, energy, generators)`` per accepted step.
    """
    terms = decompose_local(model, T)
    H = model.dense().entries
    periodic = model.boundary == "periodic"
    psi = normalize(psi0).amplitudes
    E = _energy(H, psi)
    out = []
    for _ in range(max_steps):
        sweep = qite_sweep(terms, psi, dtau, D, H=H, periodic=periodic, sequential=sequential)
        if stop_on_increase and sweep.energy_next > E:
            break
        psi, E = sweep.psi_next.amplitudes, sweep.energy_next
        out.append((sweep.psi_next, E, sweep.generators))
    return out


def db_qite_run(H, psi0, policy: StepPolicy, max_steps: int = 200):
    """DB-QITE iterations ``psi <- exp(s_k [rho_k, H]) psi`` with policy-chosen ``s_k``.

    Stops when a step fails to lower the energy. Returns ``(state, energy, s)``
    per accepted step.
    """
    h = as_array(H)
    psi = normalize(psi0).amplitudes
    E = _energy(h, psi)
    out = []
    for _ in range(max_steps):
        A = 1j * double_bracket_generator(h, psi)  # exp(s[rho,H]) = exp(-i s A)
        if np.max(np.abs(A)) <= 1e-14 * max(1.0, float(np.max(np.abs(h)))):
            break  # eigenstate
        V = CompressedUnitary(0.5 * (A + A.conj().T))
        step = compressed_step(V, h, psi, policy)
        if step.l_r == 0 or not step.energy < E:
            break
        psi, E = step.psi_next.amplitudes, step.energy
        out.append((step.psi_next, E, step.t))
    return out
