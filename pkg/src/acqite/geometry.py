"""Geometry of pure states: Fubini-Study distance, geodesics, trajectory distance."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import minimize_scalar

from .evolution import db_qite_step
from .statespace import (StateVector, X, Y, Z, _require_hermitian, as_array,
                         normalize)

ORTHOGONAL_TOL = 1e-12
COARSE_GRID = 256
INNER_TOL = 1e-8


def fs_distance(a, b) -> float:
    """``arccos |<a|b>|`` for unit vectors, in ``[0, pi/2]``.

    Evaluated as ``atan2(||b_perp||, |<a|b>|)``, which equals the arccos form
    but stays accurate when the states nearly coincide.
    """
    a, b = as_array(a), as_array(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    ov = np.vdot(a, b)
    perp = np.linalg.norm(b - ov * a)
    return float(math.atan2(perp, abs(ov)))


def geodesic_point(psi_a, psi_b, gamma: float) -> StateVector:
    """Point at fraction ``gamma`` of the shortest geodesic from ``psi_a`` to ``psi_b``.

    ``gamma = 0`` returns ``psi_a``; ``gamma = 1`` returns ``psi_b`` up to a
    global phase. The distance to ``psi_b`` falls linearly, ``(1 - gamma) delta``.
    """
    a, b = as_array(psi_a), as_array(psi_b)
    if a.shape != b.shape:
        raise ValueError("dimension mismatch")
    ov = np.vdot(b, a)  # <psi_B|psi_A>
    r = abs(ov)
    if r < ORTHOGONAL_TOL:
        raise ValueError("orthogonal endpoints: the geodesic is not unique")
    delta = fs_distance(a, b)
    if delta == 0.0:
        return StateVector(a)
    phase = ov / r
    out = (math.sin((1 - gamma) * delta) * a + math.sin(gamma * delta) * phase * b) / math.sin(delta)
    return normalize(out)


def bloch_vector(psi) -> np.ndarray:
    psi = as_array(psi)
    return np.array([np.vdot(psi, P @ psi).real for P in (X, Y, Z)])


def rank2_geodesic_time(psi0, H) -> float:
    """Time ``s`` at which ``exp(s [rho0, H]) psi0`` reaches the ground state.

    Single-qubit closed form ``s = 2 arccos(sqrt((1+r3)/2)) / (omega sqrt(r1^2+r2^2))``
    with ``r`` the Bloch vector of ``psi0`` in the eigenbasis of ``H`` (ground
    state on +z) and ``omega = E1 - E0``.
    """
    h = as_array(H)
    psi = as_array(psi0)
    if h.shape != (2, 2) or psi.shape != (2,):
        raise ValueError("rank2_geodesic_time works on a single qubit")
    _require_hermitian(h, "H")
    w, v = np.linalg.eigh(h)
    omega = float(w[1] - w[0])
    if omega <= 1e-14 * max(1.0, float(np.max(np.abs(w)))):
        raise ValueError("degenerate Hamiltonian: every state is a ground state")
    r1, r2, r3 = bloch_vector(v.conj().T @ psi)
    if r3 <= -1 + 1e-15:
        raise ValueError("initial state has no ground-state overlap (s -> infinity)")
    perp = math.hypot(r1, r2)
    if perp == 0.0:
        return 0.0
    return 2 * math.acos(min(math.sqrt((1 + r3) / 2), 1.0)) / (omega * perp)


def suzuki_shift_time(H, alpha: float, psi) -> float:
    """``s`` with ``exp(s [rho, H]) psi`` equal to normalized ``(H - alpha) psi``.

    ``s = -arccos((E - alpha) / sqrt(V + (E - alpha)^2)) / sqrt(V)``.
    """
    h = as_array(H)
    psi = as_array(psi)
    hp = h @ psi
    E = float(np.vdot(psi, hp).real)
    V = float(np.vdot(hp, hp).real) - E * E
    if V <= 1e-14 * max(1.0, E * E):
        raise ValueError("eigenstate input: variance is zero")
    x = (E - alpha) / math.sqrt(V + (E - alpha) ** 2)
    return -math.acos(max(-1.0, min(1.0, x))) / math.sqrt(V)


# ----------------------------------------------------------------------------
# Trajectories
# ----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled curve of states, evaluated by geodesic interpolation between samples."""

    params: np.ndarray
    states: np.ndarray  # (n_samples, dim)
    kind: str = "ite"

    KINDS = ("geodesic", "ite", "qite_piecewise", "acq_piecewise")

    def __post_init__(self):
        p = np.array(self.params, dtype=float)
        s = np.array([as_array(x) for x in self.states])
        if p.ndim != 1 or len(p) < 2:
            raise ValueError("a trajectory needs at least two samples")
        if s.shape[0] != len(p):
            raise ValueError("params and states differ in length")
        if np.any(np.diff(p) <= 0):
            raise ValueError("parameters must be strictly increasing")
        if not np.allclose(np.linalg.norm(s, axis=1), 1.0, atol=1e-10):
            raise ValueError("trajectory states must be unit vectors")
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown trajectory kind {self.kind!r}")
        for a in (p, s):
            a.flags.writeable = False
        object.__setattr__(self, "params", p)
        object.__setattr__(self, "states", s)

    def __len__(self):
        return len(self.params)

    @property
    def span(self) -> float:
        return float(self.params[-1] - self.params[0])

    def normalized_params(self) -> np.ndarray:
        return (self.params - self.params[0]) / self.span

    def at(self, u: float) -> np.ndarray:
        """State at normalized parameter ``u`` in [0, 1]."""
        u = min(max(float(u), 0.0), 1.0)
        grid = self.normalized_params()
        i = int(np.searchsorted(grid, u, side="right")) - 1
        i = min(max(i, 0), len(grid) - 2)
        g = (u - grid[i]) / (grid[i + 1] - grid[i])
        if g <= 0.0:
            return self.states[i]
        if g >= 1.0:
            return self.states[i + 1]
        return geodesic_point(self.states[i], self.states[i + 1], g).amplitudes

    def evaluate(self, us: Sequence[float]) -> np.ndarray:
        return np.array([self.at(u) for u in us])

    def arclength(self) -> np.ndarray:
        """Cumulative Fubini-Study length at each sample."""
        seg = [fs_distance(a, b) for a, b in zip(self.states[:-1], self.states[1:])]
        return np.concatenate([[0.0], np.cumsum(seg)])

    def by_arclength(self) -> "Trajectory":
        """Same curve parametrized by Fubini-Study arc length.

        Samples with zero length increment are dropped.
        """
        s = self.arclength()
        keep = np.concatenate([[True], np.diff(s) > 0])
        return Trajectory(s[keep], self.states[keep], self.kind)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            dim = self.states.shape[1]
            w.writerow(["param"] + [f"re{i}" for i in range(dim)] + [f"im{i}" for i in range(dim)])
            for p, s in zip(self.params, self.states):
                w.writerow([repr(float(p))] + [repr(float(x)) for x in s.real]
                           + [repr(float(x)) for x in s.imag])

    @classmethod
    def read_csv(cls, path, kind: str = "ite") -> "Trajectory":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        dim = (data.shape[1] - 1) // 2
        states = data[:, 1:1 + dim] + 1j * data[:, 1 + dim:]
        return cls(data[:, 0], states, kind)


def piecewise_geodesic(states: Sequence, times: Sequence[float], kind: str = "qite_piecewise") -> Trajectory:
    """Join consecutive samples by geodesic arcs."""
    states = [as_array(s) for s in states]
    for a, b in zip(states[:-1], states[1:]):
        if abs(np.vdot(a, b)) < ORTHOGONAL_TOL:
            raise ValueError("consecutive states are orthogonal")
    return Trajectory(np.asarray(times, dtype=float), states, kind)


def geodesic_trajectory(psi_a, psi_b) -> Trajectory:
    return piecewise_geodesic([psi_a, psi_b], [0.0, 1.0], kind="geodesic")


def _inner_infimum(point: np.ndarray, other: Trajectory, grid_u: np.ndarray,
                   grid_states: np.ndarray, tol: float) -> float:
    ov = np.abs(grid_states.conj() @ point)
    k = int(np.argmax(ov))
    best = fs_distance(point, grid_states[k])
    lo = grid_u[max(k - 1, 0)]
    hi = grid_u[min(k + 1, len(grid_u) - 1)]
    if hi > lo:
        res = minimize_scalar(lambda u: fs_distance(point, other.at(u)), bounds=(lo, hi),
                              method="bounded", options={"xatol": tol})
        best = min(best, float(res.fun))
    return best


def trajectory_distance(S1: Trajectory, S2: Trajectory, quadrature_points: int = 101,
                        shared_parameter: bool = False, coarse: int = COARSE_GRID,
                        tol: float = INNER_TOL) -> float:
    """Integral over ``S1`` of the smallest distance to ``S2``.

    Both parameter ranges are rescaled to [0, 1]. For each of the
    ``quadrature_points`` nodes on ``S1`` the infimum over ``S2`` is located on
    a coarse grid and refined by bounded scalar minimization; the outer
    integral is composite Simpson. An even node count is bumped by one.

    ``shared_parameter=True`` instead returns the cheaper upper bound
    ``int_0^1 d(S1(u), S2(u)) du``.
    """
    if quadrature_points < 3:
        raise ValueError("need at least 3 quadrature points")
    if len(S1) < 2 or len(S2) < 2:
        raise ValueError("trajectories need at least two samples")
    if quadrature_points % 2 == 0:
        quadrature_points += 1
    us = np.linspace(0.0, 1.0, quadrature_points)
    pts = S1.evaluate(us)
    if shared_parameter:
        vals = [fs_distance(p, q) for p, q in zip(pts, S2.evaluate(us))]
    else:
        grid_u = np.union1d(np.linspace(0.0, 1.0, coarse), S2.normalized_params())
        grid_states = S2.evaluate(grid_u)
        vals = [_inner_infimum(p, S2, grid_u, grid_states, tol) for p in pts]
    return float(simpson(np.asarray(vals), x=us))


def ite_geodesic_distance(H, psi0, tau_max: float, n_samples: int = 401,
                          quadrature_points: int = 201, arclength: bool = True) -> float:
    """Distance between the ITE curve from ``psi0`` and the geodesic to the ground state."""
    from .evolution import ite_trajectory

    h = as_array(H)
    w, v = np.linalg.eigh(h)
    gs = v[:, 0]
    taus = np.linspace(0.0, tau_max, n_samples)
    states = [s.amplitudes for s in ite_trajectory(h, psi0, taus)]
    traj = Trajectory(taus, states, "ite")
    geo = geodesic_trajectory(as_array(psi0), gs)
    if arclength:
        traj = traj.by_arclength()
    return trajectory_distance(traj, geo, quadrature_points)


def apply_rank2_geodesic(psi0, H) -> StateVector:
    """Single DB-QITE step of length :func:`rank2_geodesic_time`."""
    return db_qite_step(H, psi0, rank2_geodesic_time(psi0, H))
