"""Exact imaginary-time evolution and double-bracket steps.

These are the reference dynamics that the approximate QITE/ACQ routines are
checked against, so every step uses an exact exponential.
"""
from __future__ import annotations

import numpy as np

from .statespace import (StateVector, _require_hermitian, as_array, expectation,
                         herm_exp, normalize)

FD_STEP = 1e-5


def _spectral(H):
    h = as_array(H)
    _require_hermitian(h, "H")
    return np.linalg.eigh(0.5 * (h + h.conj().T))


def ite_evolve(H, psi0, tau: float) -> StateVector:
    """Normalized ``exp(-tau H) psi0``.

    The exponent is shifted by the smallest eigenvalue so that long times do
    not overflow. Convergence to the ground state needs a nonzero initial
    overlap with it; that is not checked here.
    """
    if tau < 0:
        raise ValueError(f"imaginary time must be non-negative, got {tau}")
    psi0 = as_array(psi0)
    if tau == 0:
        return normalize(psi0)
    w, v = _spectral(H)
    c = v.conj().T @ psi0
    return normalize(v @ (np.exp(-tau * (w - w[0])) * c))


def ite_trajectory(H, psi0, taus) -> list[StateVector]:
    """``ite_evolve`` at many times, sharing one eigendecomposition."""
    w, v = _spectral(H)
    c = v.conj().T @ as_array(psi0)
    return [normalize(v @ (np.exp(-t * (w - w[0])) * c)) for t in taus]


def ite_step(H, psi, dtau: float) -> StateVector:
    if dtau <= 0:
        raise ValueError(f"dtau must be positive, got {dtau}")
    return normalize(herm_exp(H, -dtau).entries @ as_array(psi))


def _ite_signed(H, psi, dtau: float) -> np.ndarray:
    # backward normalized ITE is well defined as well
    return normalize(herm_exp(H, -dtau).entries @ as_array(psi)).amplitudes


def wick_residual(H, psi, dtau: float = FD_STEP) -> float:
    """Norm of ``d psi/d tau + (H - E) psi`` with a centered difference.

    The derivative of the normalized ITE curve is estimated from
    ``psi(+dtau)`` and ``psi(-dtau)``, so the residual is ``O(dtau^2)``.
    """
    h = as_array(H)
    psi = normalize(psi).amplitudes
    E = expectation(psi, h)
    deriv = (_ite_signed(h, psi, dtau) - _ite_signed(h, psi, -dtau)) / (2 * dtau)
    return float(np.linalg.norm(deriv + h @ psi - E * psi))


def double_bracket_generator(H, psi) -> np.ndarray:
    """The anti-Hermitian ``[rho, H]`` with ``rho = |psi><psi|``."""
    h = as_array(H)
    psi = as_array(psi)
    hp = h @ psi
    return np.outer(psi, hp.conj()) - np.outer(hp, psi.conj())


def db_qite_step(H, psi, s: float) -> StateVector:
    """``exp(s [rho, H]) psi``, a unitary step along the double-bracket flow."""
    h = as_array(H)
    _require_hermitian(h, "H")
    psi = as_array(psi)
    if s == 0:
        return StateVector(psi)
    K = double_bracket_generator(h, psi)
    if np.max(np.abs(K)) <= 1e-14 * max(1.0, float(np.max(np.abs(h)))):
        return StateVector(psi)  # eigenstate: [rho, H] vanishes
    # exp(s K) = exp(-i s G) with G = i K Hermitian
    G = 1j * K
    U = herm_exp(0.5 * (G + G.conj().T), -1j * s).entries
    return StateVector(U @ psi)


def db_qite_step_closed(H, psi, s: float) -> StateVector:
    """Same as :func:`db_qite_step` using the invariant plane {psi, (H-E)psi}.

    ``[rho, H]`` maps ``psi -> -sqrt(V) phi`` and ``phi -> sqrt(V) psi`` with
    ``phi = (H - E) psi / sqrt(V)``, so the step is a plane rotation.
    """
    h = as_array(H)
    psi = as_array(psi)
    hp = h @ psi
    E = np.vdot(psi, hp).real
    perp = hp - E * psi
    sv = np.linalg.norm(perp)
    if sv < 1e-15:
        return StateVector(psi)
    phi = perp / sv
    return StateVector(np.cos(s * sv) * psi - np.sin(s * sv) * phi)


def density_flow_rhs(H, psi) -> np.ndarray:
    """``[[rho, H], rho]``, the right-hand side of the double-bracket flow."""
    h = as_array(H)
    psi = as_array(psi)
    rho = np.outer(psi, psi.conj())
    K = rho @ h - h @ rho
    return K @ rho - rho @ K
