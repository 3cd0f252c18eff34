import numpy as np
import pytest
from hypothesis import given, strategies as st

from acqite.evolution import db_qite_step, ite_trajectory
from acqite.geometry import (Trajectory, bloch_vector, fs_distance, geodesic_point,
                             geodesic_trajectory, ite_geodesic_distance, piecewise_geodesic,
                             rank2_geodesic_time, suzuki_shift_time, trajectory_distance)
from acqite.hamiltonian import build_tfim
from acqite.statespace import StateVector, X, Z, normalize, overlap_fidelity

from conftest import random_hermitian, random_state

seeds = st.integers(0, 2**32 - 1)
zero, one, plus = StateVector.basis("0"), StateVector.basis("1"), StateVector.all_plus(1)


# -- distance -------------------------------------------------------------------------

def test_fs_distance_examples():
    assert fs_distance(zero, zero) == 0
    assert fs_distance(zero, one) == pytest.approx(np.pi / 2)
    assert fs_distance(zero, plus) == pytest.approx(np.pi / 4)
    with pytest.raises(ValueError):
        fs_distance(zero, StateVector.all_zero(2))


def test_fs_distance_accurate_near_zero(rng):
    a = random_state(4, rng)
    d = random_state(4, rng)
    d -= np.vdot(a, d) * a
    d /= np.linalg.norm(d)
    for eps in (1e-3, 1e-7, 1e-11):
        b = np.cos(eps) * a + np.sin(eps) * d
        assert fs_distance(a, b) == pytest.approx(eps, rel=1e-8)


def test_fs_metric_on_random_triples():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        dim = 1 << int(rng.integers(1, 4))
        a, b, c = (random_state(dim, rng) for _ in range(3))
        phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
        assert fs_distance(a, b) == pytest.approx(fs_distance(b, a), abs=1e-12)
        assert fs_distance(phase * a, b) == pytest.approx(fs_distance(a, b), abs=1e-12)
        assert fs_distance(a, c) <= fs_distance(a, b) + fs_distance(b, c) + 1e-10
        assert 0 <= fs_distance(a, b) <= np.pi / 2


# -- geodesics ----------------------------------------------------------------------------

@given(seeds)
def test_geodesic_endpoints_and_linearity(seed):
    rng = np.random.default_rng(seed)
    a, b = random_state(8, rng), random_state(8, rng)
    delta = fs_distance(a, b)
    assert np.allclose(geodesic_point(a, b, 0).amplitudes, a)
    assert overlap_fidelity(geodesic_point(a, b, 1), b) == pytest.approx(1.0, abs=1e-12)
    for g in np.linspace(0, 1, 11):
        p = geodesic_point(a, b, g)
        assert abs(p.norm() - 1) < 1e-12
        assert abs(fs_distance(p, b) - (1 - g) * delta) < 1e-10
        assert abs(fs_distance(p, a) - g * delta) < 1e-10


@given(seeds, st.floats(0, 1))
def test_geodesic_swap_symmetry(seed, g):
    rng = np.random.default_rng(seed)
    a, b = random_state(4, rng), random_state(4, rng)
    p, q = geodesic_point(a, b, g), geodesic_point(b, a, 1 - g)
    assert overlap_fidelity(p, q) == pytest.approx(1.0, abs=1e-10)


def test_geodesic_errors_and_identical_endpoints():
    with pytest.raises(ValueError):
        geodesic_point(zero, one, 0.5)
    for g in (0.0, 0.3, 1.0):
        assert np.allclose(geodesic_point(plus, 1j * plus.amplitudes, g).amplitudes, plus.amplitudes)


# -- rank-2 closed forms ----------------------------------------------------------------------

def test_rank2_examples():
    assert rank2_geodesic_time(zero, -Z) == 0.0
    assert rank2_geodesic_time(plus, -Z) == pytest.approx(np.pi / 4)
    with pytest.raises(ValueError):
        rank2_geodesic_time(one, -Z)
    with pytest.raises(ValueError):
        rank2_geodesic_time(plus, np.eye(2))
    with pytest.raises(ValueError):
        rank2_geodesic_time(StateVector.all_zero(2), np.eye(4))


def test_rank2_time_grows_as_overlap_vanishes():
    # r = (sin th, 0, cos th) in the eigenbasis of -Z
    times = []
    for r3 in (0.5, 0.0, -0.5, -0.99, -1 + 1e-6):
        th = np.arccos(r3)
        psi = np.array([np.cos(th / 2), np.sin(th / 2)])
        times.append(rank2_geodesic_time(psi, -Z))
    assert all(b > a for a, b in zip(times, times[1:]))
    assert np.isfinite(times[-1]) and times[-1] > 100


@pytest.mark.parametrize("seed", range(100))
def test_rank2_reaches_ground_state(seed):
    rng = np.random.default_rng(seed)
    H = random_hermitian(2, rng)
    psi = random_state(2, rng)
    gs = np.linalg.eigh(H)[1][:, 0]
    out = db_qite_step(H, psi, rank2_geodesic_time(psi, H))
    assert overlap_fidelity(out, gs) >= 1 - 1e-10


def test_bloch_vector():
    assert np.allclose(bloch_vector(zero), [0, 0, 1])
    assert np.allclose(bloch_vector(plus), [1, 0, 0])


def test_suzuki_examples():
    s = suzuki_shift_time(Z, 0.0, plus)
    assert s == pytest.approx(-np.pi / 2)
    minus = np.array([1, -1]) / np.sqrt(2)
    assert overlap_fidelity(db_qite_step(Z, plus, s), minus) == pytest.approx(1.0, abs=1e-12)
    # alpha = E with a symmetric spectrum: arccos(0)
    assert abs(suzuki_shift_time(X, 0.0, zero)) == pytest.approx(np.pi / 2)
    with pytest.raises(ValueError):
        suzuki_shift_time(Z, 0.3, zero)


@given(seeds, st.floats(-3, 3), st.sampled_from([2, 8]))
def test_suzuki_shift_reproduces_direction(seed, alpha, dim):
    rng = np.random.default_rng(seed)
    H = random_hermitian(dim, rng)
    psi = random_state(dim, rng)
    target = normalize((H - alpha * np.eye(dim)) @ psi)
    out = db_qite_step(H, psi, suzuki_shift_time(H, alpha, psi))
    assert overlap_fidelity(out, target) == pytest.approx(1.0, abs=1e-8)


# -- trajectories ----------------------------------------------------------------------------

def test_trajectory_validation():
    with pytest.raises(ValueError):
        Trajectory([0.0], [zero.amplitudes])
    with pytest.raises(ValueError):
        Trajectory([0.0, 0.0], [zero.amplitudes, plus.amplitudes])
    with pytest.raises(ValueError):
        Trajectory([0.0, 1.0], [zero.amplitudes, 2 * plus.amplitudes])
    with pytest.raises(ValueError):
        Trajectory([0.0, 1.0], [zero.amplitudes, plus.amplitudes], kind="spline")
    with pytest.raises(ValueError):
        piecewise_geodesic([zero, one], [0, 1])


def test_piecewise_nodes_and_endpoints(rng):
    states = [random_state(4, rng) for _ in range(5)]
    times = [0.0, 0.5, 0.7, 2.0, 3.0]
    tr = piecewise_geodesic(states, times)
    for t, s in zip(tr.normalized_params(), states):
        assert overlap_fidelity(tr.at(t), s) == pytest.approx(1.0, abs=1e-12)
    two = piecewise_geodesic(states[:2], [0, 1])
    assert np.allclose(two.at(0), states[0]) and np.allclose(two.at(1), states[1])


def test_trajectory_csv_round_trip(tmp_path, rng):
    tr = piecewise_geodesic([random_state(4, rng) for _ in range(3)], [0, 1, 3])
    tr.write_csv(tmp_path / "t.csv")
    back = Trajectory.read_csv(tmp_path / "t.csv", kind="qite_piecewise")
    assert np.array_equal(back.params, tr.params) and np.array_equal(back.states, tr.states)


def test_arclength_of_geodesic(rng):
    a, b = random_state(4, rng), random_state(4, rng)
    pts = [geodesic_point(a, b, g).amplitudes for g in np.linspace(0, 1, 9)]
    s = piecewise_geodesic(pts, np.linspace(0, 1, 9) ** 2).arclength()
    assert s[-1] == pytest.approx(fs_distance(a, b), abs=1e-12)


def test_distance_identical_is_zero(rng):
    a, b = random_state(4, rng), random_state(4, rng)
    geo = geodesic_trajectory(a, b)
    assert trajectory_distance(geo, geo) < 1e-8


def test_distance_refinement_consistency(rng):
    a, b = random_state(8, rng), random_state(8, rng)
    geo = geodesic_trajectory(a, b)
    coarse = piecewise_geodesic([geodesic_point(a, b, g) for g in np.linspace(0, 1, 5)],
                                np.linspace(0, 1, 5))
    fine = piecewise_geodesic([geodesic_point(a, b, g) for g in np.linspace(0, 1, 9)],
                              np.linspace(0, 1, 9))
    assert abs(trajectory_distance(coarse, geo) - trajectory_distance(fine, geo)) < 1e-6


def test_distance_errors(rng):
    geo = geodesic_trajectory(random_state(2, rng), random_state(2, rng))
    with pytest.raises(ValueError):
        trajectory_distance(geo, geo, quadrature_points=2)


def test_distance_bounded_by_shared_parameter(rng):
    for _ in range(5):
        H = random_hermitian(8, rng)
        psi = random_state(8, rng)
        taus = np.linspace(0, 3, 61)
        ite = Trajectory(taus, [s.amplitudes for s in ite_trajectory(H, psi, taus)])
        geo = geodesic_trajectory(psi, np.linalg.eigh(H)[1][:, 0])
        inf = trajectory_distance(ite, geo, 51)
        bound = trajectory_distance(ite, geo, 51, shared_parameter=True)
        assert 0 <= inf <= bound + 1e-12


def test_single_qubit_ite_on_geodesic(rng):
    for _ in range(5):
        H = random_hermitian(2, rng)
        psi = random_state(2, rng)
        assert ite_geodesic_distance(H, psi, 10.0) < 1e-6


def test_tfim_distance_grows_with_size():
    d = [ite_geodesic_distance(build_tfim(n, 0.5, 1.0).dense().entries,
                               StateVector.all_zero(n), 10.0) for n in (2, 4, 6)]
    assert d[0] < d[1] < d[2]
