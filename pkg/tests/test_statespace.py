import numpy as np
import pytest
from hypothesis import given, strategies as st

from acqite.statespace import (DenseOperator, PauliString, StateVector, X, Y, Z, I2,
                               PAULI_MATRICES, apply_local, embed_operator, expectation,
                               herm_exp, normalize, overlap_fidelity, pauli_basis,
                               pauli_sum_matrix)
from acqite.hamiltonian import build_tfim, exact_spectrum

from conftest import expm_series, random_hermitian, random_state

labels = st.integers(1, 3).flatmap(lambda n: st.text("IXYZ", min_size=n, max_size=n))


def kron_label(label):
    m = np.ones((1, 1))
    for ch in label:
        m = np.kron(m, PAULI_MATRICES[ch])
    return m


# -- StateVector / DenseOperator ----------------------------------------------

def test_state_is_read_only():
    s = StateVector.all_zero(2)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 2


def test_state_rejects_non_power_of_two():
    with pytest.raises(ValueError):
        StateVector(np.ones(3))


def test_basis_uses_qubit0_as_msb():
    assert StateVector.basis("01").amplitudes[1] == 1
    assert StateVector.basis("10").amplitudes[2] == 1


def test_dense_operator_hermitian_flag_checked():
    with pytest.raises(ValueError):
        DenseOperator(np.array([[0, 1], [0, 0]]), hermitian=True)
    assert DenseOperator(X, hermitian=True).n_qubits == 1


# -- embed_operator -------------------------------------------------------------

def test_embed_single_qubit_is_identity_map():
    assert np.allclose(embed_operator(X, [0], 1).entries, X)


def test_embed_z_on_second_qubit():
    Zq1 = embed_operator(Z, [1], 2)
    assert expectation(StateVector.basis("01"), Zq1) == -1
    assert np.allclose(Zq1.entries, np.kron(I2, Z))


def test_embed_zz_on_three_qubits():
    op = embed_operator(np.kron(Z, Z), [0, 1], 3)
    assert expectation(StateVector.basis("110"), op) == pytest.approx(1.0)
    assert np.allclose(op.entries, np.kron(np.kron(Z, Z), I2))


def test_embed_reversed_support_matches_swap():
    block = np.kron(X, Z)
    assert np.allclose(embed_operator(block, [1, 0], 2).entries, np.kron(Z, X))


@pytest.mark.parametrize("support", [[3], [0, 3], [1, 1]])
def test_embed_rejects_bad_support(support):
    block = np.eye(1 << len(support))
    with pytest.raises(ValueError):
        embed_operator(block, support, 3)


def test_embed_preserves_hermiticity(rng):
    b = random_hermitian(4, rng)
    assert embed_operator(DenseOperator(b, hermitian=True), [2, 0], 3).hermitian


@given(st.integers(0, 2**32 - 1))
def test_apply_local_matches_embedding(seed):
    rng = np.random.default_rng(seed)
    n = 4
    support = list(rng.choice(n, size=2, replace=False))
    b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    psi = random_state(1 << n, rng)
    ref = embed_operator(b, support, n).entries @ psi
    assert np.allclose(apply_local(b, support, psi), ref, atol=1e-12)


# -- herm_exp -----------------------------------------------------------------

def test_herm_exp_diagonal():
    tau = 0.7
    assert np.allclose(herm_exp(Z, -tau).entries, np.diag([np.exp(-tau), np.exp(tau)]))


def test_herm_exp_pauli_rotation():
    assert np.allclose(herm_exp(X, 1j * np.pi / 2).entries, 1j * X, atol=1e-10)


def test_herm_exp_matches_series_oracle():
    H = build_tfim(2, 0.5, 1.0).dense().entries
    assert np.max(np.abs(herm_exp(H, -0.3).entries - expm_series(-0.3 * H))) < 1e-9


def test_herm_exp_rejects_non_hermitian():
    with pytest.raises(ValueError):
        herm_exp(np.array([[0, 1], [0, 0]]), 1.0)


@pytest.mark.parametrize("seed", range(100))
def test_herm_exp_unitary(seed):
    rng = np.random.default_rng(seed)
    dim = 1 << int(rng.integers(1, 5))
    U = herm_exp(random_hermitian(dim, rng), 1j * rng.normal()).entries
    assert np.max(np.abs(U.conj().T @ U - np.eye(dim))) < 1e-10


@given(st.integers(0, 2**32 - 1), st.floats(-2, 2), st.floats(-2, 2))
def test_herm_exp_group_law(seed, a, b):
    rng = np.random.default_rng(seed)
    H = random_hermitian(4, rng)
    lhs = herm_exp(H, 1j * a).entries @ herm_exp(H, 1j * b).entries
    assert np.allclose(lhs, herm_exp(H, 1j * (a + b)).entries, atol=1e-10)


# -- expectation / fidelity / normalize -----------------------------------------

def test_expectation_examples():
    assert expectation(StateVector.basis("0"), Z) == 1
    assert expectation(StateVector.all_plus(1), Z) == pytest.approx(0.0, abs=1e-15)


def test_expectation_ground_energy():
    m = build_tfim(3, 0.5, 1.0)
    spec = exact_spectrum(m)
    assert expectation(spec.ground_state, m.dense()) == pytest.approx(spec.ground_energy, abs=1e-10)


def test_expectation_errors():
    with pytest.raises(ValueError):
        expectation(StateVector.all_zero(2), Z)
    with pytest.raises(ValueError):
        expectation(StateVector.all_plus(1), np.array([[0, 1j], [1j, 0]]))


@given(st.integers(0, 2**32 - 1), st.floats(0, 2 * np.pi))
def test_expectation_linear_and_phase_invariant(seed, theta):
    rng = np.random.default_rng(seed)
    A, B = random_hermitian(4, rng), random_hermitian(4, rng)
    psi = random_state(4, rng)
    a, b = rng.normal(size=2)
    assert expectation(psi, a * A + b * B) == pytest.approx(
        a * expectation(psi, A) + b * expectation(psi, B), abs=1e-10)
    assert expectation(np.exp(1j * theta) * psi, A) == pytest.approx(expectation(psi, A), abs=1e-10)


def test_overlap_fidelity_examples():
    zero, one = StateVector.basis("0"), StateVector.basis("1")
    assert overlap_fidelity(zero, zero) == 1
    assert overlap_fidelity(zero, one) == 0
    assert overlap_fidelity(zero, np.exp(0.4j) * zero.amplitudes) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        overlap_fidelity(zero, StateVector.all_zero(2))


def test_normalize_examples():
    assert np.allclose(normalize(2 * StateVector.basis("0").amplitudes).amplitudes, [1, 0])
    assert np.allclose(normalize([1, 1]).amplitudes, StateVector.all_plus(1).amplitudes)
    with pytest.raises(ValueError):
        normalize([1e-15, 0])


@given(st.lists(st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
                min_size=4, max_size=4))
def test_normalize_unit_norm(amps):
    v = np.array(amps)
    if np.linalg.norm(v) < 1e-6:
        return
    assert abs(normalize(v).norm() - 1) < 1e-12


# -- PauliString ----------------------------------------------------------------

@given(labels)
def test_pauli_dense_matches_kron(label):
    p = PauliString.from_label(label)
    assert p.label == label
    assert np.allclose(p.to_dense(), kron_label(label))
    assert p.weight == sum(ch != "I" for ch in label)


@given(labels.flatmap(lambda a: st.tuples(st.just(a), st.text("IXYZ", min_size=len(a), max_size=len(a)))))
def test_pauli_product_closure(pair):
    a, b = (PauliString.from_label(s) for s in pair)
    phase, c = a @ b
    assert phase in (1, -1, 1j, -1j)
    assert np.allclose(a.to_dense() @ b.to_dense(), phase * c.to_dense())


@given(labels, st.integers(0, 2**32 - 1))
def test_pauli_apply_matches_dense(label, seed):
    p = PauliString.from_label(label)
    psi = random_state(1 << len(label), np.random.default_rng(seed))
    assert np.allclose(p.apply(psi), p.to_dense() @ psi)


def test_identity_weight_zero():
    assert PauliString.identity(3).weight == 0
    assert PauliString.from_label("IXIZ").support == (1, 3)


def test_pauli_embed():
    p = PauliString.from_label("XZ").embed([3, 1], 4)
    assert p.label == "IZIX"


def test_pauli_basis_size_and_order():
    basis = pauli_basis(2, include_identity=True)
    assert len(basis) == 16 and basis[0].weight == 0
    assert len(pauli_basis(2)) == 15
    assert len({p.label for p in basis}) == 16


@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_pauli_sum_matrix(n, seed):
    c = np.random.default_rng(seed).normal(size=4 ** n)
    ref = sum(a * p.to_dense() for a, p in zip(c, pauli_basis(n, include_identity=True)))
    assert np.allclose(pauli_sum_matrix(c, n), ref, atol=1e-12)
