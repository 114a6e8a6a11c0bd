"""Gate kernels, dense application, measurement, reset, overlaps."""

import numpy as np
import pytest

from combsim.circuits import CNOT_MAT, H_MAT, SWAP_MAT
from combsim.errors import (
    DimensionMismatchError,
    NonUnitaryError,
    QubitOutOfRangeError,
    StaleRecordError,
)
from combsim.models import IsingParams, ising_hamiltonian
from combsim.pauli import eigh, expm_hermitian, sum_matrix
from combsim.statevector import (
    StateVector,
    apply_1q,
    apply_2q,
    apply_dense,
    basis_state,
    expectation,
    fidelity,
    init_comb_product,
    measure_subset,
    overlap,
    random_target_state,
    reduced_overlaps,
    reset_down,
    target_energy,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)


def test_init_comb_product_basis():
    full = init_comb_product(basis_state(1, 0), 2)
    assert full.nqubits == 3
    assert full.amplitudes[0] == 1.0 and np.count_nonzero(full.amplitudes) == 1


def test_init_comb_product_superposition_lands_in_low_bits():
    target = StateVector(1, np.array([1.0, 1.0], dtype=complex) / np.sqrt(2))
    full = init_comb_product(target, 1)
    assert full.amplitudes[0] == pytest.approx(1 / np.sqrt(2))
    assert full.amplitudes[1] == pytest.approx(1 / np.sqrt(2))
    assert np.allclose(full.amplitudes[2:], 0.0)


def test_init_comb_product_preserves_norm():
    rng = np.random.default_rng(5)
    full = init_comb_product(random_target_state(3, rng), 3)
    assert full.norm == pytest.approx(1.0, abs=1e-12)


def test_random_state_seeded():
    a = random_target_state(3, np.random.default_rng(11))
    b = random_target_state(3, np.random.default_rng(11))
    assert np.array_equal(a.amplitudes, b.amplitudes)
    assert a.norm == pytest.approx(1.0, abs=1e-12)


def test_random_state_uniform_over_basis():
    """Mean basis-state weight over 10^4 Haar draws is 1/8 within 3 sigma."""
    n = 10_000
    rng = np.random.default_rng(303)
    w = np.empty(n)
    for k in range(n):
        w[k] = np.abs(random_target_state(3, rng).amplitudes[0]) ** 2
    sigma = w.std(ddof=1) / np.sqrt(n)
    assert abs(w.mean() - 1 / 8) <= 3 * sigma


def test_hadamard_on_zero():
    s = apply_1q(basis_state(1, 0), H_MAT, 0)
    assert np.allclose(s.amplitudes, [1 / np.sqrt(2), 1 / np.sqrt(2)])


def test_cnot_makes_bell_state():
    # (|00> + |10>)/sqrt(2) with qubit 1 as control -> (|00> + |11>)/sqrt(2)
    s = StateVector(2, np.array([1, 0, 1, 0], dtype=complex) / np.sqrt(2))
    apply_2q(s, CNOT_MAT, 1, 0)
    assert np.allclose(s.amplitudes, np.array([1, 0, 0, 1]) / np.sqrt(2))


def test_swap_exchanges_bits():
    s = basis_state(2, 0b01)
    apply_2q(s, SWAP_MAT, 0, 1)
    assert s.amplitudes[0b10] == pytest.approx(1.0)


def test_gate_input_validation():
    s = basis_state(2, 0)
    with pytest.raises(NonUnitaryError):
        apply_1q(s, np.array([[1, 0], [0, 2.0]]), 0)
    with pytest.raises(QubitOutOfRangeError):
        apply_1q(s, X, 5)
    with pytest.raises(QubitOutOfRangeError):
        apply_2q(s, CNOT_MAT, 0, 0)


def test_kernels_match_embedded_dense():
    """1q/2q kernels agree with the full-register embedded matrix on random
    5-qubit states, for every qubit placement."""
    rng = np.random.default_rng(17)
    gates_1q = [H_MAT, X, np.diag([1.0, np.exp(0.4j)])]
    for q in range(5):
        for g in gates_1q:
            s = random_target_state(5, rng)
            ref = s.copy()
            apply_1q(s, g, q)
            u = circuit_unitary_embed(g, (q,), 5)
            ref.amplitudes = u @ ref.amplitudes
            assert np.max(np.abs(s.amplitudes - ref.amplitudes)) <= 1e-12
    for qa in range(5):
        for qb in range(5):
            if qa == qb:
                continue
            s = random_target_state(5, rng)
            ref = s.copy()
            apply_2q(s, CNOT_MAT, qa, qb)
            u = circuit_unitary_embed(CNOT_MAT, (qa, qb), 5)
            ref.amplitudes = u @ ref.amplitudes
            assert np.max(np.abs(s.amplitudes - ref.amplitudes)) <= 1e-12


def circuit_unitary_embed(gate: np.ndarray, qubits: tuple, n: int) -> np.ndarray:
    """Independent embedding: scatter gate entries over basis indices."""
    dim = 2**n
    u = np.zeros((dim, dim), dtype=complex)
    k = len(qubits)
    for col in range(dim):
        bits = [(col >> q) & 1 for q in range(n)]
        sub_col = 0
        for q in qubits:  # first listed qubit = high gate bit
            sub_col = (sub_col << 1) | bits[q]
        for sub_row in range(2**k):
            amp = gate[sub_row, sub_col]
            if amp == 0:
                continue
            new_bits = list(bits)
            for pos, q in enumerate(reversed(qubits)):
                new_bits[q] = (sub_row >> pos) & 1
            row = sum(b << q for q, b in enumerate(new_bits))
            u[row, col] += amp
    return u


def test_apply_dense_identity_and_norm():
    rng = np.random.default_rng(23)
    s = random_target_state(4, rng)
    before = s.amplitudes.copy()
    apply_dense(s, np.eye(4), start_qubit=1)
    assert np.array_equal(s.amplitudes, before)


def test_apply_dense_full_register_energy_conserved():
    ising = IsingParams(3, 1.2)
    h = sum_matrix(ising_hamiltonian(ising))
    u = expm_hermitian(h, 0.83)
    rng = np.random.default_rng(31)
    s = random_target_state(3, rng)
    e0 = expectation(s, h)
    apply_dense(s, u)
    assert s.norm == pytest.approx(1.0, abs=1e-10)
    assert expectation(s, h) == pytest.approx(e0, abs=1e-10)


def test_apply_dense_subset_matches_kron():
    rng = np.random.default_rng(37)
    g = expm_hermitian(sum_matrix(ising_hamiltonian(IsingParams(2, 0.7))), 0.5)
    s = random_target_state(4, rng)
    ref = s.copy()
    apply_dense(s, g, start_qubit=1)
    full = np.kron(np.kron(np.eye(2), g), np.eye(2))
    ref.amplitudes = full @ ref.amplitudes
    assert np.max(np.abs(s.amplitudes - ref.amplitudes)) <= 1e-12


def test_apply_dense_rejects_non_unitary():
    with pytest.raises(NonUnitaryError):
        apply_dense(basis_state(2, 0), np.ones((2, 2)), 0)


def test_measure_deterministic_comb():
    rng = np.random.default_rng(0)
    s = init_comb_product(basis_state(2, 3), 2)
    before = s.amplitudes.copy()
    s, rec = measure_subset(s, (2, 3), rng)
    assert rec.outcome == (0, 0)
    assert rec.probability == pytest.approx(1.0, abs=1e-12)
    assert np.array_equal(s.amplitudes, before)


def test_measure_single_qubit_records_half():
    rng = np.random.default_rng(1)
    s = apply_1q(basis_state(1, 0), H_MAT, 0)
    s, rec = measure_subset(s, (0,), rng)
    assert rec.probability == pytest.approx(0.5, abs=1e-12)
    assert s.norm == pytest.approx(1.0, abs=1e-12)


def test_measurement_is_idempotent():
    rng = np.random.default_rng(9)
    for _ in range(20):
        s = random_target_state(3, rng)
        s, rec1 = measure_subset(s, (0, 2), rng)
        s, rec2 = measure_subset(s, (0, 2), rng)
        assert rec1.outcome == rec2.outcome
        assert rec2.probability == pytest.approx(1.0, abs=1e-10)


def test_measurement_born_frequencies():
    """Empirical outcome frequencies over 1e5 seeded single-qubit measurements
    match the amplitude weights within 4 sigma."""
    amps = np.array([np.sqrt(0.3), np.sqrt(0.7)], dtype=complex)
    n = 100_000
    rng = np.random.default_rng(777)
    ones = 0
    for _ in range(n):
        s = StateVector(1, amps.copy())
        _, rec = measure_subset(s, (0,), rng)
        ones += rec.outcome[0]
    p = 0.7
    sigma = np.sqrt(p * (1 - p) / n)
    assert abs(ones / n - p) <= 4 * sigma


def test_reset_down_restores_comb():
    rng = np.random.default_rng(4)
    target = random_target_state(2, rng)
    s = init_comb_product(target, 2)
    # excite the comb deterministically
    apply_1q(s, X, 2)
    apply_1q(s, X, 3)
    s, rec = measure_subset(s, (2, 3), rng)
    assert rec.outcome == (1, 1)
    reset_down(s, (2, 3), rec)
    weights = np.abs(s.amplitudes.reshape(4, 4)) ** 2
    assert weights[1:].sum() <= 1e-12  # no comb excitation left
    assert s.norm == pytest.approx(1.0, abs=1e-12)


def test_reset_down_outcome_zero_is_identity():
    rng = np.random.default_rng(6)
    s = init_comb_product(random_target_state(2, rng), 2)
    before = s.amplitudes.copy()
    s, rec = measure_subset(s, (2, 3), rng)
    reset_down(s, (2, 3), rec)
    assert np.allclose(s.amplitudes, before, atol=1e-12)


def test_reset_down_stale_record():
    rng = np.random.default_rng(8)
    s = init_comb_product(random_target_state(1, rng), 2)
    s, rec = measure_subset(s, (1, 2), rng)
    with pytest.raises(StaleRecordError):
        reset_down(s, (2, 1), rec)


def test_overlap_and_fidelity():
    a = basis_state(2, 1)
    assert fidelity(a, a) == pytest.approx(1.0)
    assert fidelity(basis_state(2, 0), basis_state(2, 3)) == 0.0
    plus = apply_1q(basis_state(1, 0), H_MAT, 0)
    assert overlap(basis_state(1, 0), plus) == pytest.approx(1 / np.sqrt(2))
    with pytest.raises(DimensionMismatchError):
        overlap(basis_state(1, 0), basis_state(2, 0))


def test_expectation_on_eigenvector():
    h = sum_matrix(ising_hamiltonian(IsingParams(3, 1.5)))
    es = eigh(h)
    for k in (0, 3, 7):
        s = StateVector(3, es.vectors[:, k].astype(complex))
        assert expectation(s, h) == pytest.approx(es.values[k], abs=1e-10)


def test_reduced_overlaps_complete_basis_sums_to_one():
    rng = np.random.default_rng(12)
    h = sum_matrix(ising_hamiltonian(IsingParams(2, 0.9)))
    es = eigh(h)
    s = init_comb_product(random_target_state(2, rng), 2)
    # entangle target and comb a bit
    apply_2q(s, CNOT_MAT, 0, 2)
    ov = reduced_overlaps(s, 2, es.vectors)
    assert ov.sum() == pytest.approx(1.0, abs=1e-12)


def test_target_energy_matches_embedded_expectation():
    rng = np.random.default_rng(13)
    h = sum_matrix(ising_hamiltonian(IsingParams(2, 1.4)))
    s = init_comb_product(random_target_state(2, rng), 2)
    apply_2q(s, CNOT_MAT, 1, 3)
    embedded = np.kron(np.eye(4), h)
    assert target_energy(s, h, 2) == pytest.approx(expectation(s, embedded), abs=1e-12)
