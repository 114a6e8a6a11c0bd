"""Wavefunction engine: gate kernels, dense evolution, measurement and reset.

Amplitude layout follows the package convention: qubit 0 is the
least-significant bit, target qubits sit in the low bits and comb qubits in
the high bits, so the full state reshapes to (comb_dim, target_dim) row-major.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    NonUnitaryError,
    QubitOutOfRangeError,
    StaleRecordError,
    ZeroNormProjectionError,
)
from .pauli import UNITARITY_TOL

Rng = np.random.Generator


@dataclass
class StateVector:
    """Normalized complex amplitudes over 2**nqubits basis states."""

    nqubits: int
    amplitudes: np.ndarray

    def copy(self) -> "StateVector":
        return StateVector(self.nqubits, self.amplitudes.copy())

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class MeasurementRecord:
    """Outcome of a projective z-basis measurement of a qubit subset."""

    qubits: tuple[int, ...]
    outcome: tuple[int, ...]
    probability: float


def basis_state(nqubits: int, index: int = 0) -> StateVector:
    amps = np.zeros(2**nqubits, dtype=complex)
    amps[index] = 1.0
    return StateVector(nqubits, amps)


def random_target_state(nt: int, rng: Rng) -> StateVector:
    """Haar-random state: normalized complex standard-normal amplitudes."""
    amps = rng.standard_normal(2**nt) + 1j * rng.standard_normal(2**nt)
    return StateVector(nt, amps / np.linalg.norm(amps))


def init_comb_product(target_state: StateVector, nc: int) -> StateVector:
    """target (x) |0...0> on the comb; target amplitudes land in the low bits."""
    comb = np.zeros(2**nc, dtype=complex)
    comb[0] = 1.0
    return StateVector(target_state.nqubits + nc, np.kron(comb, target_state.amplitudes))


def _check_qubit(q: int, n: int) -> None:
    if not 0 <= q < n:
        raise QubitOutOfRangeError(f"qubit {q} outside register of {n}")


def _check_unitary(gate: np.ndarray, dim: int) -> None:
    if gate.shape != (dim, dim):
        raise DimensionMismatchError(f"expected a {dim}x{dim} gate, got {gate.shape}")
    if np.max(np.abs(gate.conj().T @ gate - np.eye(dim))) > UNITARITY_TOL:
        raise NonUnitaryError("gate is not unitary within tolerance")


def _apply_1q_array(arr: np.ndarray, gate: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """Apply a 2x2 gate to axis ``qubit`` of an array whose first dimension is
    the 2**n state index; trailing dimensions are carried as a batch."""
    batch = arr.shape[1:]
    psi = arr.reshape([2] * n + list(batch))
    axis = n - 1 - qubit
    psi = np.moveaxis(psi, axis, 0)
    out = np.tensordot(gate, psi, axes=([1], [0]))
    return np.moveaxis(out, 0, axis).reshape(arr.shape)


def _apply_2q_array(
    arr: np.ndarray, gate: np.ndarray, q_hi: int, q_lo: int, n: int
) -> np.ndarray:
    """Apply a 4x4 gate; ``q_hi`` is the high bit of the gate's 2-qubit index."""
    batch = arr.shape[1:]
    psi = arr.reshape([2] * n + list(batch))
    ax_hi, ax_lo = n - 1 - q_hi, n - 1 - q_lo
    psi = np.moveaxis(psi, (ax_hi, ax_lo), (0, 1))
    shape = psi.shape
    out = np.tensordot(gate, psi.reshape((4,) + shape[2:]), axes=([1], [0]))
    out = np.moveaxis(out.reshape(shape), (0, 1), (ax_hi, ax_lo))
    return out.reshape(arr.shape)


def apply_1q(state: StateVector, gate: np.ndarray, qubit: int) -> StateVector:
    gate = np.asarray(gate, dtype=complex)
    _check_unitary(gate, 2)
    _check_qubit(qubit, state.nqubits)
    state.amplitudes = _apply_1q_array(state.amplitudes, gate, qubit, state.nqubits)
    return state

def apply_2q(state: StateVector, gate: np.ndarray, q_hi: int, q_lo: int) -> StateVector:
    """Two-qubit gate; the first listed qubit is the high bit of the gate basis
    (a CNOT matrix with the control as high bit is applied as
    ``apply_2q(state, CNOT, control, target)``)."""
    gate = np.asarray(gate, dtype=complex)
    _check_unitary(gate, 4)
    _check_qubit(q_hi, state.nqubits)
    _check_qubit(q_lo, state.nqubits)
    if q_hi == q_lo:
        raise QubitOutOfRangeError("two-qubit gate needs distinct qubits")
    state.amplitudes = _apply_2q_array(state.amplitudes, gate, q_hi, q_lo, state.nqubits)
    return state


def apply_dense(state: StateVector, u: np.ndarray, start_qubit: int = 0) -> StateVector:
    """Apply a dense unitary on the contiguous qubits [start, start + k)."""
    u = np.asarray(u, dtype=complex)
    dim = u.shape[0]
    k = dim.bit_length() - 1
    if u.shape != (dim, dim) or 2**k != dim:
        raise DimensionMismatchError(f"operator shape {u.shape} is not a square power of two")
    n = state.nqubits
    if start_qubit < 0 or start_qubit + k > n:
        raise DimensionMismatchError("operator does not fit the register")
    if np.max(np.abs(u.conj().T @ u - np.eye(dim))) > UNITARITY_TOL:
        raise NonUnitaryError("operator is not unitary within tolerance")
    if k == n:
        state.amplitudes = u @ state.amplitudes
        return state
    low = 2**start_qubit
    high = 2 ** (n - start_qubit - k)
    psi = state.amplitudes.reshape(high, dim, low)
    state.amplitudes = np.einsum("ij,ajb->aib", u, psi).reshape(-1)
    return state


def measure_subset(
    state: StateVector, qubits: tuple[int, ...], rng: Rng
) -> tuple[StateVector, MeasurementRecord]:
    """Projective z measurement of ``qubits``; Born-rule sampled with a single
    uniform draw against the cumulative marginal (edge ties go to the lower
    outcome index).  The state is projected and renormalized."""
    qubits = tuple(qubits)
    n = state.nqubits
    for q in qubits:
        _check_qubit(q, n)
    if len(set(qubits)) != len(qubits):
        raise QubitOutOfRangeError("measured qubits must be distinct")
    k = len(qubits)
    axes = [n - 1 - q for q in qubits]
    probs = np.abs(state.amplitudes.reshape([2] * n)) ** 2
    marg = np.moveaxis(probs, axes, range(k)).reshape(2**k, -1).sum(axis=1)
    marg = marg / marg.sum()
    cum = np.cumsum(marg)
    idx = min(int(np.searchsorted(cum, rng.random(), side="left")), 2**k - 1)
    if marg[idx] <= 0.0:
        raise ZeroNormProjectionError("sampled outcome has zero probability")
    outcome = tuple((idx >> (k - 1 - j)) & 1 for j in range(k))

    psi = np.moveaxis(state.amplitudes.reshape([2] * n), axes, range(k))
    kept = psi[tuple(outcome)]
    weight = float(np.sum(np.abs(kept) ** 2))
    if weight <= 0.0:
        raise ZeroNormProjectionError("projection annihilated the state")
    projected = np.zeros_like(psi)
    projected[tuple(outcome)] = kept / np.sqrt(weight)
    state.amplitudes = np.moveaxis(projected, range(k), axes).reshape(-1)
    return state, MeasurementRecord(qubits, outcome, weight)


_X_GATE = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def reset_down(state: StateVector, qubits: tuple[int, ...], record: MeasurementRecord) -> StateVector:
    """Classical feed-forward reset: X on every measured qubit that read 1."""
    if tuple(qubits) != record.qubits:
        raise StaleRecordError("record does not match the qubits being reset")
    for q, bit in zip(record.qubits, record.outcome):
        if bit:
            apply_1q(state, _X_GATE, q)
    return state


def overlap(a: StateVector, b: StateVector) -> complex:
    if a.nqubits != b.nqubits:
        raise DimensionMismatchError("states live on different registers")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: StateVector, b: StateVector) -> float:
    return abs(overlap(a, b)) ** 2


def expectation(state: StateVector, op: np.ndarray) -> float:
    op = np.asarray(op)
    if op.shape != (state.amplitudes.size,) * 2:
        raise DimensionMismatchError("operator dimension does not match the state")
    return float(np.real(np.vdot(state.amplitudes, op @ state.amplitudes)))


def reduced_overlaps(state: StateVector, nt: int, vectors: np.ndarray) -> np.ndarray:
    """Comb-traced populations sum_c |<v_k, c|psi>|^2 for target vectors v_k.

    ``vectors`` holds one target-space column per requested state.
    """
    if vectors.shape[0] != 2**nt:
        raise DimensionMismatchError("target vectors do not match nt")
    psi = state.amplitudes.reshape(-1, 2**nt)
    proj = psi @ vectors.conj()
    return np.sum(np.abs(proj) ** 2, axis=0)


def target_energy(state: StateVector, h_targ: np.ndarray, nt: int) -> float:
    """<psi| H_targ (x) 1 |psi> without building the embedded operator."""
    if h_targ.shape != (2**nt, 2**nt):
        raise DimensionMismatchError("target Hamiltonian does not match nt")
    psi = state.amplitudes.reshape(-1, 2**nt)
    return float(np.real(np.sum(psi.conj() * (psi @ h_targ.T))))
