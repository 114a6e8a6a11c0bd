"""Pauli-string algebra and dense Hermitian linear algebra for small registers.

Conventions used everywhere in this package:

* qubit 0 is the least-significant bit of the computational basis index,
* a string stores one axis character per qubit, so ``axes[k]`` acts on qubit k,
* spin-down is computational |0> and spin-up is |1>, which makes the number
  operator (1 - Z)/2 count up-spins.

Registers stay small (<= 10 qubits), so operators are dense complex matrices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, NotHermitianError

HERMITICITY_TOL = 1e-10
UNITARITY_TOL = 1e-10

AXIS_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

# Single-qubit products a*b -> (phase, axis), e.g. X*Y = i Z.
_AXIS_MUL = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}

# Ladder symbols expanded over the Pauli basis.  With |0> = spin-down the
# raising operator is |1><0| = (X - iY)/2; the opposite sign choice is
# unobservable once the Hermitian conjugate is added.
_LADDER_EXPANSION = {
    "I": ((1.0, "I"),),
    "Z": ((1.0, "Z"),),
    "+": ((0.5, "X"), (-0.5j, "Y")),
    "-": ((0.5, "X"), (0.5j, "Y")),
}


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis with a unit phase in {+-1, +-i}."""

    axes: str
    phase: complex = 1.0 + 0.0j

    def __post_init__(self):
        if any(a not in "IXYZ" for a in self.axes):
            raise ValueError(f"invalid Pauli axes {self.axes!r}")

    @property
    def nqubits(self) -> int:
        return len(self.axes)

    def __mul__(self, other: "PauliString") -> "PauliString":
        if len(self.axes) != len(other.axes):
            raise DimensionMismatchError("Pauli strings act on different register sizes")
        phase = self.phase * other.phase
        axes = []
        for a, b in zip(self.axes, other.axes):
            p, c = _AXIS_MUL[(a, b)]
            phase *= p
            axes.append(c)
        return PauliString("".join(axes), phase)


def string_matrix(s: PauliString) -> np.ndarray:
    """Dense matrix of a Pauli string, qubit 0 as the least-significant bit."""
    out = np.array([[s.phase]], dtype=complex)
    for axis in s.axes:  # low qubit first => kron new axis on the left
        out = np.kron(AXIS_MATS[axis], out)
    return out


class WeightedPauliSum:
    """Hermitian operator stored as real weights on phase-free Pauli strings.

    Terms with equal strings are merged on construction and exact zeros are
    dropped, so the term list is canonical.
    """

    def __init__(self, nqubits: int, terms=()):
        self.nqubits = nqubits
        acc: dict[str, float] = {}
        for coeff, axes in terms:
            if len(axes) != nqubits:
                raise DimensionMismatchError(
                    f"term {axes!r} has {len(axes)} axes, register has {nqubits}"
                )
            acc[axes] = acc.get(axes, 0.0) + float(coeff)
        self.terms: list[tuple[float, str]] = [
            (c, axes) for axes, c in acc.items() if c != 0.0
        ]

    def __add__(self, other: "WeightedPauliSum") -> "WeightedPauliSum":
        if other.nqubits != self.nqubits:
            raise DimensionMismatchError("cannot add sums on different registers")
        return WeightedPauliSum(self.nqubits, self.terms + other.terms)

    def __mul__(self, scale: float) -> "WeightedPauliSum":
        return WeightedPauliSum(self.nqubits, [(scale * c, a) for c, a in self.terms])

    __rmul__ = __mul__

    def embed(self, nqubits: int, offset: int = 0) -> "WeightedPauliSum":
        """Pad with identities into a larger register starting at ``offset``."""
        if offset + self.nqubits > nqubits:
            raise DimensionMismatchError("embedded sum does not fit the register")
        pre, post = "I" * offset, "I" * (nqubits - offset - self.nqubits)
        return WeightedPauliSum(nqubits, [(c, pre + a + post) for c, a in self.terms])

    def coefficient(self, axes: str) -> float:
        for c, a in self.terms:
            if a == axes:
                return c
        return 0.0

    def __repr__(self):
        body = " + ".join(f"{c:g}*{a}" for c, a in self.terms) or "0"
        return f"WeightedPauliSum({self.nqubits}, {body})"


def sum_matrix(h: WeightedPauliSum) -> np.ndarray:
    """Densify a weighted Pauli sum."""
    dim = 2**h.nqubits
    out = np.zeros((dim, dim), dtype=complex)
    for coeff, axes in h.terms:
        out += coeff * string_matrix(PauliString(axes))
    return out


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues and matching orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def _require_hermitian(m: np.ndarray) -> None:
    scale = max(np.linalg.norm(m), 1.0)
    if np.linalg.norm(m - m.conj().T) > HERMITICITY_TOL * scale:
        raise NotHermitianError("matrix is not Hermitian within tolerance")


def eigh(m: np.ndarray) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix, values ascending."""
    _require_hermitian(m)
    values, vectors = np.linalg.eigh(m)
    return EigenSystem(values, vectors)


def expm_hermitian(m: np.ndarray, t: float) -> np.ndarray:
    """Unitary exp(-i m t) through the eigendecomposition of Hermitian m."""
    es = eigh(m)
    phases = np.exp(-1j * es.values * t)
    return (es.vectors * phases) @ es.vectors.conj().T


def eigh_stack(ms: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched eigendecomposition; real-symmetric stacks take the faster real
    LAPACK path (every Hamiltonian here has an even number of Y factors per
    term, hence a real matrix)."""
    if np.iscomplexobj(ms) and not np.any(ms.imag):
        ms = ms.real
    return np.linalg.eigh(ms)


def expm_hermitian_stack(ms: np.ndarray, t: float, chunk: int = 512) -> np.ndarray:
    """exp(-i m t) for a stack of Hermitian matrices, batched through eigh.

    Skips the per-matrix Hermiticity check; callers construct the stack from
    Hermitian pieces.  Chunked so large sweeps stay within memory.
    """
    out = np.empty(ms.shape, dtype=complex)
    for lo in range(0, ms.shape[0], chunk):
        values, vectors = eigh_stack(ms[lo : lo + chunk])
        phases = np.exp(-1j * values * t)
        out[lo : lo + chunk] = (vectors * phases[:, None, :]) @ np.conj(
            np.swapaxes(vectors, -1, -2)
        )
    return out


def expand_ladder(symbols: str) -> WeightedPauliSum:
    """Pauli expansion of a ladder-operator product plus its Hermitian conjugate.

    ``symbols`` holds one of ``I Z + -`` per qubit, e.g. ``"+--"`` for the
    three-site term sigma^+ sigma^- sigma^-.  The conjugate is always added,
    so the imaginary parts cancel and the result has real weights.
    """
    acc: dict[str, complex] = {}
    for combo in itertools.product(*(_LADDER_EXPANSION[s] for s in symbols)):
        coeff = 1.0 + 0.0j
        axes = []
        for c, a in combo:
            coeff *= c
            axes.append(a)
        key = "".join(axes)
        acc[key] = acc.get(key, 0.0) + coeff
    # M + M^dag on Hermitian strings doubles the real part of each weight.
    return WeightedPauliSum(
        len(symbols), [(2.0 * c.real, axes) for axes, c in acc.items() if c.real != 0.0]
    )
