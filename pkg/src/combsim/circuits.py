"""Gate-level Trotter-step circuits for target, comb and interaction.

Every block below is an exact product of Pauli-term exponentials: a z-rotation
Rz(theta) = diag(e^{-i theta}, e^{i theta}) conjugated by CNOT ladders and
per-qubit basis changes (H for the x axis, S-dagger then H for the y axis).
The companion ``*_step_terms`` functions list those Pauli terms in circuit
order, so densified circuits reproduce the ordered exponential product to
machine precision.

SWAP gates are never emitted: all-to-all connectivity is assumed and they
would not change the unitary, only wire placement.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import statevector as sv
from .errors import TooLargeError, UnsupportedCouplingError
from .models import (
    ONE_BODY_X,
    CombParams,
    IsingParams,
    InteractionParams,
    comb_pairs,
    comb_triples,
    nu_schedule,
    triple_ladder_sum,
)
from .pauli import PauliString, expand_ladder, string_matrix

H_MAT = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)
S_MAT = np.array([[1.0, 0.0], [0.0, 1.0j]], dtype=complex)
SDG_MAT = S_MAT.conj().T
CNOT_MAT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
SWAP_MAT = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def rz_matrix(theta: float) -> np.ndarray:
    return np.array([[np.exp(-1j * theta), 0.0], [0.0, np.exp(1j * theta)]], dtype=complex)


@dataclass(frozen=True)
class Gate:
    """One elementary gate; kind in {H, S, SDG, RZ, CNOT, SWAP}."""

    kind: str
    qubits: tuple[int, ...]
    theta: float | None = None

    def dump(self) -> str:
        parts = [self.kind, *map(str, self.qubits)]
        if self.theta is not None:
            parts.append(f"{self.theta:.17g}")
        return " ".join(parts)


@dataclass
class Circuit:
    nqubits: int
    gates: list[Gate] = field(default_factory=list)

    def _add(self, kind: str, qubits: tuple[int, ...], theta: float | None = None) -> None:
        for q in qubits:
            if not 0 <= q < self.nqubits:
                raise ValueError(f"qubit {q} outside register of {self.nqubits}")
        self.gates.append(Gate(kind, qubits, theta))

    def h(self, q: int) -> None:
        self._add("H", (q,))

    def s(self, q: int) -> None:
        self._add("S", (q,))

    def sdg(self, q: int) -> None:
        self._add("SDG", (q,))

    def rz(self, q: int, theta: float) -> None:
        self._add("RZ", (q,), theta)

    def cnot(self, control: int, target: int) -> None:
        self._add("CNOT", (control, target))

    def swap(self, a: int, b: int) -> None:
        self._add("SWAP", (a, b))

    def extend(self, other: "Circuit", offset: int = 0) -> None:
        """Append another circuit with its qubit indices shifted by ``offset``."""
        for g in other.gates:
            self._add(g.kind, tuple(q + offset for q in g.qubits), g.theta)

    @property
    def n_rotations(self) -> int:
        return sum(1 for g in self.gates if g.kind == "RZ")

    def dump(self) -> str:
        return "\n".join(g.dump() for g in self.gates)


@dataclass(frozen=True)
class GateCount:
    """Closed-form per-Trotter-step gate budget (SWAPs excluded)."""

    total: int
    rotations: int
    target: int
    comb: int
    interaction: int
    target_rotations: int
    comb_rotations: int
    interaction_rotations: int


def gate_count(nt: int, nc: int, with_b: bool = False) -> GateCount:
    """Evaluate the per-step gate and rotation counts for given register sizes."""
    if nt < 1 or nc < 3:
        raise ValueError("need nt >= 1 and nc >= 3")
    target = 6 * nt + (nt if with_b else 0)
    triples = 1 if nc == 3 else nc
    comb = nc + 46 * triples
    interaction = nc * (5 * nt + 2 * (7 * nt) + 14)
    target_rot = 2 * nt + (nt if with_b else 0)
    comb_rot = nc + 4 * triples
    interaction_rot = nc * (3 * nt)
    return GateCount(
        total=target + comb + interaction,
        rotations=target_rot + comb_rot + interaction_rot,
        target=target,
        comb=comb,
        interaction=interaction,
        target_rotations=target_rot,
        comb_rotations=comb_rot,
        interaction_rotations=interaction_rot,
    )


# --------------------------------------------------------------------------
# Trotter term sequences (coefficient, axes) in the order the circuits apply
# them; the exponential of each term is exp(-i coeff dt P).


def target_step_terms(p: IsingParams) -> list[tuple[float, str]]:
    terms = []
    for i in range(p.nt):
        axes = ["I"] * p.nt
        axes[i] = "X"
        terms.append((-p.h, "".join(axes)))
    bonds = range(p.nt) if p.periodic else range(p.nt - 1)
    for i in bonds:
        axes = ["I"] * p.nt
        axes[i] = "Z"
        axes[(i + 1) % p.nt] = "Z"
        terms.append((-1.0, "".join(axes)))
    if p.b != 0.0:
        for i in range(p.nt):
            axes = ["I"] * p.nt
            axes[i] = "Z"
            terms.append((p.b, "".join(axes)))
    return terms


def _single_triple_sum(nc: int, kappa_phi: float, ijk: tuple[int, int, int]):
    """kappa phi (sigma+ sigma- sigma- + h.c.) on one triple of comb sites."""
    symbols = ["I"] * nc
    i, j, k = ijk
    symbols[i], symbols[j], symbols[k] = "+", "-", "-"
    return kappa_phi * expand_ladder("".join(symbols))


def _triple_patterns(i: int, j: int, k: int, nc: int) -> list[str]:
    """Axis strings (XXX, XYY, YXY, YYX on sites i, j, k) in block order."""
    patterns = []
    for paulis in (("X", "X", "X"), ("X", "Y", "Y"), ("Y", "X", "Y"), ("Y", "Y", "X")):
        axes = ["I"] * nc
        axes[i], axes[j], axes[k] = paulis
        patterns.append("".join(axes))
    return patterns


def comb_step_terms(p: CombParams, nu: float) -> list[tuple[float, str]]:
    terms = []
    for i in range(p.nc):
        axes = ["I"] * p.nc
        axes[i] = "Z"
        terms.append((-nu / 2.0, "".join(axes)))
    if p.kappa == 0.0 or p.nc < 3:
        return terms
    if p.nc == 3:
        # All cyclic triples share the three sites, so their expansions merge
        # into one four-rotation block; read the merged weights back out.
        merged = triple_ladder_sum(p.nc, p.kappa, p.phis)
        for axes in _triple_patterns(0, 1, 2, p.nc):
            terms.append((merged.coefficient(axes), axes))
    else:
        for phi, (i, j, k) in zip(p.phis, comb_triples(p.nc)):
            single = _single_triple_sum(p.nc, p.kappa * phi, (i, j, k))
            for axes in _triple_patterns(i, j, k, p.nc):
                terms.append((single.coefficient(axes), axes))
    return terms


def interaction_step_terms(
    ip: InteractionParams, p: IsingParams, nc: int
) -> list[tuple[float, str]]:
    if ip.mode != ONE_BODY_X:
        raise UnsupportedCouplingError("gate decomposition exists only for one_body_x")
    nt = p.nt
    n = nt + nc
    terms = []
    for c in range(nc):  # one-body comb blocks
        for t in range(nt):
            axes = ["I"] * n
            axes[t], axes[nt + c] = "X", "X"
            terms.append((-2.0 * ip.g * p.h, "".join(axes)))
    for i, j in comb_pairs(nc):  # pair blocks: XX part then YY part
        for pauli, sign in (("X", -0.5), ("Y", 0.5)):
            for t in range(nt):
                axes = ["I"] * n
                axes[t] = "X"
                axes[nt + i], axes[nt + j] = pauli, pauli
                terms.append((sign * ip.g * p.h, "".join(axes)))
    return terms


# --------------------------------------------------------------------------
# Circuit builders.


def target_step_circuit(p: IsingParams, dt: float) -> Circuit:
    """Propagator circuit for one target Trotter step.

    Per qubit H Rz(-h dt) H for the transverse field, per bond a CNOT-conjugated
    Rz(-dt), and one Rz(b dt) per qubit when the longitudinal field is on:
    6 N_t gates (+ N_t with the field) for the periodic chain.
    """
    circ = Circuit(p.nt)
    for i in range(p.nt):
        circ.h(i)
        circ.rz(i, -p.h * dt)
        circ.h(i)
    bonds = range(p.nt) if p.periodic else range(p.nt - 1)
    for i in bonds:
        j = (i + 1) % p.nt
        circ.cnot(i, j)
        circ.rz(j, -dt)
        circ.cnot(i, j)
    if p.b != 0.0:
        for i in range(p.nt):
            circ.rz(i, p.b * dt)
    return circ


def _ladder_core(circ: Circuit, qubits: tuple[int, ...], theta: float) -> None:
    """CNOT-ladder conjugated Rz realizing exp(-i theta Z...Z) on ``qubits``."""
    for a, b in zip(qubits, qubits[1:]):
        circ.cnot(a, b)
    circ.rz(qubits[-1], theta)
    for a, b in reversed(list(zip(qubits, qubits[1:]))):
        circ.cnot(a, b)


def _open_y(circ: Circuit, q: int) -> None:
    circ.sdg(q)
    circ.h(q)


def _close_y(circ: Circuit, q: int) -> None:
    circ.h(q)
    circ.s(q)


def _triple_block(circ: Circuit, a: int, b: int, c: int, thetas) -> None:
    """46-gate three-spin block: rotations about XXX, XYY, YXY and YYX on
    (a, b, c), with the basis changes between consecutive rotations merged."""
    th_xxx, th_xyy, th_yxy, th_yyx = thetas
    circ.h(a)
    circ.h(b)
    circ.h(c)
    _ladder_core(circ, (a, b, c), th_xxx)  # XXX
    circ.h(b)
    _open_y(circ, b)
    circ.h(c)
    _open_y(circ, c)
    _ladder_core(circ, (a, b, c), th_xyy)  # X on a, Y on b and c
    circ.h(a)
    _close_y(circ, b)
    _open_y(circ, a)
    circ.h(b)
    _ladder_core(circ, (a, b, c), th_yxy)  # Y on a, X on b, Y on c
    circ.h(b)
    _open_y(circ, b)
    _close_y(circ, c)
    circ.h(c)
    _ladder_core(circ, (a, b, c), th_yyx)  # Y on a and b, X on c
    _close_y(circ, a)
    _close_y(circ, b)
    circ.h(c)


def comb_step_circuit(p: CombParams, t: float, dt: float) -> Circuit:
    """Propagator circuit for one comb Trotter step at time t.

    One Rz(-nu(t) dt / 2) per site for the swept level spacing (the sign makes
    all-down the low-energy state), then one 46-gate block per three-spin
    rotation group: a single merged block when nc == 3, one block per cyclic
    triple otherwise.
    """
    if p.nc < 3:
        raise ValueError("comb circuits need nc >= 3")
    nu = nu_schedule(p.nu0, p.tf, t)
    circ = Circuit(p.nc)
    for i in range(p.nc):
        circ.rz(i, -nu * dt / 2.0)
    if p.kappa == 0.0:
        return circ
    if p.nc == 3:
        merged = triple_ladder_sum(p.nc, p.kappa, p.phis)
        thetas = [merged.coefficient(axes) * dt for axes in _triple_patterns(0, 1, 2, 3)]
        _triple_block(circ, 0, 1, 2, thetas)
    else:
        for phi, (i, j, k) in zip(p.phis, comb_triples(p.nc)):
            single = _single_triple_sum(p.nc, p.kappa * phi, (i, j, k))
            thetas = [
                single.coefficient(axes) * dt for axes in _triple_patterns(i, j, k, p.nc)
            ]
            _triple_block(circ, i, j, k, thetas)
    return circ


def _a1_block(circ: Circuit, nt: int, c: int, theta: float) -> None:
    """One-body coupling block: exp(-i theta X_t X_c) for every target qubit."""
    circ.h(c)
    for t in range(nt):
        circ.h(t)
    for t in range(nt):
        circ.cnot(t, c)
        circ.rz(c, theta)
        circ.cnot(t, c)
    for t in range(nt):
        circ.h(t)
    circ.h(c)


def _a2_block(circ: Circuit, nt: int, ci: int, cj: int, theta: float, y_basis: bool) -> None:
    """Pair coupling block: exp(-i theta X_t B_ci B_cj) for every target qubit,
    with B = Y when ``y_basis`` else X."""
    for q in (ci, cj):
        _open_y(circ, q) if y_basis else circ.h(q)
    for t in range(nt):
        circ.h(t)
    for t in range(nt):
        circ.cnot(t, ci)
        circ.cnot(ci, cj)
        circ.rz(cj, theta)
        circ.cnot(ci, cj)
        circ.cnot(t, ci)
    for t in range(nt):
        circ.h(t)
    for q in (ci, cj):
        _close_y(circ, q) if y_basis else circ.h(q)


def interaction_step_circuit(
    ip: InteractionParams, p: IsingParams, nc: int, dt: float
) -> Circuit:
    """Propagator circuit for one interaction Trotter step on nt + nc qubits.

    Only the one-body-x coupling has a gate realization; per comb site one
    A1 block, per cyclic comb pair one XX and one YY A2 block, for
    N_c (5 N_t + 2 * 7 N_t + 14) gates.
    """
    if ip.mode != ONE_BODY_X:
        raise UnsupportedCouplingError("gate decomposition exists only for one_body_x")
    if nc < 3:
        raise ValueError("interaction circuits need nc >= 3")
    circ = Circuit(p.nt + nc)
    for c in range(nc):
        _a1_block(circ, p.nt, p.nt + c, -2.0 * ip.g * p.h * dt)
    for i, j in comb_pairs(nc):
        _a2_block(circ, p.nt, p.nt + i, p.nt + j, -0.5 * ip.g * p.h * dt, y_basis=False)
        _a2_block(circ, p.nt, p.nt + i, p.nt + j, 0.5 * ip.g * p.h * dt, y_basis=True)
    return circ


def trotter_step_circuit(
    ising: IsingParams,
    comb: CombParams,
    inter: InteractionParams,
    t: float,
    dt: float,
) -> Circuit:
    """Full first-order step: target, then comb, then interaction propagator."""
    circ = Circuit(ising.nt + comb.nc)
    circ.extend(target_step_circuit(ising, dt))
    circ.extend(comb_step_circuit(comb, t, dt), offset=ising.nt)
    circ.extend(interaction_step_circuit(inter, ising, comb.nc, dt))
    return circ


def trotter_step_terms(
    ising: IsingParams, comb: CombParams, inter: InteractionParams, nu: float
) -> list[tuple[float, str]]:
    """Ordered (coefficient, axes) Trotter terms of the full step."""
    nt, nc = ising.nt, comb.nc
    pad_c, pad_t = "I" * nc, "I" * nt
    terms = [(c, axes + pad_c) for c, axes in target_step_terms(ising)]
    terms += [(c, pad_t + axes) for c, axes in comb_step_terms(comb, nu)]
    terms += interaction_step_terms(inter, ising, nc)
    return terms


# --------------------------------------------------------------------------
# Execution and verification.

_FIXED_1Q = {"H": H_MAT, "S": S_MAT, "SDG": SDG_MAT}


def _gate_matrix(g: Gate) -> np.ndarray:
    if g.kind in _FIXED_1Q:
        return _FIXED_1Q[g.kind]
    if g.kind == "RZ":
        return rz_matrix(g.theta)
    if g.kind == "CNOT":
        return CNOT_MAT
    if g.kind == "SWAP":
        return SWAP_MAT
    raise ValueError(f"unknown gate kind {g.kind!r}")


def run_circuit(circuit: Circuit, state: sv.StateVector) -> sv.StateVector:
    """Apply the circuit's gates to the state, left to right."""
    if state.nqubits != circuit.nqubits:
        raise ValueError("circuit and state register sizes differ")
    for g in circuit.gates:
        mat = _gate_matrix(g)
        if len(g.qubits) == 1:
            sv.apply_1q(state, mat, g.qubits[0])
        else:
            sv.apply_2q(state, mat, g.qubits[0], g.qubits[1])
    return state


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary of the circuit (registers up to 8 qubits)."""
    if circuit.nqubits > 8:
        raise TooLargeError("circuit_unitary supports at most 8 qubits")
    n = circuit.nqubits
    u = np.eye(2**n, dtype=complex)
    for g in circuit.gates:
        mat = _gate_matrix(g)
        if len(g.qubits) == 1:
            u = sv._apply_1q_array(u, mat, g.qubits[0], n)
        else:
            u = sv._apply_2q_array(u, mat, g.qubits[0], g.qubits[1], n)
    return u


def terms_unitary(terms: list[tuple[float, str]], dt: float) -> np.ndarray:
    """Ordered product of exact term exponentials prod exp(-i c_k dt P_k),
    first term applied first (rightmost in the operator product)."""
    if not terms:
        raise ValueError("no terms")
    dim = 2 ** len(terms[0][1])
    u = np.eye(dim, dtype=complex)
    eye = np.eye(dim)
    for coeff, axes in terms:
        # P^2 = 1 for a phase-free Pauli string, so the exponential is exact.
        pmat = string_matrix(PauliString(axes))
        theta = coeff * dt
        u = (np.cos(theta) * eye - 1j * np.sin(theta) * pmat) @ u
    return u
