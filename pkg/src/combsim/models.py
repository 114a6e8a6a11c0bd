"""Hamiltonians for comb-assisted ground-state preparation.

Builds the transverse-field Ising target (with optional longitudinal field),
the auxiliary comb register with its linearly swept level spacing, and the
target-comb coupling, then assembles the dense total Hamiltonian.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, OutOfRangeError
from .pauli import WeightedPauliSum, eigh, expand_ladder, sum_matrix

ONE_BODY_X = "one_body_x"
RANDOM_PATTERN = "random_pattern"


@dataclass(frozen=True)
class IsingParams:
    """1D Ising chain: -h sum X_i - sum Z_i Z_{i+1} + b sum Z_i."""

    nt: int
    h: float
    b: float = 0.0
    periodic: bool = True

    def __post_init__(self):
        if self.nt < 2:
            raise ValueError("nt must be at least 2")


@dataclass(frozen=True)
class CombParams:
    """Comb register: level spacing nu swept from nu0 to 0 over tf, plus a
    weak three-spin scrambling term kappa with per-triple couplings phis."""

    nc: int
    nu0: float
    kappa: float
    tf: float
    phis: tuple[float, ...] = ()

    def __post_init__(self):
        if self.nu0 <= 0 or self.tf <= 0:
            raise ValueError("nu0 and tf must be positive")
        n_triples = self.nc if self.nc >= 3 else 0
        if self.kappa != 0.0 and len(self.phis) != n_triples:
            raise ValueError(f"need {n_triples} phi couplings, got {len(self.phis)}")


@dataclass(frozen=True)
class InteractionParams:
    """Target-comb coupling of strength g through operator A on the target."""

    g: float
    mode: str = ONE_BODY_X
    seed: int | None = None

    def __post_init__(self):
        if self.mode not in (ONE_BODY_X, RANDOM_PATTERN):
            raise ValueError(f"unknown coupling mode {self.mode!r}")


def uniform_phis(nc: int, seed: int, low: float = 0.5, high: float = 1.5) -> tuple[float, ...]:
    """Seeded random triple couplings, bounded away from zero."""
    n_triples = nc if nc >= 3 else 0
    rng = np.random.default_rng(seed)
    return tuple(rng.uniform(low, high, size=n_triples))


def ising_hamiltonian(p: IsingParams) -> WeightedPauliSum:
    """-h sum X_i - sum Z_i Z_{i+1} + b sum Z_i (bond indices wrap when periodic)."""
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
    return WeightedPauliSum(p.nt, terms)


def toy_target_hamiltonian(epsilon: float) -> WeightedPauliSum:
    """Single-qubit two-level stand-in target with excitation energy epsilon."""
    return WeightedPauliSum(1, [(epsilon / 2.0, "I"), (-epsilon / 2.0, "Z")])


def comb_triples(nc: int) -> list[tuple[int, int, int]]:
    """Cyclic nearest-neighbour triples of the comb ring (empty below 3 sites)."""
    if nc < 3:
        return []
    return [(i, (i + 1) % nc, (i + 2) % nc) for i in range(nc)]


def comb_pairs(nc: int) -> list[tuple[int, int]]:
    """Cyclic nearest-neighbour pairs of the comb ring."""
    if nc < 2:
        return []
    if nc == 2:
        return [(0, 1)]
    return [(i, (i + 1) % nc) for i in range(nc)]


def triple_ladder_sum(nc: int, kappa: float, phis: tuple[float, ...]) -> WeightedPauliSum:
    """kappa * sum over cyclic triples of phi_i (sigma+ sigma- sigma- + h.c.)."""
    out = WeightedPauliSum(nc)
    for phi, (i, j, k) in zip(phis, comb_triples(nc)):
        symbols = ["I"] * nc
        symbols[i], symbols[j], symbols[k] = "+", "-", "-"
        out = out + (kappa * phi) * expand_ladder("".join(symbols))
    return out


def comb_hamiltonian(p: CombParams, nu: float, include_shift: bool = False) -> WeightedPauliSum:
    """Comb Hamiltonian at level spacing nu.

    The one-body part is the number operator nu (1 - Z_i)/2 per site; by
    default its identity component is dropped (a global energy shift), leaving
    -(nu/2) Z_i, which is what the gate decomposition implements.  Pass
    ``include_shift=True`` to keep the shift so eigenvalues read
    nu * (number of up-spins).
    """
    if nu < 0:
        raise OutOfRangeError("nu must be non-negative")
    terms = []
    for i in range(p.nc):
        axes = ["I"] * p.nc
        axes[i] = "Z"
        terms.append((-nu / 2.0, "".join(axes)))
        if include_shift:
            terms.append((nu / 2.0, "I" * p.nc))
    one_body = WeightedPauliSum(p.nc, terms)
    if p.kappa == 0.0:
        return one_body
    return one_body + triple_ladder_sum(p.nc, p.kappa, p.phis)


def nu_schedule(nu0: float, tf: float, t: float) -> float:
    """Linear downward sweep nu0 (1 - t/tf) on 0 <= t <= tf."""
    if t < 0 or t > tf:
        raise OutOfRangeError(f"t={t} outside [0, {tf}]")
    return nu0 * (1.0 - t / tf)


def coupling_operator(ip: InteractionParams, p: IsingParams):
    """Target-side coupling operator A.

    ``one_body_x`` returns -h sum X_i as a WeightedPauliSum (the one-body part
    of the target Hamiltonian).  ``random_pattern`` returns a dense symmetric
    matrix with seeded uniform [-1, 1] entries wherever the densified target
    Hamiltonian is nonzero, and zeros elsewhere.
    """
    if ip.mode == ONE_BODY_X:
        terms = []
        for i in range(p.nt):
            axes = ["I"] * p.nt
            axes[i] = "X"
            terms.append((-p.h, "".join(axes)))
        return WeightedPauliSum(p.nt, terms)
    rng = np.random.default_rng(ip.seed)
    h_mat = sum_matrix(ising_hamiltonian(p))
    mask = np.abs(h_mat) > 0
    raw = rng.uniform(-1.0, 1.0, size=h_mat.shape) * mask
    return (raw + raw.T) / 2.0


def comb_side_coupling(nc: int) -> WeightedPauliSum:
    """Comb factor of the interaction: per cyclic pair (i, j) the expansion of
    (1 + sigma_i^+)(1 + sigma_j^+) - 1 plus h.c., i.e.
    X_i + X_j + (X_i X_j - Y_i Y_j)/2."""
    out = WeightedPauliSum(nc)
    for i, j in comb_pairs(nc):
        for sym_i, sym_j in (("+", "I"), ("I", "+"), ("+", "+")):
            symbols = ["I"] * nc
            symbols[i], symbols[j] = sym_i, sym_j
            out = out + expand_ladder("".join(symbols))
    return out


def interaction_hamiltonian(ip: InteractionParams, a_op, nc: int):
    """g * A (x) C with C the comb-side pair operator; h.c. already folded in.

    Returns a WeightedPauliSum on the full register when A is a Pauli sum, or
    a dense matrix when A is a dense coupling pattern.  Target qubits occupy
    the low bits, comb qubits the high bits.
    """
    comb_op = comb_side_coupling(nc)
    if isinstance(a_op, WeightedPauliSum):
        terms = [
            (ip.g * ca * cc, aa + ac)
            for ca, aa in a_op.terms
            for cc, ac in comb_op.terms
        ]
        return WeightedPauliSum(a_op.nqubits + nc, terms)
    comb_mat = sum_matrix(comb_op)
    return ip.g * np.kron(comb_mat, np.asarray(a_op, dtype=complex))


def _as_matrix(op) -> np.ndarray:
    return sum_matrix(op) if isinstance(op, WeightedPauliSum) else np.asarray(op, dtype=complex)


def total_hamiltonian(h_targ, h_comb, h_int, nt: int, nc: int) -> np.ndarray:
    """Dense H_targ (x) 1 + 1 (x) H_comb + H_int on nt + nc qubits."""
    targ = _as_matrix(h_targ)
    comb = _as_matrix(h_comb)
    inter = _as_matrix(h_int) if h_int is not None else 0.0
    dim_t, dim_c = 2**nt, 2**nc
    if targ.shape != (dim_t, dim_t) or comb.shape != (dim_c, dim_c):
        raise DimensionMismatchError("subsystem operator dimensions do not match nt/nc")
    out = np.kron(np.eye(dim_c), targ) + np.kron(comb, np.eye(dim_t))
    if h_int is not None:
        if np.shape(inter) != (dim_t * dim_c, dim_t * dim_c):
            raise DimensionMismatchError("interaction dimension does not match nt + nc")
        out = out + inter
    return out


def path_gap(p: IsingParams, b_from: float = 1.0, b_to: float = -1.0, n_grid: int = 201) -> float:
    """Minimum E1 - E0 along the longitudinal-field path from b_from to b_to."""
    if n_grid < 3:
        raise ValueError("n_grid must be at least 3")
    base = sum_matrix(ising_hamiltonian(IsingParams(p.nt, p.h, 0.0, p.periodic)))
    z_sum = sum_matrix(
        WeightedPauliSum(
            p.nt,
            [(1.0, "I" * i + "Z" + "I" * (p.nt - i - 1)) for i in range(p.nt)],
        )
    )
    gap = np.inf
    for b in np.linspace(b_from, b_to, n_grid):
        values = np.linalg.eigvalsh(base + b * z_sum)
        gap = min(gap, values[1] - values[0])
    return float(gap)


def ground_state(h) -> tuple[float, np.ndarray]:
    """Lowest eigenvalue and eigenvector of a Hamiltonian (sum or dense)."""
    es = eigh(_as_matrix(h))
    return float(es.values[0]), es.vectors[:, 0]
