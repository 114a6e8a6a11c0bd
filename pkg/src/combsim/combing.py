"""Spectral-combing driver: repeated downward sweeps of the comb spectrum with
measurement, reset and geometric rescaling of the sweep scale between passes.

A run couples the target chain to the comb register, drags the comb level
spacing from nu0 to zero over tf, measures and resets the comb, shrinks g and
nu0 by eta, and repeats.  Emulate mode steps with exact exponentials of the
instantaneous total Hamiltonian; circuit mode executes the gate decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import statevector as sv
from .circuits import run_circuit, trotter_step_circuit
from .errors import ConfigError, EmptySearchSpaceError
from .models import (
    ONE_BODY_X,
    RANDOM_PATTERN,
    CombParams,
    InteractionParams,
    IsingParams,
    coupling_operator,
    interaction_hamiltonian,
    ising_hamiltonian,
    triple_ladder_sum,
)
from .pauli import WeightedPauliSum, eigh, eigh_stack, expm_hermitian_stack, sum_matrix

EMULATE = "emulate"
CIRCUIT = "circuit"

FINAL_ENERGY = "final_energy"
NEG_GS_FIDELITY = "neg_gs_fidelity"

RANDOM_STATE = "random"
GROUND_B_PLUS1 = "ground_b_plus1"


@dataclass(frozen=True)
class CombingConfig:
    """Combing parameters: the sweep set {nu0, tf, kappa, g, dt, eta} plus run
    plumbing.  dt is carried as steps per iteration; dt = tf / steps."""

    nu0: float
    tf: float
    kappa: float
    g: float
    eta: float
    n_iters: int
    steps_per_iter: tuple[int, ...] | int
    nc: int = 3
    mode: str = EMULATE
    coupling: str = ONE_BODY_X
    coupling_seed: int | None = None
    phis: tuple[float, ...] | None = None  # None -> single coupling of 1 per triple
    seed: int = 0
    initial_state: str = RANDOM_STATE  # random | basis:<k> | ground_b_plus1
    k_overlaps: int | None = None  # None -> min(6, 2**nt)
    measure_last: bool = False
    record: bool = True

    def __post_init__(self):
        steps = self.steps_per_iter
        if isinstance(steps, int):
            steps = (steps,) * self.n_iters
        else:
            steps = tuple(int(s) for s in steps)
            if len(steps) == 1:
                steps = steps * self.n_iters
        object.__setattr__(self, "steps_per_iter", steps)
        if self.n_iters < 1:
            raise ConfigError("n_iters must be at least 1")
        if len(self.steps_per_iter) != self.n_iters:
            raise ConfigError("steps_per_iter length must equal n_iters")
        if any(s < 1 for s in self.steps_per_iter):
            raise ConfigError("every iteration needs at least one step")
        if not 0.0 < self.eta <= 1.0:
            raise ConfigError("eta must satisfy 0 < eta <= 1")
        if self.tf <= 0 or self.nu0 <= 0:
            raise ConfigError("tf and nu0 must be positive")
        if self.mode not in (EMULATE, CIRCUIT):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.mode == CIRCUIT and self.coupling != ONE_BODY_X:
            raise ConfigError("circuit mode supports only the one_body_x coupling")
        if self.coupling not in (ONE_BODY_X, RANDOM_PATTERN):
            raise ConfigError(f"unknown coupling {self.coupling!r}")

    def dt(self, iteration: int = 0) -> float:
        return self.tf / self.steps_per_iter[iteration]

    def resolved_phis(self) -> tuple[float, ...]:
        n_triples = self.nc if self.nc >= 3 else 0
        if self.phis is None:
            return (1.0,) * n_triples
        if len(self.phis) == 1:
            return tuple(self.phis) * n_triples
        if len(self.phis) != n_triples:
            raise ConfigError(f"need {n_triples} phis for nc={self.nc}")
        return tuple(self.phis)


@dataclass
class IterationResult:
    """One sweep: comb measurement outcome (None on the last iteration unless
    measure_last) and the per-step trajectory (t, target energy, overlaps)."""

    outcome: sv.MeasurementRecord | None
    trajectory: np.ndarray | None


@dataclass
class RunResult:
    config: CombingConfig
    iterations: list[IterationResult]
    initial_fidelity: float
    final_fidelity: float
    total_steps: int
    total_gates: int
    final_state: sv.StateVector
    target_energies: np.ndarray = field(default_factory=lambda: np.empty(0))


def initial_target_state(cfg: CombingConfig, ising: IsingParams, rng: sv.Rng) -> sv.StateVector:
    """Build the configured starting state on the target register."""
    spec = cfg.initial_state
    if spec == RANDOM_STATE:
        return sv.random_target_state(ising.nt, rng)
    if spec == GROUND_B_PLUS1:
        es = eigh(sum_matrix(ising_hamiltonian(replace(ising, b=1.0))))
        return sv.StateVector(ising.nt, es.vectors[:, 0].astype(complex))
    if spec.startswith("basis:"):
        index = int(spec.split(":", 1)[1])
        if not 0 <= index < 2**ising.nt:
            raise ConfigError(f"basis state {index} outside register")
        return sv.basis_state(ising.nt, index)
    raise ConfigError(f"unknown initial_state {spec!r}")


def _instantaneous_stack(
    h_static: np.ndarray, comb_z: np.ndarray, nu0: float, steps: int, ks: np.ndarray
) -> np.ndarray:
    nus = nu0 * (1.0 - ks / steps)
    return h_static[None, :, :] + nus[:, None, None] * comb_z[None, :, :]


def sweep_propagator_chunks(
    h_static: np.ndarray,
    comb_z: np.ndarray,
    nu0: float,
    tf: float,
    steps: int,
    chunk: int = 256,
):
    """Yield stacks of exact step unitaries exp(-i H(t_k) dt), nu frozen at the
    left endpoint t_k = k dt of each step."""
    dt = tf / steps
    for lo in range(0, steps, chunk):
        ks = np.arange(lo, min(lo + chunk, steps))
        yield expm_hermitian_stack(
            _instantaneous_stack(h_static, comb_z, nu0, steps, ks), dt
        )


def _sweep_eigenpairs(
    h_static: np.ndarray,
    comb_z: np.ndarray,
    nu0: float,
    steps: int,
    chunk: int = 256,
):
    """Yield per-step (values, vectors) eigenpairs of H(t_k); applying a step
    through its eigenbasis avoids forming the dense propagator."""
    for lo in range(0, steps, chunk):
        ks = np.arange(lo, min(lo + chunk, steps))
        values, vectors = eigh_stack(
            _instantaneous_stack(h_static, comb_z, nu0, steps, ks)
        )
        for w, v in zip(values, vectors):
            yield w, v


def single_sweep(
    state: sv.StateVector,
    step_ops,
    n_steps: int,
    dt: float,
    h_targ_mat: np.ndarray,
    vectors: np.ndarray,
    record: bool = True,
) -> tuple[sv.StateVector, np.ndarray | None]:
    """Advance the state through one sweep of ``n_steps`` operators.

    ``step_ops`` yields one operator per step: a dense unitary on the full
    register (emulate) or a Circuit (circuit mode).  When recording, returns a
    (n_steps + 1, 2 + K) trajectory of t, target energy and the comb-traced
    populations of the first K target eigenstates.
    """
    nt = vectors.shape[0].bit_length() - 1
    traj = None
    if record:
        traj = np.empty((n_steps + 1, 2 + vectors.shape[1]))

    def snapshot(k: int) -> None:
        traj[k, 0] = k * dt
        traj[k, 1] = sv.target_energy(state, h_targ_mat, nt)
        traj[k, 2:] = sv.reduced_overlaps(state, nt, vectors)

    if record:
        snapshot(0)
    for k, op in enumerate(step_ops):
        if isinstance(op, np.ndarray):
            state.amplitudes = op @ state.amplitudes
        elif isinstance(op, tuple):  # (eigenvalues, eigenvectors) of H(t_k)
            w, v = op
            coeffs = v.conj().T @ state.amplitudes
            state.amplitudes = v @ (np.exp(-1j * w * dt) * coeffs)
        else:
            run_circuit(op, state)
        if record:
            snapshot(k + 1)
    return state, traj


def _static_pieces(cfg: CombingConfig, ising: IsingParams, h_targ_mat: np.ndarray):
    """Dense iteration-independent operators: H_targ + kappa part, the unit-nu
    comb one-body matrix, and the unit-g interaction matrix."""
    nt, nc = ising.nt, cfg.nc
    dim_t, dim_c = 2**nt, 2**nc
    kappa_part = triple_ladder_sum(nc, cfg.kappa, cfg.resolved_phis())
    h0 = np.kron(np.eye(dim_c), h_targ_mat) + np.kron(sum_matrix(kappa_part), np.eye(dim_t))
    comb_z = WeightedPauliSum(
        nc, [(-0.5, "I" * i + "Z" + "I" * (nc - i - 1)) for i in range(nc)]
    )
    comb_z_mat = np.kron(sum_matrix(comb_z), np.eye(dim_t))
    a_op = coupling_operator(
        InteractionParams(1.0, cfg.coupling, cfg.coupling_seed), ising
    )
    w_int = interaction_hamiltonian(InteractionParams(1.0, cfg.coupling), a_op, nc)
    w_int_mat = sum_matrix(w_int) if isinstance(w_int, WeightedPauliSum) else w_int
    return h0, comb_z_mat, w_int_mat


def run_combing(
    cfg: CombingConfig,
    ising: IsingParams,
    initial_state: sv.StateVector | None = None,
    rng: sv.Rng | None = None,
    propagator_cache: dict | None = None,
) -> RunResult:
    """Run the full combing loop.

    Per iteration i the sweep uses g eta^i and nu0 eta^i; between iterations
    the comb is measured and reset (skipped after the last sweep unless
    ``measure_last``).  All randomness comes from ``rng`` (default: a fresh
    generator seeded with cfg.seed), so runs are reproducible.

    ``propagator_cache`` optionally shares emulate-mode step unitaries across
    runs with identical physics (ensembles differ only in seeds).
    """
    nt, nc = ising.nt, cfg.nc
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    h_targ_mat = sum_matrix(ising_hamiltonian(ising))
    es = eigh(h_targ_mat)
    k_overlaps = cfg.k_overlaps if cfg.k_overlaps is not None else min(6, 2**nt)
    vectors = es.vectors[:, :k_overlaps]

    if initial_state is None:
        initial_state = initial_target_state(cfg, ising, rng)
    state = sv.init_comb_product(initial_state, nc)
    initial_fidelity = float(sv.reduced_overlaps(state, nt, es.vectors[:, :1])[0])

    if cfg.mode == EMULATE:
        h0, comb_z_mat, w_int_mat = _static_pieces(cfg, ising, h_targ_mat)

    comb_qubits = tuple(range(nt, nt + nc))
    iterations: list[IterationResult] = []
    energies = []
    total_steps = 0
    total_gates = 0
    for it in range(cfg.n_iters):
        scale = cfg.eta**it
        g_i, nu0_i = cfg.g * scale, cfg.nu0 * scale
        steps = cfg.steps_per_iter[it]
        dt = cfg.tf / steps
        if cfg.mode == EMULATE:
            if propagator_cache is not None:
                if it not in propagator_cache:
                    blocks = sweep_propagator_chunks(
                        h0 + g_i * w_int_mat, comb_z_mat, nu0_i, cfg.tf, steps
                    )
                    propagator_cache[it] = np.concatenate(list(blocks), axis=0)
                step_ops = iter(propagator_cache[it])
            else:
                step_ops = _sweep_eigenpairs(
                    h0 + g_i * w_int_mat, comb_z_mat, nu0_i, steps
                )
        else:
            comb_p = CombParams(nc, nu0_i, cfg.kappa, cfg.tf, cfg.resolved_phis())
            inter_p = InteractionParams(g_i, ONE_BODY_X)
            circs = [
                trotter_step_circuit(ising, comb_p, inter_p, k * dt, dt)
                for k in range(steps)
            ]
            total_gates += sum(len(c.gates) for c in circs)
            step_ops = iter(circs)
        state, traj = single_sweep(
            state, step_ops, steps, dt, h_targ_mat, vectors, cfg.record
        )
        total_steps += steps
        energies.append(sv.target_energy(state, h_targ_mat, nt))

        outcome = None
        last = it == cfg.n_iters - 1
        if not last or cfg.measure_last:
            state, outcome = sv.measure_subset(state, comb_qubits, rng)
            sv.reset_down(state, comb_qubits, outcome)
        iterations.append(IterationResult(outcome, traj))

    final_fidelity = float(sv.reduced_overlaps(state, nt, es.vectors[:, :1])[0])
    return RunResult(
        config=cfg,
        iterations=iterations,
        initial_fidelity=initial_fidelity,
        final_fidelity=final_fidelity,
        total_steps=total_steps,
        total_gates=total_gates,
        final_state=state,
        target_energies=np.array(energies),
    )


# --------------------------------------------------------------------------
# Classical parameter search.


@dataclass(frozen=True)
class ParamBox:
    """Sampling interval for one parameter; log-uniform when ``log``."""

    lo: float
    hi: float
    log: bool = False

    def sample(self, rng: sv.Rng) -> float:
        u = rng.random()
        if self.log:
            return float(self.lo * (self.hi / self.lo) ** u)
        return float(self.lo + (self.hi - self.lo) * u)


def default_search_space(ising: IsingParams) -> dict[str, ParamBox]:
    """Wide sampling boxes; nu0 scales with the target's spectral spread so the
    comb levels can sweep the whole excitation range."""
    values = np.linalg.eigvalsh(sum_matrix(ising_hamiltonian(ising)))
    spread = float(values[-1] - values[0])
    return {
        "nu0": ParamBox(0.5 * spread, 4.0 * spread, log=True),
        "tf": ParamBox(5.0, 100.0, log=True),
        "kappa": ParamBox(0.01, 0.5, log=True),
        "g": ParamBox(0.01, 1.0, log=True),
        "eta": ParamBox(0.3, 0.9),
    }


@dataclass
class OptimizeResult:
    best_config: CombingConfig
    best_score: float
    evaluations: list[tuple[dict, float]]


def optimize_params(
    space: dict[str, ParamBox],
    objective: str,
    budget: int,
    seed: int,
    base_cfg: CombingConfig,
    ising: IsingParams,
) -> OptimizeResult:
    """Seeded random search over ``space``; every sample runs the full combing
    loop and is scored by final target energy or negated ground-state fidelity.
    Returns the best evaluated configuration (ties keep the earliest)."""
    if not space:
        raise EmptySearchSpaceError("no parameters to sample")
    if budget < 1:
        raise ValueError("budget must be at least 1")
    if objective not in (FINAL_ENERGY, NEG_GS_FIDELITY):
        raise ValueError(f"unknown objective {objective!r}")
    rng = np.random.default_rng(seed)
    names = sorted(space)
    best_cfg, best_score = None, np.inf
    evaluations = []
    for _ in range(budget):
        params = {name: space[name].sample(rng) for name in names}
        cfg = replace(base_cfg, record=False, **params)
        result = run_combing(cfg, ising)
        if objective == FINAL_ENERGY:
            score = float(result.target_energies[-1])
        else:
            score = -result.final_fidelity
        evaluations.append((params, score))
        if score < best_score:
            best_cfg, best_score = cfg, score
    return OptimizeResult(best_cfg, best_score, evaluations)
