"""Experiment orchestration and data products.

Four products: spectrum sweeps of the time-dependent total Hamiltonian,
per-step overlap trajectories, ensembles of combing runs over random initial
states, and method cost tables.  Everything serializes to CSV (one metadata
comment line, fixed headers, 17-significant-digit floats) and to a JSON mirror.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import statevector as sv
from ._version import __version__
from .combing import CombingConfig, run_combing
from .errors import DimensionMismatchError, DivergedError
from .models import (
    CombParams,
    InteractionParams,
    IsingParams,
    WeightedPauliSum,
    comb_hamiltonian,
    interaction_hamiltonian,
    ising_hamiltonian,
    nu_schedule,
    total_hamiltonian,
)
from .pauli import eigh_stack, sum_matrix

HAAR_SAMPLER = "haar"
BASIS_SAMPLER = "basis"


@dataclass
class Table:
    """Column-labelled rows plus the metadata block embedded in every file."""

    columns: list[str]
    rows: list[tuple]
    metadata: dict = field(default_factory=dict)


# --------------------------------------------------------------------------
# Spectrum sweep.


@dataclass
class SpectrumSweep:
    times: np.ndarray
    levels: np.ndarray  # (n_times, dim), each row ascending


def spectrum_sweep(
    h_targ: WeightedPauliSum,
    a_op,
    comb: CombParams,
    g: float,
    n_times: int = 121,
) -> SpectrumSweep:
    """Eigenvalues of the total Hamiltonian on a uniform grid over [0, tf].

    The comb's identity shift is kept here so the level ladder reads
    nu(t) * excitation count, which is how the avoided-crossing fan is drawn.
    """
    nt = h_targ.nqubits
    inter = interaction_hamiltonian(InteractionParams(g), a_op, comb.nc)
    times = np.linspace(0.0, comb.tf, n_times)

    def h_at(t: float) -> np.ndarray:
        h_c = comb_hamiltonian(comb, nu_schedule(comb.nu0, comb.tf, t), include_shift=True)
        return total_hamiltonian(h_targ, h_c, inter, nt, comb.nc)

    values, _ = eigh_stack(np.stack([h_at(t) for t in times]))
    return SpectrumSweep(times, values)


def toy_spectrum_setup(
    nu0: float = 1.0, nc: int = 2, g: float = 0.02, epsilon: float | None = None
) -> tuple[WeightedPauliSum, WeightedPauliSum, CombParams, float]:
    """Minimal avoided-crossing demo: a two-level target with splitting
    epsilon (default nu0/2) weakly coupled to a bare two-site comb."""
    from .models import toy_target_hamiltonian

    if epsilon is None:
        epsilon = nu0 / 2.0
    h_targ = toy_target_hamiltonian(epsilon)
    a_op = WeightedPauliSum(1, [(1.0, "X")])
    comb = CombParams(nc=nc, nu0=nu0, kappa=0.0, tf=10.0, phis=())
    return h_targ, a_op, comb, g


def toy_transfer(
    nu0: float = 1.0,
    g: float = 0.05,
    tf: float = 40.0,
    steps: int = 400,
    nc: int = 2,
) -> tuple[float, float]:
    """Slow-sweep emulation of the toy model from the excited target state.

    Returns (initial, final) excited-state population of the target after one
    downward sweep; a slow enough schedule drains the excitation into the comb
    through the avoided crossings.
    """
    h_targ, a_op, comb, _ = toy_spectrum_setup(nu0, nc, g)
    comb = CombParams(nc=nc, nu0=nu0, kappa=0.0, tf=tf, phis=())
    inter = interaction_hamiltonian(InteractionParams(g), a_op, nc)
    h_t_mat = sum_matrix(h_targ)
    excited = np.zeros((2, 1), dtype=complex)
    excited[1, 0] = 1.0

    state = sv.init_comb_product(sv.StateVector(1, excited[:, 0]), nc)
    initial = float(sv.reduced_overlaps(state, 1, excited)[0])
    dt = tf / steps
    for k in range(steps):
        h_c = comb_hamiltonian(comb, nu_schedule(nu0, tf, k * dt))
        h_tot = total_hamiltonian(h_targ, h_c, inter, 1, nc)
        values, vectors = np.linalg.eigh(h_tot)
        coeffs = vectors.conj().T @ state.amplitudes
        state.amplitudes = vectors @ (np.exp(-1j * values * dt) * coeffs)
    final = float(sv.reduced_overlaps(state, 1, excited)[0])
    return initial, final


def find_slow_schedule(
    threshold: float = 0.1, g: float = 0.05, tf_start: float = 10.0, max_doublings: int = 12
) -> tuple[float, float]:
    """Double the sweep duration until the toy transfer drains the excited
    population below ``threshold``; returns (tf, final population)."""
    tf = tf_start
    for _ in range(max_doublings):
        steps = max(200, int(20 * tf))
        _, final = toy_transfer(g=g, tf=tf, steps=steps)
        if final <= threshold:
            return tf, final
        tf *= 2
    raise DivergedError(f"no schedule below {threshold} within {tf / 2} time units")


def uncoupled_crossing_times(
    h_targ: WeightedPauliSum, comb: CombParams, n_interior_tol: float = 1e-9
) -> list[float]:
    """Interior times where two uncoupled total-energy curves E_a + nu(t) k_a
    and E_b + nu(t) k_b intersect (kappa = 0, g = 0)."""
    target_levels = np.linalg.eigvalsh(sum_matrix(h_targ))
    times = []
    for ea in target_levels:
        for eb in target_levels:
            for ka in range(comb.nc + 1):
                for kb in range(comb.nc + 1):
                    if ka == kb:
                        continue
                    nu_star = (ea - eb) / (kb - ka)
                    if nu_star <= n_interior_tol or nu_star > comb.nu0:
                        continue
                    t_star = comb.tf * (1.0 - nu_star / comb.nu0)
                    if n_interior_tol < t_star < comb.tf - n_interior_tol:
                        times.append(float(t_star))
    return sorted(set(round(t, 10) for t in times))


def min_gap_near(sweep: SpectrumSweep, t_star: float, window: float) -> float:
    """Smallest adjacent-level gap within a time window of t_star."""
    mask = np.abs(sweep.times - t_star) <= window
    gaps = np.diff(sweep.levels[mask], axis=1)
    return float(gaps.min())


def spectrum_table(sweep: SpectrumSweep, metadata: dict | None = None) -> Table:
    dim = sweep.levels.shape[1]
    columns = ["t"] + [f"e{i}" for i in range(dim)]
    rows = [
        (float(t), *(float(e) for e in row))
        for t, row in zip(sweep.times, sweep.levels)
    ]
    return Table(columns, rows, metadata or {})


# --------------------------------------------------------------------------
# Overlap trajectory.


def overlap_trajectory(cfg: CombingConfig, ising: IsingParams, k_overlaps: int | None = None):
    """Long-form per-step table across all iterations: iteration number, step
    within the run, time, target energy, residual above the exact ground
    energy, and the comb-traced populations of the lowest K eigenstates.
    Returns the table and the underlying RunResult."""
    if k_overlaps is not None:
        if k_overlaps > 2**ising.nt:
            raise DimensionMismatchError("more overlaps requested than eigenstates")
        cfg = replace(cfg, k_overlaps=k_overlaps)
    cfg = replace(cfg, record=True)
    result = run_combing(cfg, ising)
    e_gs = float(np.linalg.eigvalsh(sum_matrix(ising_hamiltonian(ising)))[0])
    k = result.iterations[0].trajectory.shape[1] - 2
    columns = ["iter", "step", "t", "energy", "residual"] + [f"ov{i}" for i in range(k)]
    rows = []
    step_base = 0
    for it, iteration in enumerate(result.iterations):
        traj = iteration.trajectory
        start = 0 if it == 0 else 1  # endpoint of one sweep = start of the next
        for local in range(start, traj.shape[0]):
            t, energy = traj[local, 0], traj[local, 1]
            rows.append(
                (
                    it,
                    step_base + local,
                    float(t),
                    float(energy),
                    float(energy - e_gs),
                    *(float(v) for v in traj[local, 2:]),
                )
            )
        step_base += traj.shape[0] - 1
    return Table(columns, rows), result


# --------------------------------------------------------------------------
# Ensemble of combing runs.


@dataclass(frozen=True)
class EnsembleRecord:
    seed: int
    initial_fidelity: float
    final_fidelity: float
    steps: int
    outcomes: tuple[str, ...]


def _member_seeds(seed: int, n: int) -> np.ndarray:
    return np.random.SeedSequence(seed).generate_state(n)


def ensemble_success(
    ising: IsingParams,
    base_cfg: CombingConfig,
    n_samples: int,
    sampler: str = HAAR_SAMPLER,
    seed: int = 0,
    threads: int = 1,
) -> list[EnsembleRecord]:
    """Run ``n_samples`` independent combing runs from random initial states.

    Each member gets its own derived seed driving both the initial state and
    its measurement outcomes; records are returned in member order, so the
    list is reproducible regardless of thread scheduling.  Emulate-mode step
    propagators are shared across members through a cache.
    """
    if sampler not in (HAAR_SAMPLER, BASIS_SAMPLER):
        raise ValueError(f"unknown sampler {sampler!r}")
    cfg = replace(base_cfg, record=False)
    cache: dict | None = {} if cfg.mode == "emulate" else None
    seeds = _member_seeds(seed, n_samples)

    if cache is not None and n_samples > 0:
        # Warm the cache single-threaded so workers only read it.
        _run_member(cfg, ising, int(seeds[0]), sampler, cache)

    def worker(member_seed: int) -> EnsembleRecord:
        return _run_member(cfg, ising, member_seed, sampler, cache)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(worker, (int(s) for s in seeds)))
    else:
        records = [worker(int(s)) for s in seeds]
    return records


def _run_member(
    cfg: CombingConfig, ising: IsingParams, member_seed: int, sampler: str, cache
) -> EnsembleRecord:
    rng = np.random.default_rng(member_seed)
    if sampler == HAAR_SAMPLER:
        initial = sv.random_target_state(ising.nt, rng)
    else:
        initial = sv.basis_state(ising.nt, int(rng.integers(2**ising.nt)))
    result = run_combing(cfg, ising, initial_state=initial, rng=rng, propagator_cache=cache)
    outcomes = tuple(
        "".join(str(b) for b in it.outcome.outcome)
        for it in result.iterations
        if it.outcome is not None
    )
    return EnsembleRecord(
        seed=member_seed,
        initial_fidelity=result.initial_fidelity,
        final_fidelity=result.final_fidelity,
        steps=result.total_steps,
        outcomes=outcomes,
    )


def ensemble_table(records: list[EnsembleRecord], metadata: dict | None = None) -> Table:
    columns = ["seed", "initial_fidelity", "final_fidelity", "steps", "outcomes"]
    rows = [
        (r.seed, r.initial_fidelity, r.final_fidelity, r.steps, ";".join(r.outcomes))
        for r in records
    ]
    return Table(columns, rows, metadata or {})


def cost_table(points, metadata: dict | None = None) -> Table:
    columns = ["method", "h", "delta", "inv_gap", "steps", "gates"]
    rows = [(p.method, p.h, p.delta, p.inv_gap, p.steps, p.gates) for p in points]
    return Table(columns, rows, metadata or {})


# --------------------------------------------------------------------------
# Serialization: CSV with a JSON metadata comment line, plus a JSON mirror.


def _format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        s = f"{float(v):.17g}"
        if not any(c in s for c in ".einf"):
            s += ".0"  # keep the column type stable through a round trip
        return s
    # strings are quoted so numeric-looking tokens (outcome bitstrings)
    # keep their type through a round trip; cells never contain commas
    return f'"{v}"'


def _parse_value(s: str):
    if len(s) >= 2 and s[0] == '"' and s[-1] == '"':
        return s[1:-1]
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def standard_metadata(extra: dict | None = None) -> dict:
    meta = {"generator": "combsim", "version": __version__}
    if extra:
        meta.update(extra)
    return meta


def write_csv(path, table: Table) -> None:
    lines = []
    if table.metadata:
        lines.append("# " + json.dumps(table.metadata, sort_keys=True, default=str))
    lines.append(",".join(table.columns))
    for row in table.rows:
        lines.append(",".join(_format_value(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path) -> Table:
    metadata: dict = {}
    columns: list[str] = []
    rows: list[tuple] = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                metadata = json.loads(line.lstrip("# "))
            elif not columns:
                columns = line.split(",")
            else:
                rows.append(tuple(_parse_value(v) for v in line.split(",")))
    return Table(columns, rows, metadata)


def write_json(path, table: Table) -> None:
    payload = {
        "metadata": table.metadata,
        "columns": table.columns,
        "rows": [[_json_value(v) for v in row] for row in table.rows],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, default=str)
        fh.write("\n")


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    return str(v)


def read_json(path) -> Table:
    with open(path) as fh:
        payload = json.load(fh)
    return Table(
        payload["columns"],
        [tuple(row) for row in payload["rows"]],
        payload.get("metadata", {}),
    )
