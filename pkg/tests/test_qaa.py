"""Adiabatic baseline: path endpoints, blocked dynamics at h=0, step search,
and the cost-table arithmetic."""

import pytest
from dataclasses import replace

from combsim.circuits import gate_count
from combsim.combing import CombingConfig
from combsim.errors import DivergedError
from combsim.models import IsingParams
from combsim.qaa import CostPoint, QaaConfig, compare_cost, run_qaa, steps_to_success


def test_large_step_count_reaches_adiabatic_limit():
    """h=2 has a wide path gap; doubling the step count quickly exceeds 0.99."""
    n = 16
    while True:
        fid = run_qaa(QaaConfig(IsingParams(3, 2.0), n)).fidelity
        if fid > 0.99:
            break
        n *= 2
        assert n <= 2**12, "no adiabatic convergence"
    assert fid > 0.99


def test_h_zero_sectors_never_mix():
    """At h=0 the field term commutes with every Z, so the initial all-down
    configuration cannot reach the all-up ground state at B=-1."""
    for n in (4, 64, 256):
        fid = run_qaa(QaaConfig(IsingParams(3, 0.0), n)).fidelity
        assert fid <= 1e-12


def test_qaa_circuit_mode_close_to_emulate():
    e = run_qaa(QaaConfig(IsingParams(3, 1.5), 256, mode="emulate")).fidelity
    c = run_qaa(QaaConfig(IsingParams(3, 1.5), 256, mode="circuit")).fidelity
    assert abs(e - c) <= 0.05


def test_per_step_gate_costs():
    assert gate_count(3, 3, with_b=True).target == 21
    assert gate_count(4, 3, with_b=True).target == 28


def test_steps_to_success_deterministic_and_minimal_shape():
    n1 = steps_to_success(1.0, 3)
    n2 = steps_to_success(1.0, 3)
    assert n1 == n2
    # the step below the reported minimum fails, the minimum succeeds
    assert run_qaa(QaaConfig(IsingParams(3, 1.0), n1)).fidelity >= 0.5
    if n1 > 1:
        assert run_qaa(QaaConfig(IsingParams(3, 1.0), n1 - 1)).fidelity < 0.5


def test_steps_to_success_monotone_in_gap():
    assert steps_to_success(0.6, 3) >= steps_to_success(1.0, 3)


def test_fidelity_does_not_degrade_when_doubling():
    for h in (0.8, 1.0):
        n = steps_to_success(h, 3)
        f1 = run_qaa(QaaConfig(IsingParams(3, h), n)).fidelity
        f2 = run_qaa(QaaConfig(IsingParams(3, h), 2 * n)).fidelity
        assert f2 >= f1 - 1e-9


def test_steps_to_success_diverges_under_cap():
    with pytest.raises(DivergedError):
        steps_to_success(1.0, 3, target_fidelity=0.999999999, cap=4)


def test_deep_adiabatic_regression():
    """Pinned sanity bound: 2^16 steps at h=1 give fidelity above 0.99."""
    fid = run_qaa(QaaConfig(IsingParams(3, 1.0), 2**16)).fidelity
    assert fid > 0.99


def _quick_sc_provider(h: float) -> CombingConfig:
    return CombingConfig(
        nu0=11.990916832365984,
        tf=6.843957977908697,
        kappa=0.09735022695760184,
        g=0.24948690739763,
        eta=1.0,
        n_iters=1,
        steps_per_iter=50,
        coupling="one_body_x",
        seed=0,
        initial_state="ground_b_plus1",
        record=False,
    )


def test_compare_cost_gate_arithmetic():
    points = compare_cost((1.0,), 3, _quick_sc_provider, budgets=(10, 20, 30, 50, 75))
    by_method = {p.method: p for p in points}
    assert set(by_method) == {"qaa", "sc"}
    qaa_point, sc_point = by_method["qaa"], by_method["sc"]
    assert qaa_point.gates == qaa_point.steps * 21
    assert sc_point.gates == sc_point.steps * 283
    assert qaa_point.inv_gap == pytest.approx(1.0 / qaa_point.delta)
    assert sc_point.delta == qaa_point.delta


def test_compare_cost_diverges_when_budgets_too_small():
    def bad_provider(h: float) -> CombingConfig:
        return replace(_quick_sc_provider(h), g=1e-6)  # no transfer possible

    with pytest.raises(DivergedError):
        compare_cost((1.0,), 3, bad_provider, budgets=(10, 20))


def test_cost_point_fields():
    p = CostPoint("qaa", 0.5, 0.1, 10.0, 100, 2100)
    assert p.gates == p.steps * 21
