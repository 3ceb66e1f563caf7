import math

import numpy as np
import pytest
from scipy.linalg import expm

from vacuum_engines import dynamics as dy
from vacuum_engines import two_qubit as tq
from vacuum_engines.errors import DegenerateRelaxation, RegimeWarning

REFERENCE_SPEC = tq.TwoQubitSpec(0.5, 0.5, 10.0)
REFERENCE_METER = dy.MeterSpec(50.0)


def test_initial_condition():
    traj = dy.evolve_measurement(REFERENCE_SPEC, REFERENCE_METER, 0.01)
    phi = tq.spectrum(REFERENCE_SPEC).phi
    pops = traj.populations[0]
    assert pops[0] == pytest.approx(math.cos(phi) ** 2)
    assert pops[6] == pytest.approx(math.sin(phi) ** 2)
    assert pops[[1, 2, 3, 4, 5, 7]].max() == 0


def test_hamiltonian_is_hermitian_and_block_structured():
    h = dy.three_qubit_hamiltonian(tq.TwoQubitSpec(1.2, 0.8, 2.0), dy.MeterSpec(3.0))
    assert np.allclose(h, h.T)
    outer, inner = list(dy.OUTER), list(dy.INNER)
    assert np.all(h[np.ix_(outer, inner)] == 0)
    assert h[0b110, 0b111] == 3.0 and h[0b000, 0b001] == 0.0


def test_reference_parameters_match_analytic_solution():
    t_m, _ = dy.measurement_time(REFERENCE_SPEC, REFERENCE_METER)
    traj = dy.evolve_measurement(REFERENCE_SPEC, REFERENCE_METER, 3 * t_m)
    exact = dy.analytic_amplitudes(REFERENCE_SPEC, REFERENCE_METER, traj.times)
    assert np.abs(traj.amplitudes[:, list(dy.OUTER)] - exact).max() < 1e-8
    assert np.abs(traj.norm - 1).max() < 1e-9
    assert np.abs(traj.amplitudes[:, list(dy.INNER)]).max() < 1e-9


def test_random_parameters_match_analytic_solution(rng):
    for _ in range(20):
        gamma, gamma_m = np.exp(rng.uniform(np.log(0.1), np.log(100), 2))
        spec = tq.TwoQubitSpec.from_reduced(1.0, gamma, rng.uniform(0, 0.9))
        meter = dy.MeterSpec(gamma_m)
        t_m, _ = dy.measurement_time(spec, meter)
        traj = dy.evolve_measurement(spec, meter, 2 * t_m, 2 * t_m / 100)
        exact = dy.analytic_amplitudes(spec, meter, traj.times)
        assert np.abs(traj.amplitudes[:, list(dy.OUTER)] - exact).max() < 1e-8


def test_analytic_initial_condition_and_norm(rng):
    spec = tq.TwoQubitSpec(1.3, 0.7, 1.5)
    meter = dy.MeterSpec(4.0)
    phi = tq.spectrum(spec).phi
    a0 = dy.analytic_amplitudes(spec, meter, 0.0)
    assert np.allclose(a0, [math.cos(phi), 0, -math.sin(phi), 0], atol=1e-14)
    t = rng.uniform(0, 50, 30)
    assert np.allclose((np.abs(dy.analytic_amplitudes(spec, meter, t)) ** 2).sum(axis=1), 1, atol=1e-13)


def test_weak_meter_leaves_ground_state_moduli():
    spec = tq.TwoQubitSpec(1.0, 1.0, 2.0)
    meter = dy.MeterSpec(1e-12)
    traj = dy.evolve_measurement(spec, meter, 20.0)
    pops = traj.populations
    assert np.abs(pops - pops[0]).max() < 1e-9


def test_energy_conservation_and_binding_energy_released():
    t_m, _ = dy.measurement_time(REFERENCE_SPEC, REFERENCE_METER)
    traj = dy.evolve_measurement(REFERENCE_SPEC, REFERENCE_METER, t_m, t_m / 400)
    assert np.ptp(traj.e_total) < 1e-8
    assert traj.e_int[0] < -4.9
    assert abs(traj.e_int[-1]) < 0.05 * abs(traj.e_int[0])
    assert traj.e_two_qubit[-1] > traj.e_two_qubit[0]


def test_measurement_time_and_first_peak():
    t_m, nu = dy.measurement_time(REFERENCE_SPEC, REFERENCE_METER)
    freqs = dy.meter_frequencies(REFERENCE_SPEC, REFERENCE_METER)
    assert nu == pytest.approx(freqs[(1, 1)] - freqs[(-1, -1)], rel=1e-14)
    assert dy.first_peak_time(REFERENCE_SPEC, REFERENCE_METER) == pytest.approx(t_m, rel=0.1)


def test_measurement_time_limits():
    spec = tq.TwoQubitSpec(0.5, 0.5, 1e-9)
    meter = dy.MeterSpec(0.3)
    _, nu = dy.measurement_time(spec, meter)
    gm = meter.gamma_m(spec)
    assert nu == pytest.approx(0.5 * (2 * gm + abs(1 + gm) + abs(1 - gm)), rel=1e-12)
    strong = dy.MeterSpec(1e4)
    t_m, nu = dy.measurement_time(REFERENCE_SPEC, strong)
    assert nu == pytest.approx(2 * strong.g_m, rel=1e-2)


def test_rates_at_zero_coupling():
    r = dy.relaxation_rates(tq.TwoQubitSpec(1.2, 0.8, 0.0), dy.RelaxationSpec(0.05))
    assert r.gamma_plus == pytest.approx(2 * math.pi * 0.05)
    assert r.gamma_minus == pytest.approx(2 * math.pi * 0.05)
    assert r.t_p == pytest.approx(1 / (2 * math.pi * 0.05))


def test_rates_near_full_detuning():
    spec = tq.TwoQubitSpec.from_reduced(1.0, 0.7, 1 - 1e-9)
    r = dy.relaxation_rates(spec, dy.RelaxationSpec(0.01))
    s = math.sqrt(1 + 0.49)
    assert r.gamma_minus == pytest.approx(math.pi * 0.01 * (1 + 1 / s) * (1 - 0.7 / s), rel=1e-6)


def test_rate_matrix_structure_and_spectrum():
    spec = tq.TwoQubitSpec.from_reduced(1.0, 0.8, 0.4)
    r = dy.relaxation_rates(spec, dy.RelaxationSpec(0.02))
    m = dy.rate_matrix(r)
    assert np.allclose(m.sum(axis=0), 0, atol=1e-16)
    assert np.allclose(np.triu(m, 1), 0)
    want = sorted([0, r.gamma_minus, r.gamma_plus, r.gamma_plus + r.gamma_minus])
    assert np.allclose(sorted(np.linalg.eigvals(m).real), want, atol=1e-12)
    assert r.t_p >= r.t_c


def test_resonant_qubits_do_not_relax():
    with pytest.raises(DegenerateRelaxation):
        dy.relaxation_rates(tq.TwoQubitSpec(1.0, 1.0, 0.5), dy.RelaxationSpec(0.01))


def test_populations_match_matrix_exponential(rng):
    spec = tq.TwoQubitSpec.from_reduced(1.0, 1.2, 0.3)
    r = dy.relaxation_rates(spec, dy.RelaxationSpec(0.01))
    m = dy.rate_matrix(r)
    for _ in range(5):
        p0 = rng.dirichlet(np.ones(4))
        t = np.linspace(0, 5 * r.t_p, 9)
        got = dy.evolve_populations(p0, r, t)
        want = np.array([expm(-m * x) @ p0 for x in t])
        assert np.abs(got - want).max() < 1e-13
        assert np.all(got >= -1e-15)
        assert np.allclose(got.sum(axis=1), 1)


def test_two_level_decay_and_stationary_ground():
    spec = tq.TwoQubitSpec.from_reduced(1.0, 1.2, 0.3)
    r = dy.relaxation_rates(spec, dy.RelaxationSpec(0.01))
    t = np.linspace(0, 100, 11)
    p = dy.evolve_populations([0, 1, 0, 0], r, t)
    assert np.allclose(p[:, 3], 1 - np.exp(-r.gamma_plus * t), atol=1e-15)
    g = dy.evolve_populations([0, 0, 0, 1], r, t)
    assert np.all(g[:, 3] == 1)


def test_equal_rates_limit():
    r = dy.RelaxationRates(0.3, 0.3, 1 / 0.3, 2 / 0.6)
    t = np.linspace(0, 20, 5)
    m = dy.rate_matrix(r)
    p0 = np.array([0.4, 0.1, 0.2, 0.3])
    want = np.array([expm(-m * x) @ p0 for x in t])
    assert np.abs(dy.evolve_populations(p0, r, t) - want).max() < 1e-13


def test_cycle_populations_and_coherence():
    spec = tq.TwoQubitSpec(1.2, 0.8, 2.0)
    p = dy.cycle_initial_populations(spec)
    assert p.sum() == pytest.approx(1)
    r = dy.relaxation_rates(spec, dy.RelaxationSpec(0.01))
    c0 = dy.coherence_magnitude(spec, r, 0.0)
    assert c0 == pytest.approx(math.sqrt(p[0] * p[3]), rel=1e-13)
    assert dy.coherence_magnitude(spec, r, r.t_c) == pytest.approx(c0 / math.e)


def test_power_estimate():
    spec = tq.TwoQubitSpec(1.2, 0.8, 2.0)
    meter = dy.MeterSpec(10.0)
    relax = dy.RelaxationSpec(0.01)
    t_m, _ = dy.measurement_time(spec, meter)
    want = tq.metrics(spec).work / (t_m + 5 * dy.relaxation_rates(spec, relax).t_p)
    assert dy.power_estimate(spec, meter, relax) == pytest.approx(want, rel=1e-14)
    assert want > 0
    powers = [
        dy.power_estimate(tq.TwoQubitSpec.from_reduced(2.0, 1.0, d), meter, relax) for d in (0.1, 0.3, 0.6, 0.9)
    ]
    assert np.all(np.diff(powers) > 0)
    small = [dy.power_estimate(tq.TwoQubitSpec.from_reduced(2.0, g, 0.2), meter, relax) for g in (1e-3, 1e-4)]
    # W ~ gamma^2 while the cycle time stays finite
    assert small[1] / small[0] == pytest.approx(1e-2, rel=1e-2)


def test_low_temperature_warning():
    spec = tq.TwoQubitSpec(1.2, 0.8, 2.0)
    with pytest.warns(RegimeWarning):
        dy.relaxation_rates(spec, dy.RelaxationSpec(0.01, temperature=5.0))


@pytest.mark.parametrize("kwargs", [{"spectral_density": 0.0}, {"spectral_density": 1.0, "temperature": -1}])
def test_relaxation_spec_validation(kwargs):
    with pytest.raises(ValueError):
        dy.RelaxationSpec(**kwargs)


def test_meter_validation():
    with pytest.raises(ValueError):
        dy.MeterSpec(0.0)
