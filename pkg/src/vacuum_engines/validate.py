"""Cross-validation suites comparing independent solution routes.

``quick`` caps exact diagonalization at 8 qubits and Monte Carlo at 1e5
samples; ``full`` goes to 12 qubits and 1e6 samples.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import dynamics, oscillators, qubit_chain, qubit_exact, two_qubit

LEVELS = ("quick", "full")
FIELDS = ("work", "heat", "gap", "std_dev")


@dataclass(frozen=True)
class Limits:
    max_qubits: int
    mc_samples: int
    n_random: int


LIMITS = {"quick": Limits(8, 10**5, 100), "full": Limits(12, 10**6, 1000)}


def _rel(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def _metric_error(m1, m2) -> float:
    worst = max(_rel(getattr(m1, f), getattr(m2, f)) for f in FIELDS)
    if (m1.efficiency is None) != (m2.efficiency is None):
        return math.inf
    if m1.efficiency is not None:
        worst = max(worst, _rel(m1.efficiency, m2.efficiency))
    return worst


def free_fermions_vs_exact(lim: Limits):
    worst = 0.0
    for n in range(3, lim.max_qubits + 1):
        for g in (0.1, 0.5, 0.9, 1.0, 1.1, 2.0, 10.0):
            ff = qubit_chain.metrics_closed_chain(n, 1.0, g)
            ed = qubit_exact.engine_metrics_exact(qubit_exact.QubitChainSpec.uniform(n, 1.0, g))
            worst = max(worst, _metric_error(ff, ed))
    return worst <= 1e-8, {"max_relative_error": worst}


def two_qubit_vs_exact(lim: Limits):
    worst = 0.0
    for gamma in np.geomspace(1e-3, 1e3, 50):
        for delta in (0.0, 0.3, 0.9):
            spec = two_qubit.TwoQubitSpec.from_reduced(2.0, float(gamma), delta)
            ed = qubit_exact.engine_metrics_exact(spec.chain_spec())
            worst = max(worst, _metric_error(two_qubit.metrics(spec), ed))
    return worst <= 1e-12, {"max_relative_error": worst}


def critical_point(lim: Limits):
    m = qubit_chain.metrics_closed_chain(2000, 1.0, 1.0)
    w = m.work / 2000
    limit = qubit_chain.thermodynamic_limit(1.0, 1.0)
    ok = (
        abs(w - 0.182) <= 1e-3
        and abs(m.efficiency - 0.571) <= 1e-3
        and abs(limit.work_per_site - (0.5 - 1 / math.pi)) <= 1e-12
        and abs(limit.efficiency - (math.pi / 2 - 1)) <= 1e-12
    )
    return ok, {"work_per_site": w, "efficiency": m.efficiency}


def measurement_dynamics(lim: Limits):
    spec = two_qubit.TwoQubitSpec(0.5, 0.5, 10.0)
    meter = dynamics.MeterSpec(50.0)
    t_m, _ = dynamics.measurement_time(spec, meter)
    traj = dynamics.evolve_measurement(spec, meter, 2 * t_m)
    exact = dynamics.analytic_amplitudes(spec, meter, traj.times)
    err = float(np.abs(traj.amplitudes[:, list(dynamics.OUTER)] - exact).max())
    norm = float(np.abs(traj.norm - 1).max())
    peak = dynamics.first_peak_time(spec, meter) / t_m
    ok = err <= 1e-8 and norm <= 1e-9 and abs(peak - 1) <= 0.1
    return ok, {"amplitude_error": err, "norm_error": norm, "peak_over_t_m": peak}


def relaxation_spectrum(lim: Limits):
    worst = 0.0
    for gamma, delta in ((0.5, 0.3), (2.0, 0.9), (0.1, 0.05), (1.0, 0.5)):
        spec = two_qubit.TwoQubitSpec.from_reduced(1.0, gamma, delta)
        rates = dynamics.relaxation_rates(spec, dynamics.RelaxationSpec(0.01))
        got = np.sort(np.linalg.eigvals(dynamics.rate_matrix(rates)).real)
        want = np.sort([0.0, rates.gamma_minus, rates.gamma_plus, rates.gamma_plus + rates.gamma_minus])
        worst = max(worst, float(np.abs(got - want).max()))
    return worst <= 1e-12, {"max_eigenvalue_error": worst}


def oscillator_routes(lim: Limits):
    worst = 0.0
    for k0 in (0.1, 1.0, 3.0):
        for g in (0.05, 0.5, 2.0, 10.0):
            spec = oscillators.TwoOscSpec(k0, g)
            a = oscillators.metrics_two_oscillator(spec)
            b = oscillators.metrics_network(spec.coupling_matrix())
            worst = max(worst, _metric_error(a, b))
    return worst <= 1e-10, {"max_relative_error": worst}


def random_spd(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.normal(size=(n, n))
    return a @ a.T + 0.1 * np.eye(n)


def heat_positivity(lim: Limits):
    rng = np.random.default_rng(2024)
    min_q, worst = math.inf, 0.0
    for _ in range(lim.n_random):
        k = random_spd(rng, int(rng.integers(1, 9)))
        cert = oscillators.heat_positivity_check(k)
        min_q = min(min_q, cert.heat, cert.heat_symmetric)
        worst = max(worst, abs(cert.heat - cert.heat_symmetric) / max(1.0, abs(cert.heat)))
    return min_q >= -1e-12 and worst <= 1e-9, {"min_heat": min_q, "max_discrepancy": worst}


def network_monte_carlo(lim: Limits):
    rng = np.random.default_rng(7)
    worst = 0.0
    for i in range(5):
        k = random_spd(rng, 5)
        m = oscillators.metrics_network(k)
        mc = oscillators.monte_carlo_work(k, lim.mc_samples, seed=i)
        worst = max(
            worst,
            abs(mc.work - m.work) / mc.work_stderr,
            abs(mc.variance - m.std_dev**2) / mc.variance_stderr,
        )
    return worst <= 4.0, {"max_z_score": worst}


def linear_chain_closed_forms(lim: Limits):
    worst = 0.0
    for n in (2, 3, 10, 100, 1000):
        r = oscillators.linear_chain_metrics(n, 1.0)
        worst = max(
            worst,
            _rel(r.sum_frequencies, oscillators.linear_chain_frequency_sum(n, 1.0)),
            _rel(r.trace_k_inverse, oscillators.linear_chain_trace_inverse(n, 1.0)),
            _rel(r.metrics.std_dev, oscillators.linear_chain_sigma(n, 1.0)),
        )
    return worst <= 1e-10, {"max_relative_error": worst}


def fock_probabilities(lim: Limits):
    spec = oscillators.TwoOscSpec(1.0, 1.0)
    probs = oscillators.two_oscillator_probabilities(spec, 40).probabilities
    n = np.arange(41)
    energy = float((probs * (n[:, None] + n[None, :] + 1)).sum()) * spec.omega
    odd = float(probs[(n[:, None] + n[None, :]) % 2 == 1].max())
    total_err = abs(probs.sum() - 1)
    energy_err = abs(energy - oscillators.two_oscillator_local_energy(spec))
    ok = total_err <= 1e-10 and energy_err <= 1e-8 and odd == 0.0
    return ok, {"sum_error": total_err, "energy_error": energy_err}


def cycle_sampler(lim: Limits):
    cases = [
        two_qubit.TwoQubitSpec.from_reduced(2.0, 1.0).chain_spec(),
        qubit_exact.QubitChainSpec.uniform(6, 1.0, 2.0),
    ]
    worst = 0.0
    for i, spec in enumerate(cases):
        dist = qubit_exact.outcome_distribution(spec)
        s = qubit_exact.sample_cycles(spec, lim.mc_samples, seed=i)
        worst = max(
            worst,
            abs(s.mean_work - dist.mean_work) / s.mean_standard_error,
            abs(s.std_work - dist.work_std) / s.std_standard_error,
        )
    return worst <= 4.0, {"max_z_score": worst}


SUITES = {
    "free_fermions_vs_exact": free_fermions_vs_exact,
    "two_qubit_vs_exact": two_qubit_vs_exact,
    "critical_point": critical_point,
    "measurement_dynamics": measurement_dynamics,
    "relaxation_spectrum": relaxation_spectrum,
    "oscillator_routes": oscillator_routes,
    "heat_positivity": heat_positivity,
    "network_monte_carlo": network_monte_carlo,
    "linear_chain_closed_forms": linear_chain_closed_forms,
    "fock_probabilities": fock_probabilities,
    "cycle_sampler": cycle_sampler,
}


def run_validation(level: str = "quick", suites=None) -> dict:
    """Run the named suites (default: all) and return a JSON-ready report."""
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}")
    lim = LIMITS[level]
    results = []
    for name in suites or SUITES:
        start = time.perf_counter()
        try:
            ok, detail = SUITES[name](lim)
        except Exception as exc:
            ok, detail = False, {"exception": f"{type(exc).__name__}: {exc}"}
        results.append(
            {"name": name, "passed": bool(ok), "detail": detail, "seconds": time.perf_counter() - start}
        )
    return {"level": level, "passed": all(r["passed"] for r in results), "suites": results}
