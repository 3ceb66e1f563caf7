"""Measurement and relaxation dynamics of the two-qubit engine.

Measurement: a meter qubit M is coupled to qubit A through
``g_M |1><1|_A sigma^x_M``.  Starting from ``cos(phi)|000> - sin(phi)|110>``
(qubits ordered A, B, M) the three-qubit state is integrated numerically and
compared with the closed-form solution in the four-dimensional subspace
``{000, 001, 110, 111}``.

Relaxation: at low temperature only energy-lowering transitions survive, and
the populations of ``(phi+, psi+, psi-, phi-)`` obey a lower-triangular rate
equation that is solved here in closed form.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import minimize_scalar

from .errors import DegenerateRelaxation, IntegrationFailure, RegimeWarning
from .two_qubit import TwoQubitSpec, metrics as two_qubit_metrics, spectrum

BASIS = ("000", "001", "010", "011", "100", "101", "110", "111")
OUTER = (0, 1, 6, 7)  # 000, 001, 110, 111
INNER = (2, 3, 4, 5)
ODE_RTOL = 1e-10
ODE_ATOL = 1e-12
LOW_T_FACTOR = 0.1


@dataclass(frozen=True)
class MeterSpec:
    g_m: float

    def __post_init__(self):
        if not self.g_m > 0:
            raise ValueError("meter coupling must be positive")

    def gamma_m(self, spec: TwoQubitSpec) -> float:
        return self.g_m / spec.total


@dataclass(frozen=True)
class RelaxationSpec:
    """Flat bath spectral density and bath temperature ``k_B T``."""

    spectral_density: float
    temperature: float = 0.0

    def __post_init__(self):
        if not self.spectral_density > 0:
            raise ValueError("spectral density must be positive")
        if not self.temperature >= 0:
            raise ValueError("temperature must be non-negative")


@dataclass(frozen=True)
class ThreeQubitTrajectory:
    times: np.ndarray
    amplitudes: np.ndarray  # shape (len(times), 8), columns ordered as BASIS
    e_loc: np.ndarray
    e_int: np.ndarray
    e_meter: np.ndarray

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm(self) -> np.ndarray:
        return self.populations.sum(axis=1)

    @property
    def e_two_qubit(self) -> np.ndarray:
        return self.e_loc + self.e_int

    @property
    def e_total(self) -> np.ndarray:
        return self.e_loc + self.e_int + self.e_meter


class RelaxationRates(NamedTuple):
    gamma_plus: float
    gamma_minus: float
    t_p: float
    t_c: float


def three_qubit_hamiltonian(spec: TwoQubitSpec, meter: MeterSpec) -> np.ndarray:
    """8x8 Hamiltonian ``H_loc + H_int + H_M`` in the ``|a b m>`` basis."""
    h = np.zeros((8, 8))
    for idx in range(8):
        a, b = (idx >> 2) & 1, (idx >> 1) & 1
        h[idx, idx] = a * spec.omega_a + b * spec.omega_b
        h[idx ^ 0b110, idx] += spec.g / 2
        if a:
            h[idx ^ 0b001, idx] += meter.g_m
    return h


def initial_state(spec: TwoQubitSpec) -> np.ndarray:
    phi = spectrum(spec).phi
    psi0 = np.zeros(8, dtype=complex)
    psi0[0] = math.cos(phi)
    psi0[6] = -math.sin(phi)
    return psi0


def energy_traces(spec: TwoQubitSpec, meter: MeterSpec, amplitudes: np.ndarray):
    """``<H_loc>``, ``<H_int>`` and ``<H_M>`` for each row of ``amplitudes``."""
    amps = np.atleast_2d(amplitudes)
    pops = np.abs(amps) ** 2
    local = np.array([((i >> 2) & 1) * spec.omega_a + ((i >> 1) & 1) * spec.omega_b for i in range(8)])
    e_loc = pops @ local
    e_int = np.zeros(amps.shape[0])
    for i, j in ((0, 6), (1, 7), (2, 4), (3, 5)):
        e_int += spec.g * np.real(np.conj(amps[:, i]) * amps[:, j])
    e_meter = np.zeros(amps.shape[0])
    for i, j in ((4, 5), (6, 7)):
        e_meter += 2 * meter.g_m * np.real(np.conj(amps[:, i]) * amps[:, j])
    return e_loc, e_int, e_meter


def evolve_measurement(
    spec: TwoQubitSpec,
    meter: MeterSpec,
    t_end: float,
    dt_control: float | None = None,
    rtol: float = ODE_RTOL,
    atol: float = ODE_ATOL,
) -> ThreeQubitTrajectory:
    """Integrate the three-qubit Schroedinger equation.

    ``dt_control`` is the spacing of the output grid (default: 400 points
    up to ``t_end``).  The integrator is DOP853 with adaptive steps.
    """
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    if dt_control is None:
        dt_control = t_end / 400
    n_steps = int(math.floor(t_end / dt_control + 1e-9))
    times = np.arange(n_steps + 1) * dt_control
    h = three_qubit_hamiltonian(spec, meter)
    minus_ih = -1j * h

    def rhs(_t, y):
        return minus_ih @ y

    sol = solve_ivp(
        rhs,
        (0.0, float(times[-1])),
        initial_state(spec),
        method="DOP853",
        t_eval=times,
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise IntegrationFailure(sol.message)
    amps = sol.y.T
    e_loc, e_int, e_meter = energy_traces(spec, meter, amps)
    return ThreeQubitTrajectory(times, amps, e_loc, e_int, e_meter)


def meter_frequencies(spec: TwoQubitSpec, meter: MeterSpec) -> dict:
    """Eigenfrequencies ``Omega_pq`` of the populated four-state block."""
    half = spec.total / 2
    gamma, gamma_m = spec.gamma, meter.gamma_m(spec)
    out = {}
    for p in (1, -1):
        base = 1 + p * gamma_m
        root = math.hypot(base, gamma)
        for q in (1, -1):
            out[(p, q)] = half * (base + q * root)
    return out


def analytic_amplitudes(spec: TwoQubitSpec, meter: MeterSpec, t) -> np.ndarray:
    """Closed-form ``(Psi_000, Psi_001, Psi_110, Psi_111)`` at times ``t``.

    Returns an array of shape ``(len(t), 4)``; a scalar ``t`` gives shape
    ``(4,)``.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    phi = spectrum(spec).phi
    cos_phi, sin_phi = math.cos(phi), math.sin(phi)
    out = np.zeros((t_arr.size, 4), dtype=complex)
    for (p, _q), omega_pq in meter_frequencies(spec, meter).items():
        if spec.g == 0:
            # r = 2 Omega / g; with g -> 0 the q-branch with Omega = 0 has r = 0
            # and the other has r -> inf, which contributes only through sin(phi) = 0.
            r = 0.0 if omega_pq == 0 else math.inf
        else:
            r = 2 * omega_pq / spec.g
        if math.isinf(r):
            continue
        weight = (cos_phi - r * sin_phi) / (1 + r * r) / 2
        phase = np.exp(-1j * omega_pq * t_arr)
        out[:, 0] += weight * phase
        out[:, 1] += p * weight * phase
        out[:, 2] += r * weight * phase
        out[:, 3] += p * r * weight * phase
    return out[0] if np.ndim(t) == 0 else out


def measurement_time(spec: TwoQubitSpec, meter: MeterSpec) -> tuple[float, float]:
    """Half-period estimate ``t_M = pi / nu`` with ``nu`` the largest Bohr frequency."""
    gamma, gamma_m = spec.gamma, meter.gamma_m(spec)
    nu = spec.total / 2 * (2 * gamma_m + math.hypot(1 + gamma_m, gamma) + math.hypot(1 - gamma_m, gamma))
    return math.pi / nu, nu


def first_peak_time(spec: TwoQubitSpec, meter: MeterSpec, n_scan: int = 2000) -> float:
    """First local maximum of ``|Psi_111(t)|^2``.

    A grid scan over two estimated measurement times brackets the peak, and a
    golden-section search refines it.
    """
    t_m, _ = measurement_time(spec, meter)
    grid = np.linspace(0.0, 2 * t_m, n_scan + 1)
    pop = np.abs(analytic_amplitudes(spec, meter, grid)[:, 3]) ** 2
    rising = np.nonzero((pop[1:-1] >= pop[:-2]) & (pop[1:-1] > pop[2:]))[0]
    if rising.size == 0:
        raise IntegrationFailure("no maximum of |Psi_111|^2 within two measurement times")
    i = rising[0] + 1

    def neg_pop(t):
        return -abs(analytic_amplitudes(spec, meter, t)[3]) ** 2

    res = minimize_scalar(
        neg_pop, bracket=(grid[i - 1], grid[i], grid[i + 1]), method="golden", tol=1e-10
    )
    return float(res.x)


def low_temperature_gap(spec: TwoQubitSpec) -> float:
    """Energy between the ground state and the first excited state."""
    s = spectrum(spec)
    return s.e_psi_minus - s.e_phi_minus


def relaxation_rates(spec: TwoQubitSpec, relax: RelaxationSpec) -> RelaxationRates:
    """Zero-temperature decay rates, population time and coherence time.

    Raises
    ------
    DegenerateRelaxation
        If the slow rate vanishes (resonant qubits with non-zero coupling).
    """
    gamma, delta = spec.gamma, spec.delta
    if relax.temperature > LOW_T_FACTOR * low_temperature_gap(spec):
        warnings.warn(
            "bath temperature is not small compared with the first excitation gap; "
            "the low-temperature rate equation may not apply",
            RegimeWarning,
            stacklevel=2,
        )
    prefactor = math.pi * relax.spectral_density * (1 + 1 / math.hypot(1.0, gamma))
    # gamma = 0 decouples the qubits; the ratio is taken as its value along gamma = 0
    mixing = 0.0 if gamma == 0 else gamma / math.hypot(delta, gamma)
    gamma_plus = prefactor * (1 + mixing)
    # 1 - gamma/sqrt(delta^2 + gamma^2) without cancellation
    if gamma == 0:
        gamma_minus = prefactor
    else:
        r = math.hypot(delta, gamma)
        gamma_minus = prefactor * delta**2 / (r * (r + gamma))
    if gamma_minus <= 1e-14 * gamma_plus:
        raise DegenerateRelaxation("slow relaxation rate vanishes (delta = 0 with gamma > 0)")
    t_p = 1 / gamma_minus
    t_c = 2 / (gamma_plus + gamma_minus)
    assert t_p >= t_c
    return RelaxationRates(gamma_plus, gamma_minus, t_p, t_c)


def rate_matrix(rates: RelaxationRates) -> np.ndarray:
    """Matrix ``M`` with ``dp/dt = -M p`` for populations ``(phi+, psi+, psi-, phi-)``."""
    gp, gm = rates.gamma_plus, rates.gamma_minus
    return np.array(
        [
            [gp + gm, 0.0, 0.0, 0.0],
            [-gp, gp, 0.0, 0.0],
            [-gm, 0.0, gm, 0.0],
            [0.0, -gp, -gm, 0.0],
        ]
    )


def _relative_decay(rate: float, t: np.ndarray) -> np.ndarray:
    """``(1 - exp(-rate t)) / rate`` with its ``rate -> 0`` limit ``t``."""
    if rate == 0:
        return t.copy()
    return -np.expm1(-rate * t) / rate


def evolve_populations(initial, rates: RelaxationRates, t_grid) -> np.ndarray:
    """Exact solution of the low-temperature rate equation.

    Returns an array of shape ``(len(t_grid), 4)`` ordered
    ``(phi+, psi+, psi-, phi-)``.
    """
    p0 = np.asarray(initial, dtype=float)
    if p0.shape != (4,) or np.any(p0 < -1e-15) or abs(p0.sum() - 1) > 1e-12:
        raise ValueError("initial populations must be a probability vector of length 4")
    t = np.asarray(t_grid, dtype=float)
    gp, gm = rates.gamma_plus, rates.gamma_minus
    a, b, c, _ = p0
    top = a * np.exp(-(gp + gm) * t)
    psi_plus = np.exp(-gp * t) * (b + a * gp * _relative_decay(gm, t))
    psi_minus = np.exp(-gm * t) * (c + a * gm * _relative_decay(gp, t))
    ground = 1.0 - top - psi_plus - psi_minus
    return np.stack([top, psi_plus, psi_minus, ground], axis=-1)


def cycle_initial_populations(spec: TwoQubitSpec) -> np.ndarray:
    """Eigenbasis populations of ``|00>``, the state handed to the bath."""
    phi = spectrum(spec).phi
    return np.array([math.sin(phi) ** 2, 0.0, 0.0, math.cos(phi) ** 2])


def coherence_magnitude(spec: TwoQubitSpec, rates: RelaxationRates, t) -> np.ndarray:
    """``|<phi+|rho(t)|phi->|`` starting from ``|00><00|``."""
    gamma = spec.gamma
    return gamma * np.exp(-np.asarray(t, dtype=float) / rates.t_c) / (2 * math.hypot(1.0, gamma))


def power_estimate(spec: TwoQubitSpec, meter: MeterSpec, relax: RelaxationSpec) -> float:
    """Average work per cycle divided by ``t_M + 5 t_p``."""
    work = two_qubit_metrics(spec).work
    t_m, _ = measurement_time(spec, meter)
    t_p = relaxation_rates(spec, relax).t_p
    return work / (t_m + 5 * t_p)
