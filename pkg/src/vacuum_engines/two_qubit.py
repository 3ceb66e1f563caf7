"""Closed-form two-qubit engine.

Two qubits with frequencies ``omega_a >= omega_b`` coupled by
``(g/2) sigma^x_A sigma^x_B``.  Everything depends on the total frequency
``omega_a + omega_b``, the reduced coupling ``gamma = g / (omega_a + omega_b)``
and the reduced detuning ``delta = (omega_a - omega_b) / (omega_a + omega_b)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .metrics import EngineMetrics
from .qubit_exact import QubitChainSpec


@dataclass(frozen=True)
class TwoQubitSpec:
    omega_a: float
    omega_b: float
    g: float

    def __post_init__(self):
        if not (self.omega_a > 0 and self.omega_b > 0):
            raise ValueError("qubit frequencies must be positive")
        if self.omega_a < self.omega_b:
            raise ValueError("label the qubits so that omega_a >= omega_b (delta >= 0)")
        if not self.g >= 0:
            raise ValueError("coupling g must be non-negative")

    @classmethod
    def from_reduced(cls, total: float, gamma: float, delta: float = 0.0) -> "TwoQubitSpec":
        return cls(total * (1 + delta) / 2, total * (1 - delta) / 2, gamma * total)

    @property
    def total(self) -> float:
        return self.omega_a + self.omega_b

    @property
    def gamma(self) -> float:
        return self.g / self.total

    @property
    def delta(self) -> float:
        return (self.omega_a - self.omega_b) / self.total

    def chain_spec(self) -> QubitChainSpec:
        """Equivalent open two-site chain for the exact solver."""
        return QubitChainSpec((self.omega_a, self.omega_b), (self.g,), "open")


@dataclass(frozen=True)
class TwoQubitSpectrum:
    phi: float
    psi: float
    e_phi_plus: float
    e_phi_minus: float
    e_psi_plus: float
    e_psi_minus: float


def spectrum(spec: TwoQubitSpec) -> TwoQubitSpectrum:
    """Eigenenergies and mixing angles of the coupled pair.

    The ground state is ``cos(phi)|00> - sin(phi)|11>``; the single-excitation
    doublet is mixed by ``psi``.  Both angles lie in ``[0, pi/2)``.
    """
    half = spec.total / 2
    gamma, delta = spec.gamma, spec.delta
    r_phi = math.hypot(1.0, gamma)
    r_psi = math.hypot(delta, gamma)
    phi = math.atan2(gamma, 1 + r_phi)
    psi = math.atan2(gamma, delta + r_psi)
    # 1 - sqrt(1 + gamma^2) without cancellation
    lower = -(gamma**2) / (1 + r_phi)
    return TwoQubitSpectrum(
        phi=phi,
        psi=psi,
        e_phi_plus=half * (1 + r_phi),
        e_phi_minus=half * lower,
        e_psi_plus=half * (1 + r_psi),
        e_psi_minus=half * (1 - r_psi),
    )


def outcome_probabilities(spec: TwoQubitSpec) -> tuple[float, float]:
    """Probabilities of finding ``|00>`` and ``|11>`` after measuring."""
    gamma = spec.gamma
    r = math.hypot(1.0, gamma)
    p11 = gamma**2 / (2 * r * (r + 1))
    return 1.0 - p11, p11


def metrics(spec: TwoQubitSpec) -> EngineMetrics:
    """Work, heat, gap, efficiency and fluctuations in closed form."""
    half = spec.total / 2
    gamma = spec.gamma
    r = math.hypot(1.0, gamma)
    work = half * gamma**2 / (r * (r + 1))
    gap = half * gamma**2 / (1 + r)
    std_dev = half * gamma / r
    return EngineMetrics.assemble(work, gap, std_dev)


def efficiency_work_tradeoff(spec: TwoQubitSpec, w: float) -> float:
    """Efficiency reached when the engine delivers average work ``w``.

    Raises
    ------
    DomainError
        If ``w`` is negative or reaches the deep-strong-coupling bound
        ``(omega_a + omega_b) / 2``.
    """
    total = spec.total
    if not 0 <= w < total / 2:
        raise DomainError(f"work {w!r} outside [0, {total / 2!r})")
    return 1 - total / (2 * (total - w))
