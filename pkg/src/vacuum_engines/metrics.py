"""Engine figures of merit built from ground-state energy expectation values.

Every engine in this package reduces to four numbers: the local-Hamiltonian
expectation value and its second moment in the interacting ground state, the
local ground-state energy and the interacting ground-state energy.  Work,
quantum heat, local entanglement gap, efficiency and work fluctuations follow
from these alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import InvalidEnergies

# relative round-off allowed in <H_loc^2> - <H_loc>^2 before it is an error
VARIANCE_TOL = 1e-12


@dataclass(frozen=True)
class GroundStateEnergies:
    """Energies characterising one engine.

    Attributes
    ----------
    e_loc_expect : float
        Expectation value of the local Hamiltonian in the interacting
        ground state.
    e_loc2_expect : float
        Expectation value of the squared local Hamiltonian.
    e0_loc : float
        Ground-state energy of the local Hamiltonian.
    e_gs : float
        Ground-state energy of the full Hamiltonian.
    """

    e_loc_expect: float
    e_loc2_expect: float
    e0_loc: float
    e_gs: float

    @property
    def variance(self) -> float:
        return self.e_loc2_expect - self.e_loc_expect**2


@dataclass(frozen=True)
class EngineMetrics:
    """Work, heat, gap, efficiency and work standard deviation.

    ``efficiency`` is ``None`` when the heat vanishes (uncoupled engine).
    Construct through :meth:`assemble` so that ``heat == work + gap`` holds
    bit for bit.
    """

    work: float
    heat: float
    gap: float
    efficiency: Optional[float]
    std_dev: float

    def __post_init__(self):
        if self.heat != self.work + self.gap:
            raise ValueError("heat must equal work + gap")
        if self.std_dev < 0 or math.isnan(self.std_dev):
            raise ValueError("std_dev must be non-negative")

    @classmethod
    def assemble(cls, work: float, gap: float, std_dev: float) -> "EngineMetrics":
        work = float(work)
        gap = float(gap)
        heat = work + gap
        efficiency = None if heat == 0 else work / heat
        return cls(work, heat, gap, efficiency, float(std_dev))

    @property
    def efficiency_defined(self) -> bool:
        return self.efficiency is not None

    @property
    def efficiency_exceeds_unity(self) -> bool:
        """True for energies with a negative gap, which no ground state produces."""
        return self.efficiency is not None and self.efficiency > 1

    @property
    def is_physical(self) -> bool:
        """True when W, gap >= 0 and the efficiency lies in [0, 1].

        Hand-supplied energies that break the zero-interaction-expectation
        premise can give a negative gap and an efficiency above one; those
        are representable but flagged here.
        """
        tol = 1e-12 * max(1.0, abs(self.heat))
        if self.work < -tol or self.gap < -tol:
            return False
        if self.efficiency is None:
            return True
        return -1e-12 <= self.efficiency <= 1.0 + 1e-12

    def as_dict(self) -> dict:
        return {
            "work": self.work,
            "heat": self.heat,
            "gap": self.gap,
            "efficiency": self.efficiency,
            "std_dev": self.std_dev,
        }


def clamp_variance(variance: float, scale: float) -> float:
    """Return ``variance`` with tiny negative round-off set to zero."""
    if variance >= 0:
        return variance
    if variance >= -VARIANCE_TOL * max(1.0, scale):
        return 0.0
    raise InvalidEnergies(f"negative work variance {variance!r}")


def metrics_from_energies(e: GroundStateEnergies) -> EngineMetrics:
    """Assemble engine metrics from the four ground-state energies.

    Raises
    ------
    InvalidEnergies
        If the variance is negative beyond round-off, or if ``e_loc_expect``
        undercuts the local ground-state energy.
    """
    scale = max(1.0, abs(e.e_loc_expect), abs(e.e0_loc))
    if e.e_loc_expect < e.e0_loc - VARIANCE_TOL * scale:
        raise InvalidEnergies(
            f"<H_loc> = {e.e_loc_expect!r} lies below the local ground energy {e.e0_loc!r}"
        )
    variance = clamp_variance(e.variance, e.e_loc_expect**2)
    return EngineMetrics.assemble(
        work=e.e_loc_expect - e.e0_loc,
        gap=e.e0_loc - e.e_gs,
        std_dev=math.sqrt(variance),
    )
