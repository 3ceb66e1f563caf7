"""Open qubit chains in the weak and deep-strong coupling limits.

Sites carry individual frequencies ``omega_j`` and bonds individual couplings
``g_j``.  Both limits are zeroth/second-order perturbative results; a
:class:`~vacuum_engines.errors.RegimeWarning` is emitted when the chain is
visibly outside the regime, but the numbers are still returned so sweeps can
cross over.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import RegimeWarning
from .metrics import EngineMetrics
from .qubit_exact import QubitChainSpec

WEAK_RATIO_WARN = 0.2
STRONG_RATIO_WARN = 5.0


@dataclass(frozen=True)
class OpenChainSpec:
    omegas: tuple
    couplings: tuple

    def __post_init__(self):
        object.__setattr__(self, "omegas", tuple(float(w) for w in self.omegas))
        object.__setattr__(self, "couplings", tuple(float(g) for g in self.couplings))
        if len(self.omegas) < 2:
            raise ValueError("an open chain needs at least two qubits")
        if any(not w > 0 for w in self.omegas):
            raise ValueError("all qubit frequencies must be positive")
        if len(self.couplings) != len(self.omegas) - 1:
            raise ValueError("an open chain of N qubits has N - 1 couplings")

    @classmethod
    def uniform(cls, n: int, omega: float, g: float) -> "OpenChainSpec":
        return cls((omega,) * n, (g,) * (n - 1))

    @property
    def n(self) -> int:
        return len(self.omegas)

    def exact_spec(self) -> QubitChainSpec:
        return QubitChainSpec(self.omegas, self.couplings, "open")


class WeakCouplingResult(NamedTuple):
    metrics: EngineMetrics
    pair_probabilities: list
    ground_probability: float


def weak_coupling_metrics(spec: OpenChainSpec) -> WeakCouplingResult:
    """Second-order perturbative engine in powers of ``g_j / (omega_j + omega_j+1)``.

    Each bond ``j`` contributes an outcome in which qubits ``j`` and ``j+1``
    are both excited, with probability ``(g_j / s_j)^2 / 4`` and work ``s_j``.
    The work fluctuations are those of this outcome distribution.
    """
    w = np.asarray(spec.omegas)
    g = np.asarray(spec.couplings)
    pair_energy = w[:-1] + w[1:]
    ratio = g / pair_energy
    if ratio.size and ratio.max() > WEAK_RATIO_WARN:
        warnings.warn(
            f"weak-coupling formulas used at g/(w_j+w_j+1) = {ratio.max():.3g}",
            RegimeWarning,
            stacklevel=2,
        )
    pair_probs = ratio**2 / 4
    work = float(np.sum(g**2 / pair_energy) / 4)
    variance = float(np.sum(pair_probs * pair_energy**2)) - work**2
    metrics = EngineMetrics.assemble(work, work, math.sqrt(max(variance, 0.0)))
    return WeakCouplingResult(metrics, [float(p) for p in pair_probs], 1.0 - float(pair_probs.sum()))


def strong_coupling_distribution_variance(omegas) -> float:
    """Variance of ``sum_j l_j omega_j`` with ``l`` uniform over even-parity strings.

    Any ``N - 1`` bits of a uniform even-parity string are independent and
    unbiased, so for ``N >= 3`` the sites are pairwise uncorrelated.  For
    ``N = 2`` the two bits are equal.
    """
    w = np.asarray(omegas, dtype=float)
    if w.size == 2:
        return float(w.sum() ** 2 / 4)
    return float(np.sum(w**2) / 4)


def strong_coupling_metrics(spec: OpenChainSpec) -> EngineMetrics:
    """Zeroth-order deep-strong-coupling engine.

    The ground state is the positive-parity antiferromagnet along ``x``; every
    even-parity outcome is equally likely.
    """
    w = np.asarray(spec.omegas)
    g = np.asarray(spec.couplings)
    if g.min() < STRONG_RATIO_WARN * w.max():
        warnings.warn(
            f"deep-strong formulas used at min g / max omega = {g.min() / w.max():.3g}",
            RegimeWarning,
            stacklevel=2,
        )
    work = float(w.sum()) / 2
    gap = float(g.sum()) / 2
    return EngineMetrics.assemble(work, gap, math.sqrt(strong_coupling_distribution_variance(w)))
