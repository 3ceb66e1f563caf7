"""Uniform closed qubit chain solved through free fermions.

After a Jordan-Wigner transformation the closed chain of ``N`` qubits
(frequency ``omega``, nearest-neighbour coupling ``g``) becomes a quadratic
fermion problem.  Each momentum pair ``(p, -p)`` is diagonalized by a
Bogoliubov rotation with coefficients ``u_p, v_p`` and quasiparticle energy
``Omega_p``.  The ground state lives in the even-excitation sector, whose
momenta are ``p = (2m - 1) pi / N``.

All engine metrics are momentum sums over that sector; in the thermodynamic
limit they become complete elliptic integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import elliptic
from .errors import DelegationNotice
from .metrics import EngineMetrics

EVEN = "even"
ODD = "odd"


@dataclass(frozen=True)
class MomentumGrid:
    """Allowed momenta of one excitation-parity sector, sorted ascending.

    ``numerators`` holds the integers ``k`` with ``p = k pi / n`` (before
    folding into ``(-pi, pi]``) so that multiples of ``pi`` are detected
    exactly.
    """

    n: int
    sector: str
    momenta: np.ndarray
    numerators: np.ndarray

    @property
    def at_pi_multiple(self) -> np.ndarray:
        return self.numerators % self.n == 0


@dataclass(frozen=True)
class BogoliubovMode:
    p: float
    u: float
    v: float
    omega_p: float


class ThermodynamicLimit(NamedTuple):
    gap_per_site: float
    work_per_site: float
    sigma_per_sqrt_site: float
    efficiency: Optional[float]


class Asymptotics(NamedTuple):
    gap: float
    work: float
    efficiency: float
    sigma: float


def momentum_grid(n: int, sector: str = EVEN) -> MomentumGrid:
    """Momenta ``(2m-1) pi/n`` (even sector) or ``2m pi/n`` (odd sector).

    ``m`` runs from ``-floor((n-1)/2)`` to ``floor(n/2)``; the one value
    that lands on ``-pi`` is folded to ``+pi``.
    """
    if n < 2:
        raise ValueError("chain needs at least two sites")
    m = np.arange(-((n - 1) // 2), n // 2 + 1)
    if sector == EVEN:
        k = 2 * m - 1
    elif sector == ODD:
        k = 2 * m
    else:
        raise ValueError(f"unknown sector {sector!r}")
    k = np.where(k <= -n, k + 2 * n, k)
    order = np.argsort(k)
    k = k[order]
    return MomentumGrid(n=n, sector=sector, momenta=k * np.pi / n, numerators=k)


def _is_pi_multiple(p: float) -> bool:
    return abs(math.remainder(p, math.pi)) < 1e-12


def mode(omega: float, g: float, p: float) -> BogoliubovMode:
    """Bogoliubov coefficients and quasiparticle energy at momentum ``p``."""
    if not omega > 0:
        raise ValueError("omega must be positive")
    if not g >= 0:
        raise ValueError("g must be non-negative")
    c = omega + g * math.cos(p)
    if _is_pi_multiple(p) or g == 0:
        # pairing term vanishes: no rotation needed
        return BogoliubovMode(p=p, u=1.0, v=0.0, omega_p=c)
    u2, v2, omega_p = _rotation(omega, g, np.array([p]))
    sign = 1.0 if p > 0 else -1.0
    return BogoliubovMode(p=p, u=float(np.sqrt(u2[0])), v=sign * float(np.sqrt(v2[0])), omega_p=float(omega_p[0]))


def _rotation(omega: float, g: float, p: np.ndarray):
    """``u_p^2``, ``v_p^2`` and ``Omega_p`` for momenta off multiples of pi.

    Uses ``Omega^2 - c^2 = g^2 sin^2 p`` to avoid subtracting nearly equal
    numbers on either side of ``c = omega + g cos p = 0``.
    """
    c = omega + g * np.cos(p)
    s2 = (g * np.sin(p)) ** 2
    omega_p = np.sqrt(omega**2 + g**2 + 2 * omega * g * np.cos(p))
    small = s2 / (2 * omega_p * (omega_p + np.abs(c)))
    large = (omega_p + np.abs(c)) / (2 * omega_p)
    u2 = np.where(c >= 0, large, small)
    v2 = np.where(c >= 0, small, large)
    return u2, v2, omega_p


def mode_table(n: int, omega: float, g: float, sector: str = EVEN):
    """Vectorized ``(p, u^2, v^2, Omega_p, Omega_p - omega)`` over a grid."""
    grid = momentum_grid(n, sector)
    p = grid.momenta
    special = grid.at_pi_multiple
    if g == 0:
        special = np.ones_like(special)
    u2 = np.ones_like(p)
    v2 = np.zeros_like(p)
    omega_p = omega + g * np.cos(p)
    # exact for p = 0, pi where cos is +-1
    shift = np.where(grid.numerators % (2 * n) == 0, g, -g) * np.ones_like(p)
    if np.any(~special):
        q = p[~special]
        u2[~special], v2[~special], omega_p[~special] = _rotation(omega, g, q)
        shift[~special] = (g**2 + 2 * omega * g * np.cos(q)) / (omega_p[~special] + omega)
    if g == 0:
        shift[:] = 0.0
    return p, u2, v2, omega_p, shift


def metrics_closed_chain(n: int, omega: float, g: float) -> EngineMetrics:
    """Exact engine metrics of the closed chain via momentum sums.

    Raises
    ------
    DelegationNotice
        For ``n == 2``; use :mod:`vacuum_engines.two_qubit` instead.
    """
    if n == 2:
        raise DelegationNotice("the two-qubit engine is handled by the two_qubit module")
    if n < 2:
        raise ValueError("chain needs at least three sites")
    p, u2, v2, omega_p, shift = mode_table(n, omega, g)
    gap = 0.5 * float(np.sum(shift))
    work = omega * float(np.sum(v2))
    # u^2 v^2 = g^2 sin^2 p / (4 Omega^2); zero on multiples of pi
    bogoliubov = v2 > 0
    uv = np.zeros_like(p)
    uv[bogoliubov] = (g * np.sin(p[bogoliubov])) ** 2 / (4 * omega_p[bogoliubov] ** 2)
    sigma = omega * math.sqrt(2 * float(np.sum(uv)))
    return EngineMetrics.assemble(work, gap, sigma)


def critical_values(omega: float = 1.0) -> ThermodynamicLimit:
    """Per-site values at ``g = omega`` where the elliptic forms are singular."""
    work = omega * (0.5 - 1 / math.pi)
    gap = omega * (2 / math.pi - 0.5)
    return ThermodynamicLimit(gap, work, omega / 2, math.pi / 2 - 1)


def thermodynamic_limit(omega: float, g: float) -> ThermodynamicLimit:
    """Per-site gap and work, ``sigma / sqrt(N)`` and efficiency as ``N -> inf``."""
    if not omega > 0:
        raise ValueError("omega must be positive")
    if not g >= 0:
        raise ValueError("g must be non-negative")
    if g == omega:
        return critical_values(omega)
    d = omega - g
    m = -4 * omega * g / d**2
    e = elliptic.ellipe(m)
    k = elliptic.ellipk(m)
    gap = abs(d) / math.pi * e - omega / 2
    work = omega / 2 - math.copysign(1.0, d) / (2 * math.pi) * (d * e + (omega + g) * k)
    if g == 0:
        gap, work = 0.0, 0.0
    heat = work + gap
    efficiency = None if heat == 0 else work / heat
    return ThermodynamicLimit(gap, work, min(omega, g) / 2, efficiency)


def weak_coupling_asymptotics(n: int, omega: float, g: float) -> Asymptotics:
    """Leading behaviour for ``g << omega`` (``n > 2``)."""
    if n <= 2:
        raise DelegationNotice("weak-coupling chain asymptotics need n > 2")
    work = n * g**2 / (8 * omega)
    return Asymptotics(gap=work, work=work, efficiency=0.5, sigma=math.sqrt(n) * g / 2)


def strong_coupling_asymptotics(n: int, omega: float, g: float) -> Asymptotics:
    """Leading behaviour for ``g >> omega``; odd chains are frustrated.

    The efficiency is the ratio of the returned work and heat,
    ``omega / (omega + g)``, which reduces to ``omega / g`` at leading order.
    """
    if n < 3:
        raise ValueError("strong-coupling chain asymptotics need n >= 3")
    weight = 2 * (n // 2) - n / 2
    work = weight * omega
    gap = weight * g
    return Asymptotics(gap=gap, work=work, efficiency=omega / (omega + g), sigma=math.sqrt(n) * omega / 2)
