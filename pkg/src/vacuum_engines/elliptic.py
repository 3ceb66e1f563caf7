"""Complete elliptic integrals by the arithmetic-geometric mean.

Both functions use the *parameter* convention::

    K(m) = int_0^{pi/2} dtheta / sqrt(1 - m sin^2 theta)
    E(m) = int_0^{pi/2} sqrt(1 - m sin^2 theta) dtheta

and accept any ``m < 1``.  Negative parameters are mapped into ``[0, 1)``
with the imaginary-modulus transformation before running the AGM; the
complementary parameter is carried separately so that very negative ``m``
does not round onto the logarithmic singularity at ``m = 1``.
"""

from __future__ import annotations

import math

AGM_RTOL = 1e-13
_MAX_ITER = 64


def _agm(m: float, mc: float) -> tuple[float, float]:
    """Return ``(K(m), E(m))`` for ``0 <= m < 1`` given ``mc = 1 - m``."""
    a, b = 1.0, math.sqrt(mc)
    # E/K = 1 - sum_n 2^(n-1) c_n^2 with c_0^2 = m
    c2_sum = 0.5 * m
    power = 0.5
    for _ in range(_MAX_ITER):
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        power *= 2
        c2_sum += power * c * c
        if abs(c) <= AGM_RTOL * a:
            break
    else:  # pragma: no cover - quadratic convergence makes this unreachable
        raise ArithmeticError(f"AGM failed to converge for m={m!r}")
    k = math.pi / (2 * a)
    return k, k * (1.0 - c2_sum)


def _check(m: float) -> None:
    if not m < 1:
        raise ValueError(f"elliptic parameter must be < 1, got {m!r}")


def ellipk(m: float) -> float:
    """Complete elliptic integral of the first kind, parameter ``m``."""
    _check(m)
    if m < 0:
        s = 1.0 - m
        return _agm(-m / s, 1.0 / s)[0] / math.sqrt(s)
    return _agm(m, 1.0 - m)[0]


def ellipe(m: float) -> float:
    """Complete elliptic integral of the second kind, parameter ``m``."""
    _check(m)
    if m < 0:
        s = 1.0 - m
        return _agm(-m / s, 1.0 / s)[1] * math.sqrt(s)
    return _agm(m, 1.0 - m)[1]
