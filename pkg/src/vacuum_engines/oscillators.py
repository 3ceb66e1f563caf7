"""Harmonic-oscillator vacuum engines.

Unit-mass oscillators with ``H = p.p/2 + x.K.x/2``.  The local Hamiltonian
keeps the diagonal of ``K``; its expectation value and fluctuations in the
Gaussian ground state follow from the matrix square root ``Omega = sqrt(K)``.

Contents: general networks, the two-oscillator engine with its outcome
probabilities, the open linear chain and open ``D``-dimensional cubic
lattices.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
import scipy.linalg

from .errors import NotPositiveDefinite, RegimeWarning, SizeExceeded, TruncationInsufficient
from .metrics import EngineMetrics, clamp_variance

SYMMETRY_TOL = 1e-12
EIGEN_FLOOR = 1e-12
MAX_FOCK = 60
DENSE_MAX = 2000
MAX_LATTICE_MODES = 10**7
ASYMPTOTIC_C = 2.577
EULER_MACLAURIN_C = 2.5


# ---------------------------------------------------------------------------
# general networks


@dataclass(frozen=True)
class NormalModes:
    """Eigen-decomposition ``K = O^T diag(Omega_m^2) O``.

    ``transform`` is ``O``; row ``m`` holds normal mode ``m``.
    """

    frequencies: np.ndarray
    transform: np.ndarray
    omega_matrix: np.ndarray
    omega_inverse: np.ndarray


def validate_coupling_matrix(k) -> np.ndarray:
    """Return ``k`` as a float array after checking symmetry and positivity.

    Raises
    ------
    NotPositiveDefinite
        If ``k`` is not square and symmetric, has a non-positive diagonal
        entry, or its smallest eigenvalue is at most ``1e-12`` times the
        largest.
    """
    k = np.asarray(k, dtype=float)
    if k.ndim != 2 or k.shape[0] != k.shape[1] or k.shape[0] == 0:
        raise NotPositiveDefinite("coupling matrix must be square and non-empty")
    if not np.all(np.isfinite(k)):
        raise NotPositiveDefinite("coupling matrix has non-finite entries")
    scale = max(np.abs(k).max(), 1e-300)
    if np.abs(k - k.T).max() > SYMMETRY_TOL * scale:
        raise NotPositiveDefinite("coupling matrix is not symmetric")
    if np.any(np.diag(k) <= 0):
        raise NotPositiveDefinite("diagonal entries must be positive")
    return 0.5 * (k + k.T)


def normal_modes(k) -> NormalModes:
    k = validate_coupling_matrix(k)
    evals, vecs = np.linalg.eigh(k)
    if evals[0] <= EIGEN_FLOOR * evals[-1]:
        raise NotPositiveDefinite(f"smallest eigenvalue {evals[0]!r} is not positive")
    freqs = np.sqrt(evals)
    omega = (vecs * freqs) @ vecs.T
    omega_inv = (vecs / freqs) @ vecs.T
    return NormalModes(freqs, vecs.T, 0.5 * (omega + omega.T), 0.5 * (omega_inv + omega_inv.T))


class NetworkEnergies(NamedTuple):
    e_loc: float
    e0_loc: float
    e_gs: float
    variance: float
    work: float
    gap: float


def network_energies(k, modes: Optional[NormalModes] = None) -> NetworkEnergies:
    """``<H_loc>``, local and interacting vacuum energies and the work variance.

    Work and gap are small differences of large numbers at weak coupling, so
    they are accumulated from mode-pair terms that vanish identically for
    uncoupled oscillators.  With ``w[m, j] = O_mj^2``:

    * heat: ``1/8 sum w_mj w_nj (W_m - W_n)^2 (W_m + W_n) / (W_m W_n)``
    * gap per site: ``(K_jj - Omega_jj^2) / (2 (sqrt(K_jj) + Omega_jj))``
      with ``K_jj - Omega_jj^2 = 1/2 sum w_mj w_nj (W_m - W_n)^2``
    * variance: ``1/8 |Omega^-1/2 B Omega^-1/2|_F^2`` with ``B`` the
      off-diagonal part of ``K``
    """
    k = validate_coupling_matrix(k)
    if modes is None:
        modes = normal_modes(k)
    diag = np.diag(k)
    f = modes.frequencies
    w = modes.transform**2
    split = (f[:, None] - f[None, :]) ** 2
    heat = float(np.sum((w @ w.T) * split * (f[:, None] + f[None, :]) / np.outer(f, f))) / 8
    root_diag = np.sqrt(diag)
    site_weight = 1 / (4 * (root_diag + np.diag(modes.omega_matrix)))
    gap = float(np.sum(((w * site_weight) @ w.T) * split))
    off = k - np.diag(diag)
    rotated = modes.transform @ off @ modes.transform.T
    variance = float(np.sum(rotated**2 / np.outer(f, f))) / 8
    e0_loc = 0.5 * float(np.sum(root_diag))
    e_gs = 0.5 * float(np.sum(f))
    return NetworkEnergies(e0_loc + (heat - gap), e0_loc, e_gs, variance, heat - gap, gap)


def metrics_network(k) -> EngineMetrics:
    """Engine metrics of an arbitrary oscillator network.

    Parameters
    ----------
    k : array_like
        Symmetric positive-definite coupling matrix.
    """
    e = network_energies(k)
    return EngineMetrics.assemble(e.work, e.gap, math.sqrt(e.variance))


class HeatCertificate(NamedTuple):
    heat: float
    heat_symmetric: float
    pair_terms: np.ndarray


def heat_positivity_check(k) -> HeatCertificate:
    """Quantum heat evaluated directly and as a sum of non-negative mode pairs.

    ``pair_terms[k, l]`` is the contribution of normal modes ``k`` and ``l``
    to the symmetric form; each entry is non-negative by construction.
    """
    k = validate_coupling_matrix(k)
    modes = normal_modes(k)
    diag = np.diag(k)
    heat = 0.25 * float(np.sum(diag * np.diag(modes.omega_inverse) - np.diag(modes.omega_matrix)))
    w = modes.transform**2  # w[m, j] = O_mj^2
    overlap = w @ w.T
    f = modes.frequencies
    spread = (f[:, None] - f[None, :]) ** 2 * (f[:, None] + f[None, :]) / np.outer(f, f)
    pair_terms = overlap * spread / 8
    return HeatCertificate(heat, float(pair_terms.sum()), pair_terms)


def all_to_all_coupling(n: int, k0: float, g: float) -> np.ndarray:
    """Every pair coupled with strength ``g`` on top of a local spring ``k0``.

    Generalizes the two-oscillator matrix: diagonal ``k0 + (n-1) g``,
    off-diagonal ``-g``.
    """
    if n < 2:
        raise ValueError("network needs at least two oscillators")
    k = np.full((n, n), -float(g))
    np.fill_diagonal(k, k0 + (n - 1) * g)
    return k


def wigner_samples(k, n_samples: int, seed: int, chunk: int = 1 << 16):
    """Yield chunks of ``(x, p)`` drawn from the ground-state Wigner function.

    Positions and momenta are independent Gaussians with covariances
    ``Omega^-1 / 2`` and ``Omega / 2``.
    """
    modes = normal_modes(k)
    n = modes.frequencies.size
    # factors L with L L^T = cov, built from the eigenbasis
    v = modes.transform.T
    lx = v / np.sqrt(2 * modes.frequencies)
    lp = v * np.sqrt(modes.frequencies / 2)
    done = 0
    index = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))
        z = rng.standard_normal((m, 2 * n))
        yield z[:, :n] @ lx.T, z[:, n:] @ lp.T
        done += m
        index += 1


class MonteCarloEstimate(NamedTuple):
    work: float
    work_stderr: float
    variance: float
    variance_stderr: float


def monte_carlo_work(k, n_samples: int, seed: int = 0) -> MonteCarloEstimate:
    """Sampling estimate of ``W`` and the work variance.

    The Weyl symbol of ``H_loc^2`` differs from the square of the symbol of
    ``H_loc`` by ``-K_jj/4`` per oscillator; that constant is subtracted from
    the sampled variance.
    """
    k = validate_coupling_matrix(k)
    diag = np.diag(k)
    values = np.concatenate(
        [0.5 * (p**2 + diag * x**2).sum(axis=1) for x, p in wigner_samples(k, n_samples, seed)]
    )
    mean = float(values.mean())
    centred = values - mean
    m2 = float(np.mean(centred**2))
    m4 = float(np.mean(centred**4))
    e0_loc = 0.5 * float(np.sqrt(diag).sum())
    return MonteCarloEstimate(
        work=mean - e0_loc,
        work_stderr=math.sqrt(m2 / n_samples),
        variance=m2 - 0.25 * float(diag.sum()),
        variance_stderr=math.sqrt(max(m4 - m2 * m2, 0.0) / n_samples),
    )


# ---------------------------------------------------------------------------
# two oscillators


@dataclass(frozen=True)
class TwoOscSpec:
    k0: float
    g: float

    def __post_init__(self):
        if not self.k0 > 0:
            raise ValueError("k0 must be positive")
        if not self.g >= 0:
            raise ValueError("g must be non-negative")

    @property
    def omega(self) -> float:
        return math.sqrt(self.k0 + self.g)

    @property
    def omega_plus(self) -> float:
        return math.sqrt(self.k0)

    @property
    def omega_minus(self) -> float:
        return math.sqrt(self.k0 + 2 * self.g)

    def coupling_matrix(self) -> np.ndarray:
        return np.array([[self.k0 + self.g, -self.g], [-self.g, self.k0 + self.g]])


def two_oscillator_local_energy(spec: TwoOscSpec) -> float:
    w, wp, wm = spec.omega, spec.omega_plus, spec.omega_minus
    return (wp + wm) / 4 * (w * w / (wp * wm) + 1)


def metrics_two_oscillator(spec: TwoOscSpec) -> EngineMetrics:
    """Closed-form metrics of two identical coupled oscillators.

    The heat and gap are rearranged so that no nearly equal quantities are
    subtracted at weak coupling.
    """
    w, wp, wm, g = spec.omega, spec.omega_plus, spec.omega_minus, spec.g
    d = (w + wp) * (w + wm)
    gap = g * g / (d * (wm + wp))
    heat = (wp + wm) * g * g / (4 * wp * wm * (w * w + wp * wm))
    sigma = w * g / (2 * wp * wm)
    return EngineMetrics.assemble(heat - gap, gap, sigma)


class FockDistribution(NamedTuple):
    probabilities: np.ndarray  # P[n1, n2], 0 <= n1, n2 <= n_max
    tail: float  # 1 - sum(P)


def generating_coefficients(spec: TwoOscSpec) -> tuple[float, float, float]:
    """Prefactor ``c`` and exponents ``a``, ``b`` of the overlap generating function.

    ``Z(t1, t2) = c exp(a (t1^2 + t2^2) / 2 + b t1 t2)``.
    """
    w, wp, wm = spec.omega, spec.omega_plus, spec.omega_minus
    d = (w + wp) * (w + wm)
    prefactor = 2 * math.sqrt(w) * (wp * wm) ** 0.25 / math.sqrt(d)
    # w^2 - wp wm = g^2 / (w^2 + wp wm)
    a = spec.g**2 / (w * w + wp * wm) / d
    b = w * (wm - wp) / d
    return prefactor, a, b


def two_oscillator_probabilities(
    spec: TwoOscSpec, n_max: int, tolerance: Optional[float] = None
) -> FockDistribution:
    """Joint probabilities of local excitation numbers ``(n1, n2)``.

    Every term of the series expansion is non-negative, so the coefficients
    are accumulated in log space without cancellation.

    Raises
    ------
    TruncationInsufficient
        If ``n_max`` exceeds the supported cutoff, or if ``tolerance`` is
        given and the missing probability exceeds it.
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    if n_max > MAX_FOCK:
        raise TruncationInsufficient(f"n_max above {MAX_FOCK} is not supported")
    prefactor, a, b = generating_coefficients(spec)
    lg = [math.lgamma(n + 1) for n in range(n_max + 1)]
    log_half_a = math.log(a / 2) if a > 0 else -math.inf
    log_b = math.log(b) if b > 0 else -math.inf
    probs = np.zeros((n_max + 1, n_max + 1))
    for n1 in range(n_max + 1):
        for n2 in range(n1 % 2, n_max + 1, 2):
            coeff = 0.0
            for kk in range(n1 % 2, min(n1, n2) + 1, 2):
                i, j = (n1 - kk) // 2, (n2 - kk) // 2
                log_term = 0.0
                if i + j:
                    log_term += (i + j) * log_half_a
                if kk:
                    log_term += kk * log_b
                if log_term == -math.inf:
                    continue
                coeff += math.exp(log_term - math.lgamma(i + 1) - math.lgamma(j + 1) - lg[kk])
            probs[n1, n2] = math.exp(lg[n1] + lg[n2]) * (prefactor * coeff) ** 2
    tail = max(0.0, 1.0 - math.fsum(probs.ravel()))
    if tolerance is not None and tail > tolerance:
        raise TruncationInsufficient(f"missing probability {tail:.3g} exceeds {tolerance:.3g}")
    return FockDistribution(probs, tail)


# ---------------------------------------------------------------------------
# linear chains and lattices


def linear_chain_coupling(n: int, k0: float) -> np.ndarray:
    """``k0 (2 I - T)`` with ``T`` the nearest-neighbour adjacency."""
    if n < 2:
        raise ValueError("chain needs at least two oscillators")
    return k0 * (2 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1))


def linear_chain_frequency_sum(n: int, k0: float) -> float:
    return math.sqrt(k0) * (1 / math.tan(math.pi / (4 * (n + 1))) - 1)


def linear_chain_trace_inverse(n: int, k0: float) -> float:
    return n * (n + 2) / (6 * k0)


def linear_chain_sigma(n: int, k0: float) -> float:
    return math.sqrt(n * (n - 1) * k0) / (2 * math.sqrt(3))


class LinearChainResult(NamedTuple):
    metrics: EngineMetrics
    e_loc: float
    trace_k_inverse: float
    sum_frequencies: float


def _uniform_diagonal_metrics(n: int, diag: float, k_modes: np.ndarray):
    """Metrics when every ``K_jj`` equals ``diag``; only eigenvalues needed."""
    freqs = np.sqrt(k_modes)
    sum_freq = math.fsum(freqs)
    sum_inv = math.fsum(1 / freqs)
    trace_inv = math.fsum(1 / k_modes)
    e_loc = 0.25 * (diag * sum_inv + sum_freq)
    e0_loc = 0.5 * n * math.sqrt(diag)
    variance = clamp_variance((diag * diag * trace_inv - n * diag) / 8, (n * diag) ** 2)
    metrics = EngineMetrics.assemble(e_loc - e0_loc, e0_loc - 0.5 * sum_freq, math.sqrt(variance))
    return metrics, e_loc, trace_inv, sum_freq


def linear_chain_metrics(n: int, k0: float) -> LinearChainResult:
    """Exact metrics of an open chain of ``n`` springs-coupled oscillators.

    Up to ``n = 2000`` the dense network route is used; longer chains use
    the numerical spectrum of the tridiagonal matrix.
    """
    if not k0 > 0:
        raise ValueError("k0 must be positive")
    if n <= DENSE_MAX:
        k = linear_chain_coupling(n, k0)
        modes = normal_modes(k)
        e = network_energies(k, modes)
        metrics = EngineMetrics.assemble(e.work, e.gap, math.sqrt(e.variance))
        trace_inv = float(np.sum(modes.frequencies**-2))
        return LinearChainResult(metrics, e.e_loc, trace_inv, float(modes.frequencies.sum()))
    k_modes = scipy.linalg.eigvalsh_tridiagonal(np.full(n, 2.0 * k0), np.full(n - 1, -float(k0)))
    if k_modes[0] <= 0:
        raise NotPositiveDefinite("tridiagonal eigensolver returned a non-positive eigenvalue")
    return LinearChainResult(*_uniform_diagonal_metrics(n, 2 * k0, k_modes))


class ChainAsymptotics(NamedTuple):
    e_loc: float
    e0_loc: float
    e_gs: float


def linear_chain_asymptotics(n: int, k0: float, c: float = ASYMPTOTIC_C) -> ChainAsymptotics:
    """Large-``n`` forms of the local energy and the two vacuum energies."""
    if n < 100:
        warnings.warn("chain asymptotics used below n = 100", RegimeWarning, stacklevel=2)
    root = math.sqrt(k0)
    e_loc = n * root / (2 * math.pi) * (math.log(4 * n / math.pi) + c)
    return ChainAsymptotics(e_loc, n * math.sqrt(k0 / 2), 2 * n * root / math.pi)


def fit_asymptotic_constant(n: int, k0: float = 1.0) -> float:
    """Constant ``C`` that makes the asymptotic local energy exact at ``n``."""
    e_loc = linear_chain_metrics(n, k0).e_loc
    return 2 * math.pi * e_loc / (n * math.sqrt(k0)) - math.log(4 * n / math.pi)


def lattice_mode_eigenvalues(m_side: int, dim: int, k0: float) -> np.ndarray:
    """All ``k_m = 4 k0 sum_alpha sin^2(m_alpha pi / (2 (M + 1)))``, flattened."""
    s2 = 4 * k0 * np.sin(np.arange(1, m_side + 1) * np.pi / (2 * (m_side + 1))) ** 2
    total = np.zeros(())
    for _ in range(dim):
        total = np.add.outer(total, s2)
    return total.ravel()


def lattice_coupling_matrix(m_side: int, dim: int, k0: float) -> np.ndarray:
    """Dense ``K`` of an open cubic lattice (Kronecker sum of 1D chains)."""
    n = m_side**dim
    if n > DENSE_MAX:
        raise SizeExceeded(f"dense lattice matrix limited to {DENSE_MAX} sites, got {n}")
    chain = linear_chain_coupling(m_side, k0) if m_side > 1 else np.array([[2.0 * k0]])
    eye = np.eye(m_side)
    k = np.zeros((n, n))
    for axis in range(dim):
        term = np.ones((1, 1))
        for other in range(dim):
            term = np.kron(term, chain if other == axis else eye)
        k += term
    return k


def _check_lattice(m_side: int, dim: int):
    if dim not in (1, 2, 3):
        raise ValueError("dim must be 1, 2 or 3")
    if m_side < 2:
        raise ValueError("m_side must be at least 2")
    if m_side**dim > MAX_LATTICE_MODES:
        raise SizeExceeded(f"lattice with {m_side**dim} sites exceeds {MAX_LATTICE_MODES}")


def lattice_metrics(m_side: int, dim: int, k0: float) -> EngineMetrics:
    """Metrics of an open ``dim``-dimensional cubic lattice of side ``m_side``.

    Every site has ``K_jj = 2 dim k0``, so the diagonal weights in the local
    energy are uniform and only the mode frequencies enter.
    """
    _check_lattice(m_side, dim)
    if not k0 > 0:
        raise ValueError("k0 must be positive")
    k_modes = lattice_mode_eigenvalues(m_side, dim, k0)
    return _uniform_diagonal_metrics(m_side**dim, 2 * dim * k0, k_modes)[0]
