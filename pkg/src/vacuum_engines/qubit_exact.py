"""Dense exact diagonalization of qubit chains.

Qubits carry the local Hamiltonian ``omega_j |1><1|`` and are coupled by
``(g/2) sigma^x_j sigma^x_k`` along the bonds of an open or closed chain.
Basis states are labelled by ``l = sum_j 2**(N-j) l_j`` (qubit 1 is the most
significant bit), so ``l = 0`` is the local ground state.

The coupling flips two qubits at a time, so the Hamiltonian never mixes even
and odd excitation-number sectors.  The solvers exploit this by
diagonalizing the two parity blocks separately.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConvergenceFailure, SizeExceeded
from .metrics import EngineMetrics, GroundStateEnergies, metrics_from_energies

MAX_QUBITS = 14
DEGENERACY_TOL = 1e-10
SAMPLE_CHUNK = 1 << 16
CSV_COLUMNS = ("basis_index", "excitation_count", "probability", "work_value")


@dataclass(frozen=True)
class QubitChainSpec:
    """Site frequencies, bond couplings and boundary condition of a chain.

    ``couplings[j]`` couples qubit ``j`` to qubit ``j+1``; for a closed chain
    the last entry couples qubit ``N`` back to qubit 1.
    """

    omegas: tuple
    couplings: tuple
    boundary: str = "closed"

    def __post_init__(self):
        object.__setattr__(self, "omegas", tuple(float(w) for w in self.omegas))
        object.__setattr__(self, "couplings", tuple(float(g) for g in self.couplings))
        n = len(self.omegas)
        if n < 2:
            raise ValueError("a chain needs at least two qubits")
        if any(not w > 0 for w in self.omegas):
            raise ValueError("all qubit frequencies must be positive")
        if self.boundary not in ("closed", "open"):
            raise ValueError(f"unknown boundary {self.boundary!r}")
        expected = n if self.boundary == "closed" else n - 1
        if len(self.couplings) != expected:
            raise ValueError(
                f"{self.boundary} chain of {n} qubits needs {expected} couplings, "
                f"got {len(self.couplings)}"
            )

    @classmethod
    def uniform(cls, n: int, omega: float, g: float, boundary: str = "closed"):
        n_bonds = n if boundary == "closed" else n - 1
        return cls((omega,) * n, (g,) * n_bonds, boundary)

    @property
    def n(self) -> int:
        return len(self.omegas)

    def bonds(self):
        """Yield ``(j, k, g)`` with 0-based site indices."""
        n = self.n
        for j, g in enumerate(self.couplings):
            yield j, (j + 1) % n, g

    @property
    def is_uniform_closed(self) -> bool:
        return (
            self.boundary == "closed"
            and len(set(self.omegas)) == 1
            and len(set(self.couplings)) == 1
        )


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities and work values of every local-measurement outcome."""

    probabilities: np.ndarray
    work_values: np.ndarray

    @property
    def n(self) -> int:
        return int(self.probabilities.size).bit_length() - 1

    @property
    def excitation_counts(self) -> np.ndarray:
        return _popcount(np.arange(self.probabilities.size))

    @property
    def mean_work(self) -> float:
        return float(self.probabilities @ self.work_values)

    @property
    def work_std(self) -> float:
        w = self.mean_work
        return float(np.sqrt(self.probabilities @ (self.work_values - w) ** 2))

    def rows(self):
        counts = self.excitation_counts
        for l, (p, w) in enumerate(zip(self.probabilities, self.work_values)):
            yield l, int(counts[l]), float(p), float(w)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for l, f, p, w in self.rows():
                writer.writerow([l, f, format(p, ".17g"), format(w, ".17g")])


@dataclass(frozen=True)
class CycleSamples:
    """Monte Carlo realisations of the engine cycle."""

    mean_work: float
    std_work: float
    basis_indices: np.ndarray
    work: np.ndarray
    probabilities: np.ndarray

    @property
    def n_samples(self) -> int:
        return int(self.work.size)

    @property
    def mean_standard_error(self) -> float:
        return self.std_work / np.sqrt(self.n_samples)

    @property
    def std_standard_error(self) -> float:
        """Large-sample standard error of the sample standard deviation."""
        centred = self.work - self.mean_work
        m4 = float(np.mean(centred**4))
        var = self.std_work**2
        if var == 0:
            return 0.0
        return float(np.sqrt(max(m4 - var**2, 0.0) / self.n_samples) / (2 * self.std_work))

    def to_csv(self, path) -> None:
        counts = _popcount(self.basis_indices)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for l, f, w in zip(self.basis_indices, counts, self.work):
                writer.writerow(
                    [int(l), int(f), format(float(self.probabilities[l]), ".17g"), format(float(w), ".17g")]
                )


def _popcount(indices: np.ndarray) -> np.ndarray:
    indices = np.asarray(indices, dtype=np.int64)
    counts = np.zeros_like(indices)
    work = indices.copy()
    while np.any(work):
        counts += work & 1
        work >>= 1
    return counts


def _occupations(n: int, indices: np.ndarray) -> np.ndarray:
    """Bit matrix ``[index, site]`` with site 0 the most significant bit."""
    shifts = n - 1 - np.arange(n)
    return (indices[:, None] >> shifts) & 1


def local_energies(spec: QubitChainSpec) -> np.ndarray:
    """Local energy ``E_l`` of every computational basis state."""
    idx = np.arange(1 << spec.n)
    return _occupations(spec.n, idx) @ np.asarray(spec.omegas)


def _check_size(n: int, max_qubits: int) -> None:
    if n > max_qubits:
        raise SizeExceeded(f"{n} qubits exceeds the dense limit of {max_qubits}")


def build_hamiltonian(spec: QubitChainSpec, max_qubits: int = MAX_QUBITS) -> np.ndarray:
    """Dense ``2**N x 2**N`` Hamiltonian of the chain."""
    _check_size(spec.n, max_qubits)
    n = spec.n
    idx = np.arange(1 << n)
    h = np.diag(local_energies(spec).astype(float))
    for j, k, g in spec.bonds():
        mask = (1 << (n - 1 - j)) | (1 << (n - 1 - k))
        h[idx ^ mask, idx] += g / 2
    return h


def _parity_block(spec: QubitChainSpec, parity: int):
    """Basis indices and Hamiltonian block of one excitation-parity sector."""
    n = spec.n
    idx = np.arange(1 << n)
    sector = idx[_popcount(idx) % 2 == parity]
    position = np.full(1 << n, -1)
    position[sector] = np.arange(sector.size)
    energies = _occupations(n, sector) @ np.asarray(spec.omegas)
    block = np.diag(energies.astype(float))
    cols = np.arange(sector.size)
    for j, k, g in spec.bonds():
        mask = (1 << (n - 1 - j)) | (1 << (n - 1 - k))
        block[position[sector ^ mask], cols] += g / 2
    return sector, block


def _lowest(h: np.ndarray):
    try:
        if h.shape[0] == 1:
            return float(h[0, 0]), np.ones(1)
        vals, vecs = scipy.linalg.eigh(h, subset_by_index=[0, 0])
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return float(vals[0]), vecs[:, 0]


def _fix_sign(vec: np.ndarray) -> np.ndarray:
    pivot = 0 if abs(vec[0]) > 1e-12 else int(np.argmax(np.abs(vec)))
    return -vec if vec[pivot] < 0 else vec


def ground_state(h: np.ndarray, degeneracy_tol: float = DEGENERACY_TOL):
    """Lowest eigenpair of a real symmetric Hamiltonian in the qubit basis.

    When the lowest level is degenerate to within ``degeneracy_tol`` the
    returned vector is the even-excitation-parity member of the degenerate
    subspace, which is the physical ground state selected by the global
    parity symmetry.

    Returns
    -------
    (float, ndarray)
        Ground energy and normalized real amplitudes.
    """
    h = np.asarray(h, dtype=float)
    dim = h.shape[0]
    if dim & (dim - 1):
        # not a qubit register: no parity structure to exploit
        e, v = _lowest(h)
        return e, _fix_sign(v)
    even = _popcount(np.arange(dim)) % 2 == 0
    if not np.any(h[np.ix_(even, ~even)]):
        e_even, v_even = _lowest(h[np.ix_(even, even)])
        e_odd, v_odd = _lowest(h[np.ix_(~even, ~even)]) if dim > 1 else (np.inf, None)
        vec = np.zeros(dim)
        if e_odd < e_even - degeneracy_tol:
            vec[~even] = v_odd
            return e_odd, _fix_sign(vec)
        vec[even] = v_even
        return e_even, _fix_sign(vec)

    try:
        vals, vecs = scipy.linalg.eigh(h)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise ConvergenceFailure(str(exc)) from exc
    degenerate = vals <= vals[0] + degeneracy_tol
    subspace = vecs[:, degenerate]
    if subspace.shape[1] == 1:
        return float(vals[0]), _fix_sign(vecs[:, 0])
    _, s, vt = np.linalg.svd(subspace[even], full_matrices=False)
    if s[0] < 1e-8:
        return float(vals[0]), _fix_sign(vecs[:, 0])
    vec = subspace @ vt[0]
    return float(vals[0]), _fix_sign(vec / np.linalg.norm(vec))


def _solve(spec: QubitChainSpec, max_qubits: int):
    """Ground energy, full amplitude vector and Rayleigh-quotient energy."""
    _check_size(spec.n, max_qubits)
    dim = 1 << spec.n
    blocks = {}
    for parity in (0, 1):
        sector, block = _parity_block(spec, parity)
        e, v = _lowest(block)
        blocks[parity] = (e, v, sector, block)
    e_even, v_even, idx_even, h_even = blocks[0]
    e_odd, v_odd, idx_odd, h_odd = blocks[1]
    if e_odd < e_even - DEGENERACY_TOL:
        e, v, sector, block = e_odd, v_odd, idx_odd, h_odd
    else:
        e, v, sector, block = e_even, v_even, idx_even, h_even
    amplitudes = np.zeros(dim)
    amplitudes[sector] = v
    amplitudes = _fix_sign(amplitudes)
    # The Rayleigh quotient has no cancellation between large terms at weak
    # coupling, unlike the eigenvalue whose error is absolute.
    v = amplitudes[sector]
    e_rayleigh = float(v @ (block @ v))
    return e, amplitudes, e_rayleigh


def ground_state_energies(spec: QubitChainSpec, max_qubits: int = MAX_QUBITS) -> GroundStateEnergies:
    _, amplitudes, e_gs = _solve(spec, max_qubits)
    energies = local_energies(spec).astype(float)
    probs = amplitudes**2
    return GroundStateEnergies(
        e_loc_expect=float(probs @ energies),
        e_loc2_expect=float(probs @ energies**2),
        e0_loc=float(energies.min()),
        e_gs=e_gs,
    )


def engine_metrics_exact(spec: QubitChainSpec, max_qubits: int = MAX_QUBITS) -> EngineMetrics:
    """All engine metrics of a chain from exact diagonalization."""
    return metrics_from_energies(ground_state_energies(spec, max_qubits))


def outcome_distribution(spec: QubitChainSpec, max_qubits: int = MAX_QUBITS) -> OutcomeDistribution:
    """Probability ``|<l|ground>|^2`` and work ``E_l - E_0loc`` of every outcome."""
    _, amplitudes, _ = _solve(spec, max_qubits)
    energies = local_energies(spec).astype(float)
    probs = amplitudes**2
    return OutcomeDistribution(probabilities=probs, work_values=energies - energies.min())


def _sample_chunk(cdf, seed, chunk, size):
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, chunk])))
    draws = np.searchsorted(cdf, rng.random(size), side="right")
    return np.minimum(draws, cdf.size - 1)


def sample_cycles(
    spec: QubitChainSpec,
    n_samples: int,
    seed: int,
    jobs: int = 1,
    max_qubits: int = MAX_QUBITS,
) -> CycleSamples:
    """Draw measurement outcomes of independent engine cycles.

    Samples are generated in fixed-size chunks, each from its own Philox
    stream keyed by ``(seed, chunk index)``; the result does not depend on
    ``jobs``.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    dist = outcome_distribution(spec, max_qubits)
    cdf = np.cumsum(dist.probabilities)
    cdf /= cdf[-1]
    sizes = [min(SAMPLE_CHUNK, n_samples - start) for start in range(0, n_samples, SAMPLE_CHUNK)]
    args = [(cdf, seed, i, size) for i, size in enumerate(sizes)]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(lambda a: _sample_chunk(*a), args))
    else:
        chunks = [_sample_chunk(*a) for a in args]
    indices = np.concatenate(chunks)
    work = dist.work_values[indices]
    return CycleSamples(
        mean_work=float(work.mean()),
        std_work=float(work.std(ddof=1)) if n_samples > 1 else 0.0,
        basis_indices=indices,
        work=work,
        probabilities=dist.probabilities,
    )

