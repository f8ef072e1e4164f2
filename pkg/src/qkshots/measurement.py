"""Finite-shot kernel estimation as binomial sampling.

Each circuit run is a Bernoulli trial: for the fidelity kernel, success
means the encode-decode circuit collapsed back to the vacuum state; for
tomography, success means the measured qubit returned 0 in the chosen
basis. Success probabilities are therefore exact kernel values or
reduced-matrix components, and a batch of N shots is one binomial draw.

Noise enters analytically: with per-run error probability p the state is
replaced by the maximally mixed one, so a success probability q becomes
(1-p) q + p q_mix with q_mix = 2**-n for full-state projection and 1/2 for
a single-qubit marginal. Tomography bits are sampled as independent
per-qubit binomials; every estimator in scope depends only on its own
marginal, so joint bitstring correlations never matter and sampling stays
O(n) per batch.

Reproducibility: all draws come from generators keyed by
``SeedSequence(entropy=seed, spawn_key=(stream, *indices))``, so results
are bit-identical for a given seed regardless of scheduling or thread
count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._util import parallel_map
from .feature_map import FeatureMapConfig
from .kernels import (
    FIDELITY,
    PROJECTED,
    KERNEL_FAMILIES,
    KernelMatrix,
    embedding_matrix,
    fidelity_gram_values,
    projected_gram_values,
    reduced_component_table,
)
from .statevector import ConfigurationError, ReducedDensityMatrix

# basis order for tomography draws: computational, Hadamard, Hadamard-phase
BASES = ("z", "x", "y")


@dataclass(frozen=True)
class NoiseModel:
    """Per-run depolarising error: with probability ``p_error`` the run
    produced the maximally mixed state instead of the intended one."""

    p_error: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_error <= 1.0:
            raise ConfigurationError(
                f"p_error must be in [0, 1], got {self.p_error}"
            )


IDEAL = NoiseModel(0.0)


def depolarized_fidelity_probability(
    kappa: float, p_error: float, n_qubits: int
) -> float:
    """Success probability of the vacuum projection under depolarising
    noise: (1-p) kappa + p 2**-n."""
    return (1.0 - p_error) * kappa + p_error * 2.0 ** (-n_qubits)


def depolarized_component_probability(q: float, p_error: float) -> float:
    """Single-qubit marginal success probability under depolarising noise:
    (1-p) q + p/2."""
    return (1.0 - p_error) * q + p_error * 0.5


def measured_proportions(rho: ReducedDensityMatrix) -> tuple[float, float, float]:
    """Success probabilities of the three tomography bases (z, x, y).

    z reads the population directly, x reads Re offdiag + 1/2 and y reads
    1/2 - Im offdiag.
    """
    d, r, i = rho.components
    return (d, r + 0.5, 0.5 - i)


def components_from_proportions(z: float, x: float, y: float) -> tuple[float, float, float]:
    """Invert ``measured_proportions``: estimated (population, Re, Im)."""
    return (z, x - 0.5, 0.5 - y)


@dataclass(frozen=True)
class ShotResult:
    """One finite-shot estimate of a fidelity-kernel entry."""

    estimate: float
    n_shots: int
    successes: int
    seed: int


@dataclass
class TomographyResult:
    """Finite-shot single-qubit tomography of one embedded data point."""

    matrices: list[ReducedDensityMatrix]
    successes: np.ndarray  # (n_qubits, 3) counts per basis, order BASES
    n_shots: int
    seed: int
    metadata: dict = field(default_factory=dict)


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=tuple(key))
    )


def _check_shots(n_shots: int) -> None:
    if n_shots < 1:
        raise ValueError(f"n_shots must be >= 1, got {n_shots}")


def sample_fidelity(
    kappa_true: float,
    n_shots: int,
    noise: NoiseModel = IDEAL,
    n_qubits: int = 1,
    seed: int = 0,
    stream: int = 0,
) -> ShotResult:
    """Draw the vacuum-projection statistics for one kernel entry."""
    _check_shots(n_shots)
    if not 0.0 <= kappa_true <= 1.0:
        raise ValueError(f"kernel value must be in [0, 1], got {kappa_true}")
    q = depolarized_fidelity_probability(kappa_true, noise.p_error, n_qubits)
    successes = int(_rng(seed, stream).binomial(n_shots, q))
    return ShotResult(
        estimate=successes / n_shots,
        n_shots=n_shots,
        successes=successes,
        seed=seed,
    )


def _clip_physical(d: float, r: float, i: float) -> tuple[float, float, float]:
    """Project estimated components onto the physical (PSD) set.

    The population is a binomial proportion and already lies in [0, 1]; the
    off-diagonal pair is radially rescaled when it exceeds the PSD radius
    sqrt(d (1-d)).
    """
    d = min(max(d, 0.0), 1.0)
    radius_sq = d * (1.0 - d)
    coh_sq = r * r + i * i
    if coh_sq > radius_sq:
        scale = np.sqrt(radius_sq / coh_sq) if coh_sq > 0 else 0.0
        r *= scale
        i *= scale
    return d, r, i


def sample_tomography(
    rho_list,
    n_shots: int,
    noise: NoiseModel = IDEAL,
    seed: int = 0,
    stream: int = 0,
) -> TomographyResult:
    """Estimate every one-qubit reduced matrix of one data point.

    Each qubit and basis is an independent Binomial(n_shots, q_f) draw with
    q_f the depolarised basis success probability; the estimated
    proportions are inverted to components and clipped to the physical set.
    """
    _check_shots(n_shots)
    counts = np.zeros((len(rho_list), len(BASES)), dtype=int)
    matrices = []
    for k, rho in enumerate(rho_list):
        estimates = []
        for b, q in enumerate(measured_proportions(rho)):
            q_f = depolarized_component_probability(q, noise.p_error)
            q_f = min(max(q_f, 0.0), 1.0)  # guard rounding dust at the edges
            counts[k, b] = _rng(seed, stream, k, b).binomial(n_shots, q_f)
            estimates.append(counts[k, b] / n_shots)
        d, r, i = _clip_physical(*components_from_proportions(*estimates))
        matrices.append(ReducedDensityMatrix.from_components(d, r, i))
    return TomographyResult(
        matrices=matrices, successes=counts, n_shots=n_shots, seed=seed
    )


def total_shot_count(family: str, m: int, n_shots: int) -> int:
    """Circuit runs needed for a full m-point Gram matrix.

    Fidelity estimates each of the m(m-1)/2 independent entries with
    n_shots runs; projected tomography spends 3 n_shots runs per data
    point."""
    if family == FIDELITY:
        return n_shots * m * (m - 1) // 2
    if family == PROJECTED:
        return 3 * m * n_shots
    raise ConfigurationError(
        f"family must be one of {KERNEL_FAMILIES}, got {family!r}"
    )


def sample_gram(
    points,
    cfg: FeatureMapConfig,
    family: str = FIDELITY,
    gamma: float = 1.0,
    n_shots: int = 1024,
    noise: NoiseModel = IDEAL,
    seed: int = 0,
    cap: int | None = None,
    threads: int = 1,
) -> KernelMatrix:
    """Finite-shot estimate of the full Gram matrix.

    Fidelity: every upper-triangle entry is sampled independently.
    Projected: each point's tomography is sampled once (per basis), then
    all entries follow by classical post-processing, so estimation errors
    of entries sharing a data point are correlated, exactly as on hardware.
    """
    _check_shots(n_shots)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    m = points.shape[0]
    if m < 2:
        raise ValueError(f"need at least 2 points, got {m}")

    if family == FIDELITY:
        exact = fidelity_gram_values(
            embedding_matrix(points, cfg, cap=cap, threads=threads)
        )
        pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]

        def draw(pair):
            i, j = pair
            q = depolarized_fidelity_probability(
                exact[i, j], noise.p_error, cfg.n_qubits
            )
            return _rng(seed, i, j).binomial(n_shots, q) / n_shots

        values = np.zeros((m, m))
        for (i, j), est in zip(pairs, parallel_map(draw, pairs, threads)):
            values[i, j] = est
        sym = np.triu(values, k=1)
        values = sym + sym.T
        np.fill_diagonal(values, 1.0)
        gamma_out = None
    elif family == PROJECTED:
        table = reduced_component_table(points, cfg, cap=cap, threads=threads)

        def tomo(i):
            rhos = [
                ReducedDensityMatrix.from_components(*table[i, k])
                for k in range(cfg.n_qubits)
            ]
            result = sample_tomography(
                rhos, n_shots, noise=noise, seed=seed, stream=i
            )
            return [rho.components for rho in result.matrices]

        estimated = np.asarray(parallel_map(tomo, range(m), threads))
        values = projected_gram_values(estimated, gamma)
        gamma_out = gamma
    else:
        raise ConfigurationError(
            f"family must be one of {KERNEL_FAMILIES}, got {family!r}"
        )

    return KernelMatrix(
        values=values,
        family=family,
        config=cfg,
        gamma=gamma_out,
        metadata={
            "estimated": True,
            "n_shots": n_shots,
            "p_error": noise.p_error,
            "seed": seed,
            "total_shots": total_shot_count(family, m, n_shots),
        },
    )
