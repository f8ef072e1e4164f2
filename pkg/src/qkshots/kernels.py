"""Exact (infinite-shot) fidelity and projected kernel values and Gram matrices.

The fidelity kernel of two embedded states is their squared overlap. The
projected kernel is a Gaussian of the squared 2-norm differences between
one-qubit reduced density matrices,

    k(x, y) = exp(-gamma * sum_k ||rho_k(x) - rho_k(y)||_2^2),

where for 2x2 Hermitian differences the squared 2-norm equals twice the
sum of squared component differences (population, Re offdiag, Im offdiag).

Ensemble statistics are always taken over the strictly-upper-triangle
entries; the diagonal is identically 1 and carries no information.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from ._util import parallel_map
from .feature_map import FeatureMapConfig, embed
from .statevector import (
    ConfigurationError,
    ReducedDensityMatrix,
    StateVector,
    inner_product,
    reduce_to_qubit,
)

FIDELITY = "fidelity"
PROJECTED = "projected"
KERNEL_FAMILIES = (FIDELITY, PROJECTED)


@dataclass
class KernelMatrix:
    """Symmetric m x m kernel matrix plus the configuration that produced it.

    ``metadata`` records provenance (dataset id, sampling parameters, ...);
    exact and shot-estimated matrices share this container.
    """

    values: np.ndarray
    family: str
    config: FeatureMapConfig
    gamma: float | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.family not in KERNEL_FAMILIES:
            raise ConfigurationError(
                f"family must be one of {KERNEL_FAMILIES}, got {self.family!r}"
            )
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
            raise ValueError(f"kernel matrix must be square, got {vals.shape}")
        if np.max(np.abs(vals - vals.T)) > 1e-10:
            raise ValueError("kernel matrix is not symmetric")
        if np.max(np.abs(np.diag(vals) - 1.0)) > 1e-10:
            raise ValueError("kernel diagonal must equal 1")
        self.values = vals

    @property
    def m(self) -> int:
        return self.values.shape[0]

    def off_diagonal(self) -> np.ndarray:
        """The m(m-1)/2 independent entries (strict upper triangle)."""
        iu = np.triu_indices(self.m, k=1)
        return self.values[iu]


@dataclass(frozen=True)
class KernelStatistics:
    """Summary statistics of the independent kernel entries."""

    mean: float
    std: float
    median: float
    iqr: float
    log_mean: float | None = None  # mean of ln(entries); projected family only


def fidelity_kernel(a: StateVector, b: StateVector) -> float:
    """Squared overlap |<b|a>|^2, clipped into [0, 1] against rounding."""
    value = abs(inner_product(a, b)) ** 2
    return float(min(max(value, 0.0), 1.0))


def projected_kernel(
    rho_x, rho_y, gamma: float = 1.0
) -> float:
    """Gaussian kernel of one-qubit reduced-matrix differences."""
    if gamma <= 0:
        raise ConfigurationError(f"gamma must be > 0, got {gamma}")
    if len(rho_x) != len(rho_y) or len(rho_x) == 0:
        raise ValueError(
            f"reduced-matrix lists must have equal nonzero length, "
            f"got {len(rho_x)} and {len(rho_y)}"
        )
    total = 0.0
    for rx, ry in zip(rho_x, rho_y):
        dd = rx.population - ry.population
        dr = rx.coherence_re - ry.coherence_re
        di = rx.coherence_im - ry.coherence_im
        total += 2.0 * (dd * dd + dr * dr + di * di)
    return float(np.exp(-gamma * total))


def embedding_matrix(
    points, cfg: FeatureMapConfig, cap: int | None = None, threads: int = 1
) -> np.ndarray:
    """Embed every data point once; rows are statevector amplitudes."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    states = parallel_map(lambda x: embed(x, cfg, cap=cap), points, threads)
    return np.stack([s.amplitudes for s in states])


def reduced_component_table(
    points, cfg: FeatureMapConfig, cap: int | None = None, threads: int = 1
) -> np.ndarray:
    """(m, n_qubits, 3) table of reduced-matrix components per data point.

    The last axis holds (population, Re offdiag, Im offdiag).
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))

    def one(x):
        state = embed(x, cfg, cap=cap)
        return [
            reduce_to_qubit(state, k).components for k in range(cfg.n_qubits)
        ]

    rows = parallel_map(one, points, threads)
    return np.asarray(rows, dtype=float)


def components_to_matrices(row: np.ndarray) -> list[ReducedDensityMatrix]:
    """Rebuild ReducedDensityMatrix objects from one table row (n, 3)."""
    return [
        ReducedDensityMatrix.from_components(d, r, i) for d, r, i in row
    ]


def _symmetrised(upper: np.ndarray) -> np.ndarray:
    """Mirror the strict upper triangle and set the diagonal to exactly 1."""
    sym = np.triu(upper, k=1)
    sym = sym + sym.T
    np.fill_diagonal(sym, 1.0)
    return sym


def fidelity_gram_values(embeddings: np.ndarray) -> np.ndarray:
    """|<psi_j|psi_i>|^2 for all pairs, bit-exactly symmetric, unit diagonal."""
    overlaps = embeddings @ embeddings.conj().T
    values = np.clip(np.abs(overlaps) ** 2, 0.0, 1.0)
    return _symmetrised(values)


def projected_gram_values(table: np.ndarray, gamma: float) -> np.ndarray:
    """Projected-kernel matrix from a component table (m, n, 3)."""
    if gamma <= 0:
        raise ConfigurationError(f"gamma must be > 0, got {gamma}")
    flat = table.reshape(table.shape[0], -1)
    sq = np.sum(flat**2, axis=1)
    dists = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (flat @ flat.T), 0.0)
    # ||rho_i - rho_j||_2^2 summed over qubits = 2 * squared component distance
    values = np.exp(-2.0 * gamma * dists)
    return _symmetrised(values)


def gram_matrix(
    points,
    cfg: FeatureMapConfig,
    family: str = FIDELITY,
    gamma: float = 1.0,
    cap: int | None = None,
    threads: int = 1,
    metadata: dict | None = None,
) -> KernelMatrix:
    """Exact Gram matrix over a dataset; embeddings are computed once per
    point and reused for all pairs."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[0] < 2:
        raise ValueError(f"need at least 2 points, got {points.shape[0]}")
    if family == FIDELITY:
        values = fidelity_gram_values(
            embedding_matrix(points, cfg, cap=cap, threads=threads)
        )
        gamma_out = None
    elif family == PROJECTED:
        table = reduced_component_table(points, cfg, cap=cap, threads=threads)
        values = projected_gram_values(table, gamma)
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
        metadata=dict(metadata or {}),
    )


def kernel_statistics(kernel: KernelMatrix) -> KernelStatistics:
    """Mean/std/median/IQR of the independent entries (median and IQR use
    linearly interpolated quantiles). For the projected family the mean of
    ln(entries) is also reported; zero entries yield -inf with a warning."""
    entries = kernel.off_diagonal()
    if entries.size == 0:
        raise ValueError("kernel matrix has no independent entries")
    q25, q50, q75 = np.percentile(entries, [25.0, 50.0, 75.0])
    log_mean = None
    if kernel.family == PROJECTED:
        if np.any(entries == 0.0):
            warnings.warn(
                "projected kernel has zero entries; mean log is -inf",
                RuntimeWarning,
                stacklevel=2,
            )
            log_mean = float("-inf")
        else:
            log_mean = float(np.mean(np.log(entries)))
    return KernelStatistics(
        mean=float(np.mean(entries)),
        std=float(np.std(entries)),
        median=float(q50),
        iqr=float(q75 - q25),
        log_mean=log_mean,
    )
