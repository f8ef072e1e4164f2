"""Data embedding circuit: Hadamard layers plus data-dependent Z phases.

One repetition applies a Hadamard on every qubit followed by a diagonal
phase built from single-qubit angles ``x_i`` and pair angles
``(pi - x_i) * (pi - x_j)``, with the pair set chosen by the entanglement
strategy. The whole block is repeated ``repetitions`` times. The map
carries no trainable parameters; it is a function of the data alone.

A data point is a plain 1-D float array with at least ``n_qubits`` finite
entries; only the first ``n_qubits`` features are encoded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .statevector import (
    ConfigurationError,
    StateVector,
    apply_diagonal_phase,
    apply_hadamard_layer,
    vacuum_state,
)

LINEAR = "linear"
FULL = "full"
ENTANGLEMENT_STRATEGIES = (LINEAR, FULL)


@dataclass(frozen=True)
class FeatureMapConfig:
    """Shape of the embedding circuit: width, depth and pair connectivity."""

    n_qubits: int
    repetitions: int = 1
    entanglement: str = LINEAR

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise ConfigurationError(f"n_qubits must be >= 1, got {self.n_qubits}")
        if self.repetitions < 1:
            raise ConfigurationError(
                f"repetitions must be >= 1, got {self.repetitions}"
            )
        if self.entanglement not in ENTANGLEMENT_STRATEGIES:
            raise ConfigurationError(
                f"entanglement must be one of {ENTANGLEMENT_STRATEGIES}, "
                f"got {self.entanglement!r}"
            )

    def pair_indices(self) -> list[tuple[int, int]]:
        """Qubit pairs coupled by the strategy: the chain (i, i+1) for
        'linear', all unordered pairs for 'full'."""
        n = self.n_qubits
        if self.entanglement == LINEAR:
            return [(i, i + 1) for i in range(n - 1)]
        return [(i, j) for i in range(n) for j in range(i + 1, n)]


def _as_features(x, n_qubits: int) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size < n_qubits:
        raise ValueError(
            f"data point has {x.size} features, need at least {n_qubits}"
        )
    if not np.all(np.isfinite(x[:n_qubits])):
        raise ValueError("data point contains non-finite features")
    return x[:n_qubits]


def encoding_angles(x, cfg: FeatureMapConfig):
    """Rotation angles for one data point.

    Returns ``(singles, pairs)`` where ``singles[i] = x_i`` and
    ``pairs[(i, j)] = (pi - x_i) * (pi - x_j)`` for every coupled pair.
    """
    feats = _as_features(x, cfg.n_qubits)
    singles = feats.copy()
    pairs = {
        (i, j): (np.pi - feats[i]) * (np.pi - feats[j])
        for i, j in cfg.pair_indices()
    }
    return singles, pairs


def _z_sign_table(n_qubits: int) -> np.ndarray:
    """(n, 2**n) table of Z eigenvalues: +1 where the qubit's bit is 0."""
    idx = np.arange(2**n_qubits)
    bits = (idx[None, :] >> np.arange(n_qubits)[:, None]) & 1
    return 1.0 - 2.0 * bits


def phase_profile(x, cfg: FeatureMapConfig) -> np.ndarray:
    """Diagonal phase accumulated per basis state for one repetition.

    Entry ``b`` is ``sum_i singles[i] z_i(b) + sum_(i,j) pairs[i,j] z_i(b) z_j(b)``
    with ``z_i(b) = +1`` when bit ``i`` of ``b`` is 0.
    """
    singles, pairs = encoding_angles(x, cfg)
    signs = _z_sign_table(cfg.n_qubits)
    phases = singles @ signs
    for (i, j), angle in pairs.items():
        phases += angle * signs[i] * signs[j]
    return phases


def embed(x, cfg: FeatureMapConfig, cap: int | None = None) -> StateVector:
    """Embed a data point: apply ``repetitions`` blocks of (Hadamard layer,
    diagonal phase) to the vacuum state."""
    phases = phase_profile(x, cfg)
    state = vacuum_state(cfg.n_qubits, cap=cap)
    for _ in range(cfg.repetitions):
        state = apply_hadamard_layer(state)
        state = apply_diagonal_phase(state, phases)
    return state
