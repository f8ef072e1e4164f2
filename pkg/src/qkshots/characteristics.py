"""Embedding diagnostics: expressibility and an entanglement proxy.

Expressibility compares the second-moment statistics of the embedded
dataset with the Haar ensemble: the average fourth power of pairwise state
overlaps (i.e. the mean squared fidelity kernel, diagonal included) minus
the Haar value 1 / (2**(n-1) (2**n + 1)). Zero means the data embedding is
indistinguishable from Haar up to the second moment.

Entanglement is measured per qubit as the quantum relative entropy of the
one-qubit reduced state with respect to the maximally mixed state,
S(rho || I/2) = sum lam ln lam + ln 2 over the eigenvalues, averaged over
qubits and data points. It lives in [0, ln 2]; highly entangling maps push
it towards 0.
"""

from __future__ import annotations

import numpy as np

from ._util import parallel_map
from .feature_map import FeatureMapConfig, embed
from .kernels import embedding_matrix, fidelity_gram_values
from .statevector import reduce_to_qubit

LN2 = float(np.log(2.0))


def haar_second_moment(n_qubits: int) -> float:
    """Haar average of the squared fidelity: 1 / (2**(n-1) (2**n + 1))."""
    return 1.0 / (2.0 ** (n_qubits - 1) * (2.0**n_qubits + 1.0))


def expressibility(
    points, cfg: FeatureMapConfig, cap: int | None = None, threads: int = 1
) -> float:
    """Dataset expressibility estimate.

    Averages |overlap|^4 over all ordered pairs of embedded points,
    including the i = j diagonal, then subtracts the Haar term. Values
    near 0 indicate a 2-design-like embedding.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    amplitudes = embedding_matrix(points, cfg, cap=cap, threads=threads)
    fidelities = fidelity_gram_values(amplitudes) if points.shape[0] > 1 else np.ones((1, 1))
    return float(np.mean(fidelities**2) - haar_second_moment(cfg.n_qubits))


def relative_entropy_to_mixed(rho) -> float:
    """S(rho || I/2) in nats for a one-qubit state, from its eigenvalues.

    Eigenvalues are clamped into [0, 1] to absorb numerical dust, and
    0 ln 0 is taken as 0.
    """
    total = LN2
    for lam in rho.eigenvalues():
        lam = min(max(lam, 0.0), 1.0)
        if lam > 0.0:
            total += lam * np.log(lam)
    return float(min(max(total, 0.0), LN2))


def mean_relative_entropy(
    points, cfg: FeatureMapConfig, cap: int | None = None, threads: int = 1
) -> float:
    """Relative entropy to the maximally mixed state, averaged first over
    the n one-qubit reduced states of each embedded point, then over the
    dataset."""
    points = np.atleast_2d(np.asarray(points, dtype=float))

    def one(x) -> float:
        state = embed(x, cfg, cap=cap)
        return float(
            np.mean(
                [
                    relative_entropy_to_mixed(reduce_to_qubit(state, k))
                    for k in range(cfg.n_qubits)
                ]
            )
        )

    per_point = parallel_map(one, points, threads)
    return float(np.mean(per_point))
