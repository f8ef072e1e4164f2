"""Dense statevector engine: gate layers, overlaps and one-qubit reductions.

Conventions used throughout the package:

* qubit ``k`` is the k-th least-significant bit of the basis-state index,
* ``Z|0> = +|0>``, so the Z eigenvalue of basis state ``b`` on qubit ``k``
  is ``+1`` when bit ``k`` of ``b`` is 0 and ``-1`` otherwise,
* global phase is never normalised away; every downstream quantity
  (overlap magnitudes, reduced matrices) is insensitive to it.

States are pure and immutable; operations return new :class:`StateVector`
instances. Memory is the only hard limit, enforced by a configurable qubit
cap (default 14, i.e. 16384 amplitudes).
"""

from __future__ import annotations

import numpy as np

DEFAULT_QUBIT_CAP = 14

_NORM_TOL = 1e-10
_HERMITICITY_TOL = 1e-10
_EIGENVALUE_TOL = -1e-10
_INV_SQRT2 = 1.0 / np.sqrt(2.0)


class ConfigurationError(ValueError):
    """Invalid run configuration (qubit counts, strategies, probabilities)."""


class StateVector:
    """Pure state of ``n_qubits`` qubits as ``2**n_qubits`` complex amplitudes.

    The amplitude array is made read-only on construction; treat instances
    as immutable values that are safe to share across threads.
    """

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes) -> None:
        if n_qubits < 1:
            raise ConfigurationError(f"n_qubits must be >= 1, got {n_qubits}")
        amps = np.array(amplitudes, dtype=complex, copy=True)
        if amps.shape != (2**n_qubits,):
            raise ValueError(
                f"expected {2**n_qubits} amplitudes for {n_qubits} qubits, "
                f"got shape {amps.shape}"
            )
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > _NORM_TOL:
            raise ValueError(f"state is not normalised: sum |a|^2 = {norm_sq!r}")
        amps.setflags(write=False)
        self.n_qubits = n_qubits
        self.amplitudes = amps

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"StateVector(n_qubits={self.n_qubits})"


class ReducedDensityMatrix:
    """One-qubit reduced density matrix and its three real components.

    The three independent real degrees of freedom are the ``|0>``
    population (the real diagonal entry ``entries[0, 0]``) and the real
    and imaginary parts of the upper off-diagonal entry.
    """

    __slots__ = ("entries",)

    def __init__(self, entries, validate: bool = True) -> None:
        mat = np.array(entries, dtype=complex, copy=True)
        if mat.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {mat.shape}")
        if validate:
            if np.max(np.abs(mat - mat.conj().T)) > _HERMITICITY_TOL:
                raise ValueError("matrix is not Hermitian within tolerance")
            trace = mat[0, 0].real + mat[1, 1].real
            if abs(trace - 1.0) > _NORM_TOL:
                raise ValueError(f"trace must be 1, got {trace!r}")
            if min(self._eigenvalues(mat)) < _EIGENVALUE_TOL:
                raise ValueError("matrix has a significantly negative eigenvalue")
        mat.setflags(write=False)
        self.entries = mat

    @staticmethod
    def _eigenvalues(mat: np.ndarray) -> tuple[float, float]:
        half_trace = 0.5 * (mat[0, 0].real + mat[1, 1].real)
        det = (mat[0, 0] * mat[1, 1] - mat[0, 1] * mat[1, 0]).real
        disc = np.sqrt(max(half_trace**2 - det, 0.0))
        return half_trace - disc, half_trace + disc

    @classmethod
    def from_components(
        cls, population: float, coherence_re: float, coherence_im: float,
        validate: bool = True,
    ) -> "ReducedDensityMatrix":
        """Build the matrix from its (population, Re offdiag, Im offdiag) triple."""
        off = coherence_re + 1j * coherence_im
        return cls(
            [[population, off], [np.conj(off), 1.0 - population]], validate=validate
        )

    @classmethod
    def maximally_mixed(cls) -> "ReducedDensityMatrix":
        return cls(np.eye(2) / 2.0, validate=False)

    @property
    def population(self) -> float:
        """Probability of measuring |0> in the computational basis."""
        return float(self.entries[0, 0].real)

    @property
    def coherence_re(self) -> float:
        return float(self.entries[0, 1].real)

    @property
    def coherence_im(self) -> float:
        return float(self.entries[0, 1].imag)

    @property
    def components(self) -> tuple[float, float, float]:
        return (self.population, self.coherence_re, self.coherence_im)

    def eigenvalues(self) -> tuple[float, float]:
        """Both eigenvalues, ascending; they sum to the trace."""
        return self._eigenvalues(self.entries)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        d, r, i = self.components
        return f"ReducedDensityMatrix(population={d:.6g}, offdiag={r:.6g}{i:+.6g}j)"


def vacuum_state(n_qubits: int, cap: int | None = None) -> StateVector:
    """All-zeros computational basis state on ``n_qubits`` qubits.

    Raises :class:`ConfigurationError` when ``n_qubits`` is outside
    ``[1, cap]``; the cap (default ``DEFAULT_QUBIT_CAP``) bounds memory use.
    """
    limit = DEFAULT_QUBIT_CAP if cap is None else cap
    if not 1 <= n_qubits <= limit:
        raise ConfigurationError(
            f"n_qubits must be in [1, {limit}], got {n_qubits}"
        )
    amps = np.zeros(2**n_qubits, dtype=complex)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def apply_hadamard_layer(state: StateVector) -> StateVector:
    """Apply a Hadamard gate to every qubit."""
    n = state.n_qubits
    tensor = state.amplitudes.reshape((2,) * n)
    for axis in range(n):
        lo = np.take(tensor, 0, axis=axis)
        hi = np.take(tensor, 1, axis=axis)
        tensor = np.stack((lo + hi, lo - hi), axis=axis) * _INV_SQRT2
    return StateVector(n, tensor.reshape(-1))


def apply_diagonal_phase(state: StateVector, phases) -> StateVector:
    """Multiply amplitude ``b`` by ``exp(1j * phases[b])``."""
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (state.dim,):
        raise ValueError(
            f"expected {state.dim} phases, got shape {phases.shape}"
        )
    return StateVector(state.n_qubits, state.amplitudes * np.exp(1j * phases))


def inner_product(a: StateVector, b: StateVector) -> complex:
    """Overlap ``<b|a>`` of two equally-sized states."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(
            f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}"
        )
    return complex(np.vdot(b.amplitudes, a.amplitudes))


def reduce_to_qubit(state: StateVector, k: int) -> ReducedDensityMatrix:
    """Trace out all qubits except ``k`` in O(2**n), without forming the full
    density matrix."""
    n = state.n_qubits
    if not 0 <= k < n:
        raise IndexError(f"qubit index {k} out of range for {n} qubits")
    # index b = high * 2**(k+1) + bit_k * 2**k + low
    blocks = state.amplitudes.reshape(2 ** (n - 1 - k), 2, 2**k)
    rho = np.einsum("hil,hjl->ij", blocks, blocks.conj())
    return ReducedDensityMatrix(rho)
