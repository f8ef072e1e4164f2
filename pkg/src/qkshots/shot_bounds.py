"""Shot-count bounds: spread, concentration avoidance, noisy variants and
per-run error budgets.

Two effects set the number of circuit runs N needed for a useful kernel
estimate. The *spread* bound (Chebyshev) keeps the single-entry estimation
uncertainty below a fraction ``eps`` of the ensemble spread
``delta_ensemble`` with probability ``p_spread``:

    N >= G / ((1 - p_spread) * eps^2 * delta_ensemble^2),

with G the estimator variance factor: kappa (1 - kappa) for fidelity, and
``gamma^2 kappa^2 n sum_k V_k`` for the projected kernel, where V_k is the
delta-method variance bound of the per-qubit squared 2-norm difference
(binomial variances plus Cauchy-Schwarz covariance bounds).

The *concentration avoidance* bound keeps the measured proportion on the
correct side of the concentration value mu with probability ``p_ca``. For
fidelity (mu = 0) it reduces to N >= log_{1-q}(1 - p_ca), i.e. at least
one success with probability p_ca; the general case is solved from the
exact binomial CDF, with a Gaussian z-score approximation available for
proportions concentrating at mu = 1/2.

Noisy circuits keep the same structure: depolarising noise shifts success
probabilities towards their mixed-state values, the spread numerator picks
up a factor 4 (the error budget consumes half the allowed deviation) and
the binomial variance must be replaced by its worst-case bound.

All bounds return integer shot counts: ceilings of the real-valued
expressions (with a 1e-9 guard against floating dust), floored at 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import stats
from scipy.special import ndtri

from .kernels import (
    FIDELITY,
    PROJECTED,
    KERNEL_FAMILIES,
    KernelMatrix,
    kernel_statistics,
    projected_kernel,
)
from .measurement import (
    NoiseModel,
    depolarized_component_probability,
    depolarized_fidelity_probability,
    measured_proportions,
)
from .statevector import ConfigurationError, ReducedDensityMatrix

PQ_CONCENTRATION_VALUE = 0.5  # measured tomography proportions concentrate here
FQ_CONCENTRATION_VALUE = 0.0

_CEIL_GUARD = 1e-9
_SEARCH_CAP = 1 << 50


class ShotCount(int):
    """Integer shot count carrying a degeneracy flag.

    ``degenerate`` marks inputs for which the bound is not informative
    (zero variance, vanishing derivatives); the count is then the floor
    value 1.
    """

    degenerate: bool

    def __new__(cls, value: int, degenerate: bool = False) -> "ShotCount":
        obj = super().__new__(cls, value)
        obj.degenerate = degenerate
        return obj


def _ceil_shots(x: float, degenerate: bool = False) -> ShotCount:
    return ShotCount(max(1, math.ceil(x - _CEIL_GUARD)), degenerate)


def _check_spread_params(eps: float, delta_ensemble: float, p_spread: float) -> None:
    if eps <= 0.0:
        raise ValueError(f"eps must be > 0, got {eps}")
    if delta_ensemble <= 0.0:
        raise ValueError(
            "delta_ensemble must be > 0 (an ensemble with zero spread has "
            f"indistinguishable entries), got {delta_ensemble}"
        )
    if not 0.0 < p_spread < 1.0:
        raise ValueError(f"p_spread must be in (0, 1), got {p_spread}")


def _check_probability(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise ValueError(f"{name} must be in (0, 1), got {value}")


# ---------------------------------------------------------------------------
# spread bounds
# ---------------------------------------------------------------------------

def n_spread_fq(
    kappa: float, eps: float, delta_ensemble: float, p_spread: float
) -> ShotCount:
    """Chebyshev spread bound for a fidelity-kernel entry with true value
    ``kappa``. Degenerate at kappa in {0, 1} (zero binomial variance)."""
    _check_spread_params(eps, delta_ensemble, p_spread)
    if not 0.0 <= kappa <= 1.0:
        raise ValueError(f"kappa must be in [0, 1], got {kappa}")
    if kappa in (0.0, 1.0):
        return ShotCount(1, degenerate=True)
    bound = kappa * (1.0 - kappa) / (
        (1.0 - p_spread) * eps**2 * delta_ensemble**2
    )
    return _ceil_shots(bound)


def _proportion_vector(rho_x, rho_y) -> np.ndarray:
    """(n, 6) measured proportions: the three of x then the three of y."""
    rows = [
        list(measured_proportions(rx)) + list(measured_proportions(ry))
        for rx, ry in zip(rho_x, rho_y)
    ]
    return np.asarray(rows, dtype=float)


def pq_variance_terms(rho_x, rho_y) -> np.ndarray:
    """Per-qubit delta-method variance factor V_k of the projected kernel.

    With Z the six measured proportions of the pair, the derivative
    magnitudes are |dX/dZ_i| = 4 |Z_i - Z_(i+-3)| and

        V_k = (sum_i |dX/dZ_i| sqrt(Z_i (1 - Z_i)))^2,

    the closed form of the full variance-plus-covariance double sum.
    """
    if len(rho_x) != len(rho_y) or len(rho_x) == 0:
        raise ValueError("reduced-matrix lists must have equal nonzero length")
    z = _proportion_vector(rho_x, rho_y)
    grads = 4.0 * np.abs(z[:, :3] - z[:, 3:])
    grads = np.concatenate([grads, grads], axis=1)
    weights = np.sqrt(np.clip(z * (1.0 - z), 0.0, None))
    return np.sum(grads * weights, axis=1) ** 2


def pq_variance_terms_noise_robust(rho_x, rho_y) -> np.ndarray:
    """Worst-case V_k with every variance/covariance factor bounded by 1
    (the binomial variance formula is unavailable for noisy estimators):
    the plain double sum of derivative magnitudes."""
    if len(rho_x) != len(rho_y) or len(rho_x) == 0:
        raise ValueError("reduced-matrix lists must have equal nonzero length")
    z = _proportion_vector(rho_x, rho_y)
    grads = 4.0 * np.abs(z[:, :3] - z[:, 3:])
    return (2.0 * np.sum(grads, axis=1)) ** 2


def n_spread_pq(
    rho_x,
    rho_y,
    gamma: float,
    eps: float,
    delta_ensemble: float,
    p_spread: float,
    kappa: float | None = None,
) -> ShotCount:
    """Spread bound for a projected-kernel entry between two points given
    their reduced matrices. ``kappa`` defaults to the exact kernel value of
    the pair. Degenerate when the matrices coincide (all derivatives
    vanish)."""
    _check_spread_params(eps, delta_ensemble, p_spread)
    if gamma <= 0:
        raise ConfigurationError(f"gamma must be > 0, got {gamma}")
    if kappa is None:
        kappa = projected_kernel(rho_x, rho_y, gamma)
    v_total = float(np.sum(pq_variance_terms(rho_x, rho_y)))
    if v_total == 0.0:
        return ShotCount(1, degenerate=True)
    n = len(rho_x)
    bound = (
        n * gamma**2 * kappa**2 * v_total
        / ((1.0 - p_spread) * eps**2 * delta_ensemble**2)
    )
    return _ceil_shots(bound)


def n_spread_noisy_fq(
    eps: float, delta_ensemble: float, p_spread: float
) -> ShotCount:
    """Noisy spread bound for fidelity entries: 4 in the numerator (half
    the deviation is budgeted to circuit errors) and worst-case variance 1,
    so the bound no longer depends on the kernel value."""
    _check_spread_params(eps, delta_ensemble, p_spread)
    bound = 4.0 / ((1.0 - p_spread) * eps**2 * delta_ensemble**2)
    return _ceil_shots(bound)


def _depolarized_matrices(rho_list, p_error: float):
    out = []
    for rho in rho_list:
        d, r, i = rho.components
        out.append(
            ReducedDensityMatrix.from_components(
                (1.0 - p_error) * d + p_error * 0.5,
                (1.0 - p_error) * r,
                (1.0 - p_error) * i,
            )
        )
    return out


def n_spread_noisy_pq(
    rho_x,
    rho_y,
    gamma: float,
    eps: float,
    delta_ensemble: float,
    p_spread: float,
    p_error: float = 0.0,
    kappa: float | None = None,
) -> ShotCount:
    """Noisy spread bound for a projected-kernel entry.

    The kernel value and derivatives are evaluated at the depolarised
    reduced matrices; variance factors are bounded by 1.
    """
    _check_spread_params(eps, delta_ensemble, p_spread)
    if gamma <= 0:
        raise ConfigurationError(f"gamma must be > 0, got {gamma}")
    if p_error:
        rho_x = _depolarized_matrices(rho_x, p_error)
        rho_y = _depolarized_matrices(rho_y, p_error)
    if kappa is None:
        kappa = projected_kernel(rho_x, rho_y, gamma)
    v_total = float(np.sum(pq_variance_terms_noise_robust(rho_x, rho_y)))
    if v_total == 0.0:
        return ShotCount(1, degenerate=True)
    n = len(rho_x)
    bound = (
        4.0 * n * gamma**2 * kappa**2 * v_total
        / ((1.0 - p_spread) * eps**2 * delta_ensemble**2)
    )
    return _ceil_shots(bound)


# ---------------------------------------------------------------------------
# concentration avoidance bounds
# ---------------------------------------------------------------------------

def _at_least_one_success(m_true: float, n: int) -> float:
    # 1 - (1 - m)^n, stable for tiny m and large n
    return -math.expm1(n * math.log1p(-m_true))


def n_ca_fq(m_true: float, p_ca: float) -> ShotCount | float:
    """Smallest N giving at least one success with probability ``p_ca``
    when the per-run success probability is ``m_true``.

    Returns ``math.inf`` when ``m_true == 0`` (no N suffices).
    """
    _check_probability("p_ca", p_ca)
    if not 0.0 <= m_true <= 1.0:
        raise ValueError(f"success probability must be in [0, 1], got {m_true}")
    if m_true == 0.0:
        return math.inf
    if m_true == 1.0:
        return ShotCount(1)
    n = int(_ceil_shots(math.log(1.0 - p_ca) / math.log(1.0 - m_true)))
    while _at_least_one_success(m_true, n) < p_ca:  # absorb ceiling rounding
        n += 1
    return ShotCount(n)


def ca_condition_probability(n, m_true: float, mu: float):
    """Exact probability that the success count of Binomial(n, m_true)
    lands strictly on the correct side of ``n * mu``. Vectorised over n."""
    n = np.asarray(n)
    if m_true > mu:
        k_cut = np.floor(n * mu + _CEIL_GUARD)
        prob = stats.binom.sf(k_cut, n, m_true)
    else:
        k_top = np.ceil(n * mu - _CEIL_GUARD) - 1.0
        prob = np.where(
            k_top >= 0, stats.binom.cdf(np.maximum(k_top, 0.0), n, m_true), 0.0
        )
    return prob


def _ca_condition_holds(n: int, m_true: float, mu: float, p_ca: float) -> bool:
    return bool(ca_condition_probability(n, m_true, mu) >= p_ca)


_FULL_SCAN_CAP = 4_000_000


def n_ca_binomial_exact(m_true: float, mu: float, p_ca: float) -> ShotCount:
    """Smallest N satisfying the exact binomial correct-side condition.

    Doubling finds an upper bound; the minimum below it is then located by
    an exhaustive vectorised CDF scan. The strict-side condition is not
    monotone in N (the cut n*mu drifts across integers, so adjacent N can
    flip back to failing), which is why plain bisection would return a
    non-minimal crossing; above the scan cap, bisection plus a wide
    backward-scan window is used instead.
    """
    _check_probability("p_ca", p_ca)
    if not 0.0 < m_true < 1.0:
        raise ValueError(f"success probability must be in (0, 1), got {m_true}")
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu must be in [0, 1], got {mu}")
    if m_true == mu:
        raise ValueError(
            "bound not imposed: the true proportion equals the concentration value"
        )
    hi = 1
    while not _ca_condition_holds(hi, m_true, mu, p_ca):
        hi *= 2
        if hi > _SEARCH_CAP:
            raise RuntimeError(
                f"no N <= {_SEARCH_CAP} satisfies the condition "
                f"(m={m_true}, mu={mu}, p_ca={p_ca})"
            )
    if hi <= _FULL_SCAN_CAP:
        candidates = np.arange(1, hi + 1)
        ok = ca_condition_probability(candidates, m_true, mu) >= p_ca
        return ShotCount(int(candidates[np.argmax(ok)]))
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _ca_condition_holds(mid, m_true, mu, p_ca):
            hi = mid
        else:
            lo = mid
    window = max(4096, hi // 8)
    start = max(1, hi - window)
    candidates = np.arange(start, hi + 1)
    ok = ca_condition_probability(candidates, m_true, mu) >= p_ca
    return ShotCount(int(candidates[np.argmax(ok)]))


def n_ca_pq_normal(m_true: float, mu: float, p_ca: float) -> ShotCount:
    """Gaussian z-score approximation of the correct-side condition,
    appropriate for proportions concentrating away from the range edges:
    N >= z^2 m (1 - m) / (m - mu)^2 with z the p_ca normal quantile."""
    _check_probability("p_ca", p_ca)
    if not 0.0 < m_true < 1.0:
        raise ValueError(f"success probability must be in (0, 1), got {m_true}")
    if m_true == mu:
        raise ValueError(
            "bound not imposed: the true proportion equals the concentration value"
        )
    z = float(ndtri(p_ca))
    if z <= 0.0:
        return ShotCount(1)
    bound = z**2 * m_true * (1.0 - m_true) / (m_true - mu) ** 2
    return _ceil_shots(bound)


def n_ca_noisy_fq(
    kappa: float, p_ca: float, p_error: float, n_qubits: int
) -> ShotCount | float:
    """Noisy fidelity concentration-avoidance bound: the noiseless formula
    evaluated at the depolarised success probability."""
    return n_ca_fq(
        depolarized_fidelity_probability(kappa, p_error, n_qubits), p_ca
    )


def n_ca_noisy_pq_normal(
    m_true: float, mu: float, p_ca: float, p_error: float
) -> ShotCount:
    """Noisy z-score bound for a tomography proportion; depolarising leaves
    the concentration value 1/2 fixed."""
    return n_ca_pq_normal(
        depolarized_component_probability(m_true, p_error), mu, p_ca
    )


def n_ca_noisy_binomial_exact(
    m_true: float,
    mu: float,
    p_ca: float,
    p_error: float,
    family: str = PROJECTED,
    n_qubits: int | None = None,
) -> ShotCount:
    """Noisy exact-CDF bound with the family's depolarised proportion."""
    if family == FIDELITY:
        if n_qubits is None:
            raise ValueError("n_qubits is required for the fidelity family")
        shifted = depolarized_fidelity_probability(m_true, p_error, n_qubits)
    elif family == PROJECTED:
        shifted = depolarized_component_probability(m_true, p_error)
    else:
        raise ConfigurationError(
            f"family must be one of {KERNEL_FAMILIES}, got {family!r}"
        )
    return n_ca_binomial_exact(shifted, mu, p_ca)


# ---------------------------------------------------------------------------
# error budgets
# ---------------------------------------------------------------------------

_DENOMINATOR_FLOOR = 1e-15


@dataclass(frozen=True)
class ErrorBudget:
    """Maximum tolerable per-run circuit error probability.

    ``unconstrained`` flags a vanishing sensitivity denominator (the noise
    shift cannot move the estimate), in which case ``p_max`` is 1.
    """

    p_max: float
    unconstrained: bool = False


def error_budget_fq(
    kappa: float, eps: float, delta_ensemble: float, n_qubits: int
) -> ErrorBudget:
    """Depolarising error budget for a fidelity entry:
    p <= eps * delta_ensemble / (2 |2**-n - kappa|)."""
    if not 0.0 < kappa < 1.0:
        raise ValueError(f"kappa must be in (0, 1), got {kappa}")
    denom = 2.0 * abs(2.0 ** (-n_qubits) - kappa)
    if denom < _DENOMINATOR_FLOOR:
        return ErrorBudget(p_max=1.0, unconstrained=True)
    return ErrorBudget(p_max=min(1.0, eps * delta_ensemble / denom))


def error_budget_pq(
    kappa: float, eps: float, delta_ensemble: float
) -> ErrorBudget:
    """Depolarising error budget for a projected entry:
    p <= eps * delta_ensemble / (4 |kappa ln kappa|). The feature-map gamma
    cancels analytically."""
    if not 0.0 < kappa < 1.0:
        raise ValueError(f"kappa must be in (0, 1), got {kappa}")
    denom = 4.0 * abs(kappa * math.log(kappa))
    if denom < _DENOMINATOR_FLOOR:
        return ErrorBudget(p_max=1.0, unconstrained=True)
    return ErrorBudget(p_max=min(1.0, eps * delta_ensemble / denom))


def error_budget(
    family: str,
    kappa: float,
    eps: float,
    delta_ensemble: float,
    n_qubits: int | None = None,
) -> ErrorBudget:
    if family == FIDELITY:
        if n_qubits is None:
            raise ValueError("n_qubits is required for the fidelity family")
        return error_budget_fq(kappa, eps, delta_ensemble, n_qubits)
    if family == PROJECTED:
        return error_budget_pq(kappa, eps, delta_ensemble)
    raise ConfigurationError(
        f"family must be one of {KERNEL_FAMILIES}, got {family!r}"
    )


# ---------------------------------------------------------------------------
# representative scales of tomography proportions
# ---------------------------------------------------------------------------

def epsilon_r_from_components(table) -> float:
    """Mean absolute offset of measured proportions from 1/2, averaged over
    data points, qubits and the three components. ``table`` is the
    (m, n, 3) reduced-component table."""
    table = np.asarray(table, dtype=float)
    offsets = np.abs(
        np.stack(
            [table[..., 0] - 0.5, table[..., 1], table[..., 2]], axis=-1
        )
    )
    return float(np.mean(offsets))


def epsilon_r_from_kernel(
    kernel: KernelMatrix | np.ndarray, gamma: float, n_qubits: int
) -> float:
    """Root-mean-square proportion offset inferred from kernel entries
    alone: sqrt(-<ln k> / (12 gamma n)). Off-diagonal entries equal to 1
    carry no offset information and are excluded with a warning."""
    entries = (
        kernel.off_diagonal()
        if isinstance(kernel, KernelMatrix)
        else np.asarray(kernel, dtype=float).reshape(-1)
    )
    if np.any(entries <= 0.0):
        raise ValueError("kernel entries must be positive to take logarithms")
    if np.any(entries >= 1.0):
        ones = int(np.sum(entries >= 1.0))
        warnings.warn(
            f"excluding {ones} off-diagonal unit entries from the log mean",
            RuntimeWarning,
            stacklevel=2,
        )
        entries = entries[entries < 1.0]
        if entries.size == 0:
            raise ValueError("all off-diagonal entries equal 1; scale undefined")
    mean_log = float(np.mean(np.log(entries)))
    return math.sqrt(-mean_log / (12.0 * gamma * n_qubits))


# ---------------------------------------------------------------------------
# combined budgets
# ---------------------------------------------------------------------------

SPREAD = "spread"
CONCENTRATION_AVOIDANCE = "concentration_avoidance"


@dataclass
class ShotBudget:
    """Shot requirement combining both effects: N = max(N_spread, N_ca)."""

    family: str
    n_spread: int
    n_ca: int | float
    noisy: bool = False
    degenerate: bool = False
    inputs: dict = field(default_factory=dict)

    @property
    def n_required(self) -> int | float:
        return max(self.n_spread, self.n_ca)

    @property
    def effect_dominant(self) -> str:
        return SPREAD if self.n_spread >= self.n_ca else CONCENTRATION_AVOIDANCE

    def to_dict(self) -> dict:
        unbounded = math.isinf(self.n_ca)
        return {
            "family": self.family,
            "noisy": self.noisy,
            "n_spread": int(self.n_spread),
            "n_ca": None if unbounded else int(self.n_ca),
            "n_required": None if unbounded else int(self.n_required),
            "unbounded": unbounded,
            "effect_dominant": self.effect_dominant,
            "degenerate": self.degenerate,
            "inputs": dict(self.inputs),
        }


def entry_budget_fq(
    kappa: float,
    eps: float,
    delta_ensemble: float,
    p_spread: float,
    p_ca: float,
    noise: NoiseModel | None = None,
    n_qubits: int | None = None,
) -> ShotBudget:
    """Per-entry budget for one fidelity kernel value."""
    noisy = noise is not None and noise.p_error > 0.0
    if noisy:
        if n_qubits is None:
            raise ValueError("n_qubits is required for noisy fidelity budgets")
        n_spread = n_spread_noisy_fq(eps, delta_ensemble, p_spread)
        n_ca = n_ca_noisy_fq(kappa, p_ca, noise.p_error, n_qubits)
    else:
        n_spread = n_spread_fq(kappa, eps, delta_ensemble, p_spread)
        n_ca = n_ca_fq(kappa, p_ca)
    return ShotBudget(
        family=FIDELITY,
        n_spread=int(n_spread),
        n_ca=n_ca if math.isinf(n_ca) else int(n_ca),
        noisy=noisy,
        degenerate=getattr(n_spread, "degenerate", False),
        inputs={
            "kappa": kappa,
            "eps": eps,
            "delta_ensemble": delta_ensemble,
            "p_spread": p_spread,
            "p_ca": p_ca,
            "p_error": noise.p_error if noise else 0.0,
        },
    )


def entry_budget_pq(
    rho_x,
    rho_y,
    gamma: float,
    eps: float,
    delta_ensemble: float,
    p_spread: float,
    p_ca: float,
    noise: NoiseModel | None = None,
) -> ShotBudget:
    """Per-entry budget for one projected kernel value.

    The concentration bound applies per measured proportion; the budget
    takes the worst case over the 6 n proportions of the pair, skipping
    proportions equal to 1/2 (no bound imposed there).
    """
    noisy = noise is not None and noise.p_error > 0.0
    p_error = noise.p_error if noise else 0.0
    if noisy:
        n_spread = n_spread_noisy_pq(
            rho_x, rho_y, gamma, eps, delta_ensemble, p_spread, p_error
        )
    else:
        n_spread = n_spread_pq(
            rho_x, rho_y, gamma, eps, delta_ensemble, p_spread
        )
    proportions = _proportion_vector(rho_x, rho_y).reshape(-1)
    n_ca = 1
    imposed = False
    for q in proportions:
        q_eff = depolarized_component_probability(q, p_error)
        if abs(q_eff - PQ_CONCENTRATION_VALUE) < 1e-15:
            continue
        imposed = True
        n_ca = max(n_ca, int(n_ca_pq_normal(q_eff, PQ_CONCENTRATION_VALUE, p_ca)))
    kappa = projected_kernel(rho_x, rho_y, gamma)
    return ShotBudget(
        family=PROJECTED,
        n_spread=int(n_spread),
        n_ca=n_ca,
        noisy=noisy,
        degenerate=getattr(n_spread, "degenerate", False) or not imposed,
        inputs={
            "kappa": kappa,
            "gamma": gamma,
            "eps": eps,
            "delta_ensemble": delta_ensemble,
            "p_spread": p_spread,
            "p_ca": p_ca,
            "p_error": p_error,
            "ca_imposed": imposed,
        },
    )


def _representative_pair(scale: float):
    """Synthetic pair of reduced matrices whose measured proportions sit at
    1/2 +- scale in every component; used when only kernel entries are
    available."""
    # population 1/2 +- s, offdiag components +-s (x) / -+s (y) so that every
    # measured proportion is offset by exactly +-s from 1/2
    s = scale
    rx = ReducedDensityMatrix.from_components(0.5 + s, s, -s, validate=False)
    ry = ReducedDensityMatrix.from_components(0.5 - s, -s, s, validate=False)
    return [rx], [ry]


def dataset_budget(
    kernel: KernelMatrix,
    eps: float = 1.0,
    p_spread: float = 0.9,
    p_ca: float = 0.99,
    noise: NoiseModel | None = None,
    rho_table=None,
) -> ShotBudget:
    """Whole-dataset shot budget from kernel-matrix statistics.

    Fidelity: the representative entry is the ensemble median and the
    spread is its inter-quartile range; the concentration bound swaps the
    per-entry value for the median.

    Projected: the concentration bound uses the z-score formula at the
    root-mean-square proportion offset inferred from the kernel entries
    (``epsilon_r_from_kernel``). The spread bound averages the per-pair
    variance factors over the component table when one is supplied
    (``inputs["spread_path"] == "components"``), otherwise it evaluates a
    representative pair displaced by the inferred offset
    (``"kernel_scale"``).
    """
    stats_ = kernel_statistics(kernel)
    if stats_.iqr <= 0.0:
        raise ValueError(
            "ensemble IQR is zero; entries are indistinguishable and no "
            "finite spread budget exists"
        )
    noisy = noise is not None and noise.p_error > 0.0
    p_error = noise.p_error if noise else 0.0
    kappa_repr = stats_.median
    delta_ensemble = stats_.iqr
    n = kernel.config.n_qubits
    inputs: dict = {
        "kappa_repr": kappa_repr,
        "delta_ensemble": delta_ensemble,
        "eps": eps,
        "p_spread": p_spread,
        "p_ca": p_ca,
        "p_error": p_error,
    }

    if kernel.family == FIDELITY:
        if noisy:
            n_spread = n_spread_noisy_fq(eps, delta_ensemble, p_spread)
            n_ca = n_ca_noisy_fq(kappa_repr, p_ca, p_error, n)
            inputs["kappa_repr_noisy"] = depolarized_fidelity_probability(
                kappa_repr, p_error, n
            )
        else:
            n_spread = n_spread_fq(kappa_repr, eps, delta_ensemble, p_spread)
            n_ca = n_ca_fq(kappa_repr, p_ca)
        return ShotBudget(
            family=FIDELITY,
            n_spread=int(n_spread),
            n_ca=n_ca if math.isinf(n_ca) else int(n_ca),
            noisy=noisy,
            degenerate=getattr(n_spread, "degenerate", False),
            inputs=inputs,
        )

    gamma = kernel.gamma if kernel.gamma is not None else 1.0
    scale = epsilon_r_from_kernel(kernel, gamma, n)
    scale_eff = (1.0 - p_error) * scale
    inputs.update({"gamma": gamma, "epsilon_r": scale, "epsilon_r_noisy": scale_eff})
    if scale_eff <= 0.0:
        raise ValueError("inferred proportion offset is zero; no finite budget")
    mu = PQ_CONCENTRATION_VALUE
    z = float(ndtri(p_ca))
    n_ca = _ceil_shots(z**2 * mu * (1.0 - mu) / scale_eff**2) if z > 0 else ShotCount(1)

    kappa_eff = kappa_repr ** ((1.0 - p_error) ** 2) if noisy else kappa_repr
    if rho_table is not None:
        table = np.asarray(rho_table, dtype=float)
        v_mean = _mean_pair_variance_terms(table, p_error if noisy else 0.0, noisy)
        inputs["spread_path"] = "components"
    else:
        rx, ry = _representative_pair(scale_eff)
        terms = (
            pq_variance_terms_noise_robust(rx, ry)
            if noisy
            else pq_variance_terms(rx, ry)
        )
        v_mean = n * float(terms[0])
        inputs["spread_path"] = "kernel_scale"
    if v_mean == 0.0:
        n_spread = ShotCount(1, degenerate=True)
    else:
        numerator = n * gamma**2 * kappa_eff**2 * v_mean
        if noisy:
            numerator *= 4.0
        n_spread = _ceil_shots(
            numerator / ((1.0 - p_spread) * eps**2 * delta_ensemble**2)
        )
    return ShotBudget(
        family=PROJECTED,
        n_spread=int(n_spread),
        n_ca=int(n_ca),
        noisy=noisy,
        degenerate=getattr(n_spread, "degenerate", False),
        inputs=inputs,
    )


def _mean_pair_variance_terms(
    table: np.ndarray, p_error: float, noise_robust: bool
) -> float:
    """Mean over all point pairs of sum_k V_k, vectorised over the
    component table."""
    props = np.stack(
        [table[..., 0], table[..., 1] + 0.5, 0.5 - table[..., 2]], axis=-1
    )
    if p_error:
        props = (1.0 - p_error) * props + p_error * 0.5
    m = props.shape[0]
    if m < 2:
        raise ValueError("component table needs at least two points")
    diffs = 4.0 * np.abs(props[:, None, :, :] - props[None, :, :, :])
    if noise_robust:
        v = (2.0 * diffs.sum(axis=-1)) ** 2
    else:
        w = np.sqrt(np.clip(props * (1.0 - props), 0.0, None))
        cross = diffs * (w[:, None, :, :] + w[None, :, :, :])
        v = cross.sum(axis=-1) ** 2
    v_sum = v.sum(axis=-1)  # over qubits
    iu = np.triu_indices(m, k=1)
    return float(np.mean(v_sum[iu]))
