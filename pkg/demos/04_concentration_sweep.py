"""Exponential value concentration and extrapolated shot budgets.

Kernel statistics collapse exponentially with qubit count for
concentrating embeddings. Sweeping machine sizes on simulable instances,
fitting value = C 2^(alpha n) on the log scale (with elbow-selected
prefix drops) and extrapolating predicts the shot cost of sizes far
beyond simulation.
"""

import numpy as np

from qkshots import (
    concentration_check,
    extrapolate,
    generate_twonorm,
    preprocess,
    stratify,
    sweep,
)

dataset = preprocess(generate_twonorm(7400, n_features=20, seed=7))
subset = stratify(dataset, subset_size=100, seed=11)[0]
ns = list(range(2, 11))

series = sweep(
    subset,
    family="fidelity",
    repetitions=1,
    entanglement="linear",
    n_values=ns,
    eps=1.0,
    p_spread=0.9,
    p_ca=0.99,
)

print("statistic series over n = 2..10 (fidelity, linear, r = 1):")
for name in ("median", "iqr", "n_spread", "n_ca"):
    values = ", ".join(f"{v:.3g}" for v in series[name].values)
    print(f"  {name:>9}: {values}")

print("\nfitted decay laws value = C 2^(alpha n):")
fits = {}
for name in ("median", "iqr", "n_spread", "n_ca"):
    fit = series[name].fit()
    fits[name] = fit
    status = "valid" if fit.valid else "REJECTED"
    print(f"  {name:>9}: alpha = {fit.alpha:+.3f}, R^2 = {fit.r_squared:.5f}, "
          f"dropped {fit.dropped_prefix} points ({status})")

report = concentration_check(series["median"], mu=0.0)
print(f"\nmedian concentrates towards 0: {report.concentrated} "
      f"(decay base b = {report.decay_base:.2f})")

print("\nextrapolated per-entry shot requirement:")
for target in (15, 20, 30):
    n_spread = extrapolate(fits["n_spread"], target)
    n_ca = extrapolate(fits["n_ca"], target)
    print(f"  n = {target}: N = max(spread, ca) "
          f"= max({n_spread:.3g}, {n_ca:.3g}) = {max(n_spread, n_ca):.3g}")
