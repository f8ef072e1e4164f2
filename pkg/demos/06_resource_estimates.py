"""From shot budgets to wall-clock time and energy.

Total circuit runs times per-run duration gives quantum runtime; energy
follows from 30 mW per physical qubit. Error-corrected execution picks
the smallest surface-code distance that fits the per-run error budget,
paying d (t_gate + t_meas) per layer and 2 d^2 physical qubits per
logical one. A configurable classical flop model provides the baseline
and the crossover size.
"""

from qkshots import (
    ClassicalProfile,
    FeatureMapConfig,
    HardwareProfile,
    choose_code_distance,
    circuit_depth,
    classical_cost,
    error_budget,
    find_crossover,
    quantum_cost,
)

family = "projected"
m = 100
shots = 100_000
hardware = HardwareProfile()  # 50 ns gates, 100 ns readout, 30 mW per qubit
# placeholder machine figures: calibrate c0 / flops / watts before trusting
# absolute numbers; only the 2^(alpha n) growth is meaningful out of the box
classical = ClassicalProfile(alpha=2.30, c0=1e7, flops_per_second=1e15, power_w=1e5)

print(f"{family} kernels, m = {m} points, N = {shots} shots per estimate\n")
print(" n  layers  d   phys.qubits   T_ideal      T_corrected   T_classical")
rows = []
for n in range(4, 25, 4):
    cfg = FeatureMapConfig(n_qubits=n, repetitions=6, entanglement="full")
    layers = circuit_depth(cfg, family)
    # per-run error budget from a nominal kernel scale; fixed here for the demo
    p_max = error_budget(family, 0.3, eps=1.0, delta_ensemble=0.05).p_max
    d = choose_code_distance(p_max, n, layers, hardware.physical_error_rate)
    ideal = quantum_cost(shots, cfg, family, m, profile=hardware)
    corrected = quantum_cost(
        shots, cfg, family, m, profile=hardware, corrected=True, error_budget=p_max
    )
    cls = classical_cost(family, n, m, classical)
    rows.append((n, ideal, corrected, cls))
    print(f"{n:>2}  {layers:>5}  {d:>2}  {corrected.physical_qubits:>11}  "
          f"{ideal.runtime_s:>10.3g}s  {corrected.runtime_s:>11.3g}s  "
          f"{cls.runtime_s:>10.3g}s")

ns = [r[0] for r in rows]
crossover_runtime = find_crossover(
    ns, [r[2].runtime_s for r in rows], [r[3].runtime_s for r in rows]
)
crossover_energy = find_crossover(
    ns, [r[2].energy_j for r in rows], [r[3].energy_j for r in rows]
)
print(f"\nruntime crossover (corrected quantum beats classical): "
      f"n = {crossover_runtime}")
print(f"energy crossover:                                       "
      f"n = {crossover_energy}")
print("\nenergy at the largest size:")
n, ideal, corrected, cls = rows[-1]
print(f"  ideal quantum:     {ideal.energy_j:.3g} J")
print(f"  error-corrected:   {corrected.energy_j:.3g} J")
print(f"  classical (model): {cls.energy_j:.3g} J")
