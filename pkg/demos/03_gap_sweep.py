"""Small penalty-strength sweep: end-gap deviation and minimum-gap ratio.

Writes gap_sweep.csv and gap_sweep_summary.csv to the current directory.
Run: python3 demos/03_gap_sweep.py
"""

from __future__ import annotations

from paritycode.sweep import ExperimentConfig, default_r_grid, run_sweep

config = ExperimentConfig(
    n_logical=2,
    variants=("even_qutrit", "odd_qubit"),
    R_grid=default_r_grid(8),
    instances=40,
    base_seed=2024,
    schedule_points=51,
)
result = run_sweep(config)
paths = result.write("gap_sweep.csv")

print(f"{'variant':>12} {'R':>8} {'median de':>10} {'chi_bar':>8} {'excluded':>8} {'near 0':>6}")
for row in result.summary:
    chi = "-" if row.chi_bar is None else f"{row.chi_bar:.3f}"
    print(f"{row.variant:>12} {row.R:>8.2f} {row.median_delta_e:>10.2e} {chi:>8} {row.n_excluded:>8} {row.n_near_zero:>6}")
print("wrote", *paths)
