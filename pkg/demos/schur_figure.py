"""Capacities of rho^{(x)N} under U(2) x S(N) as N grows, in both dimension conventions.

Run with ``python3 demos/schur_figure.py``.
"""

from asymdense import capacity

p = 0.25
print("N   c_local   c_oneway  c_global   | printed-factor c_oneway")
for N in range(1, 11):
    r = capacity.schur_example(N, p, "oracle")
    print(f"{N:<3d} {r.c_local:8.4f}  {r.c_oneway:8.4f}  {r.c_global:8.4f}   | {r.scenario['other_mode']['c_oneway']:8.4f}")

# Per-copy rates approach the single-copy asymmetry and entropy as N grows.
r = capacity.schur_example(20, p)
print(f"\nN=20 per copy: local {r.c_local / 20:.4f}, one-way {r.c_oneway / 20:.4f}, global {r.c_global / 20:.4f}")
print("\nCSV for N = 1..4:")
print(capacity.series_to_csv(capacity.figure_series(range(1, 5), p)), end="")
