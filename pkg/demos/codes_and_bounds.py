"""Explicit and random dense codes, the one-shot achievability bound and the strong converse.

Run with ``python3 demos/codes_and_bounds.py``.
"""

import numpy as np

from asymdense import capacity, oneshot, protocol, qmat, symmetry
from asymdense.qmat import BipartiteLayout, Sampler

# Superdense coding as a special case: codewords I and X on a Bell pair decode perfectly.
wh = symmetry.weyl_heisenberg(2)
code = protocol.two_stage_protocol(qmat.bell_state(2), wh, BipartiteLayout(2, 2), protocol.make_hash(2, 2, Sampler(0)), wh, 2, [0, 2])
print(f"Bell with codewords I, X: exact error {code.exact_error:.2e}, rate {np.log2(code.M):.0f} bit")

# Random codes on rho^{(x)2} with the Casimir block twirl.
psi, L = capacity.schur_state(2, 0.25, "uniform")
blocks = symmetry.casimir_su2_blocks(2)
sym = symmetry.twirl(blocks, capacity.marginal_A(psi, L))
print("\nT  M   mean error   mean bound   converse success bound (alpha=1.5)")
for T, M in [(1, 2), (2, 2), (2, 4), (1, 8)]:
    recs = protocol.simulate_random_codes(psi, blocks, L, blocks, T, M, range(100))
    err = np.mean([r["exact_error"] for r in recs])
    bnd = np.mean([r["bound"] for r in recs])
    conv = oneshot.strong_converse_success(sym, M, alpha=1.5).bound
    print(f"{T}  {M}   {err:10.4f}   {bnd:10.4f}   {conv:8.4f}")

# One-shot achievable rates from the Legendre transform of the symmetric decomposition.
xi = symmetry.symmetric_decomposition(psi, blocks, L)
print(f"\nH(G(Psi_A)) = {capacity.capacity_locality(psi, blocks, L):.4f} bits")
for eps in (0.5, 0.1, 0.01):
    print(f"eps={eps:<5}  statement rate {oneshot.oneshot_achievable_rate(xi, eps, 'statement'):8.4f}   proof rate {oneshot.oneshot_achievable_rate(xi, eps, 'proof'):8.4f}")

# Above capacity the success bound decays geometrically in the number of copies.
for row in oneshot.converse_decay(sym, 0.2, [5, 10, 20, 40]):
    print(f"n={row['n']:<3d} success bound {row['bound']:.4f} (alpha={row['alpha']:.3f})")

# Second-order behaviour of the achievable rate.
tab = oneshot.second_order_check(xi, [10, 100, 1000])
for r in tab.rows:
    print(f"n={r.n:<5d} rate/n {r.rate:.4f}  Gaussian approx {r.approx:.4f}  residual*sqrt(n) {r.scaled_residual:+.4f}")
