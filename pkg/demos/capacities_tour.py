"""Capacity triples for a few shared states and symmetry groups.

Run with ``python3 demos/capacities_tour.py``.
"""

import numpy as np

from asymdense import capacity, qmat, symmetry
from asymdense.qmat import BipartiteLayout, Sampler

L2 = BipartiteLayout(2, 2)


def show(label, rep):
    print(f"{label:<40s} local {rep.c_local:7.4f}   one-way {rep.c_oneway:7.4f}   global {rep.c_global:7.4f}")


# A Bell pair with an irreducible (Weyl-Heisenberg) group: every Pauli is a free encoding.
show("Bell, Weyl-Heisenberg", capacity.capacity_report(qmat.bell_state(2), symmetry.weyl_heisenberg(2), L2))

# The same pair when only phase rotations are free: one-way and global decoders now tie.
show("Bell, diagonal phases", capacity.capacity_report(qmat.bell_state(2), symmetry.diagonal_phases(2), L2))

# A partially entangled pair: the local capacity drops by the entanglement entropy h(1/4).
psi = np.sqrt(0.75) * qmat.ket(0, 4) + np.sqrt(0.25) * qmat.ket(3, 4)
show("sqrt(3/4)|00> + sqrt(1/4)|11>, WH", capacity.capacity_report(psi, symmetry.weyl_heisenberg(2), L2))

# Coherence: with a dephasing twirler the one-way and global capacities always coincide.
s = Sampler(1)
L4 = BipartiteLayout(4, 4)
for i in range(3):
    show(f"random pure state #{i}, dephasing", capacity.capacity_report(s.random_pure(16), symmetry.diagonal_phases(4), L4))

# A truncated two-mode squeezed vacuum with phase symmetry.
v = capacity.tmsv_truncated(np.arcsinh(1.0), 6)
show("TMSV nbar=1 (6 levels), phases", capacity.capacity_report(v, symmetry.diagonal_phases(6), BipartiteLayout(6, 6)))
