"""The transpose as a symmetry-preserving but non-physical encoder.

Run with ``python3 demos/positive_encoders.py``.
"""

import numpy as np

from asymdense import protocol, qmat, symmetry
from asymdense.qmat import BipartiteLayout, Sampler

tw = symmetry.diagonal_phases(2)
for name, E in [("identity", symmetry.identity_channel(2)), ("Pauli Z", symmetry.unitary_channel(symmetry.PAULI["Z"])),
                ("transpose", symmetry.transpose_channel(2)), ("dephasing", symmetry.dephasing_channel(2))]:
    c = symmetry.classify_encoder(E, tw)
    print(f"{name:<10s} commutes with twirl {c.co1!s:<5}  CP-covariant {c.in_Ecp!s:<5}  PPT class {c.in_Eppt!s:<5}")

r = protocol.transpose_encoder_experiment(qmat.bell_state(2), tw, BipartiteLayout(2, 2), samples=1000, sampler=Sampler(0))
print(f"\ntranspose: min Choi eigenvalue {r['choi_min_eig']:+.3f}, min eigenvalue on Bell {r['output_min_eig']:+.3f}")
print(f"smallest value over 1000 product effects: {r['min_product_value']:+.3e}")

# The modulus of a partial transpose factorizes once the A-marginal root is transposed as well.
for conv in ("literal", "transposed"):
    res = protocol.pt_modulus_check(200, (2, 3), conv, Sampler(1))
    print(f"|X^T_F| factorization, {conv:<10s}: max residual {res['residual']:.2e}")
