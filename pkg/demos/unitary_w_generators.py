"""
Unitary generators for W_n
==========================

The family 1 + alpha (eta_1 + ... + eta_n) solves the equation only at
alpha = +-1/sqrt(3n - 4).  Rediscover that point by minimizing the
residual, then look at the normalized unitary operator.
"""

import numpy as np

from gybo.search import get_family, minimize
from gybo.operator_zoo import unitary_w_R
from gybo.slocc import strip_spectators, w_equivalence_certificate
from gybo.spectral import eigen, unitarity_deviation
from gybo.tensor_core import apply, basis_state
from gybo.ybe_verify import far_commutativity_check, order_probe

for n, start in [(3, 0.3), (4, 0.5)]:
    fam = get_family("Un", n)
    res = minimize(fam, [start])
    print(f"n={n}: alpha = {res.params[0].real:.9f}  "
          f"(1/sqrt(3n-4) = {1 / np.sqrt(3 * n - 4):.9f}), residual {res.residual:.1e}")

inst = unitary_w_R(3)
print("\nunitarity deviation:", unitarity_deviation(inst.R))
print("eigenvalue clusters:")
for c in eigen(inst.R).clusters:
    print(f"  {c.value:.6f}  x{c.algebraic}")

# R_j and R_(j+k) only commute once the windows stop overlapping
far = far_commutativity_check(inst, 5)
for k, v in far.items():
    print(f"  k={k}: relative commutator {v:.3g}")

# no power up to 1000 is a multiple of the identity
print("order probe up to 1000:", order_probe(inst.R, 1000))

out = apply(inst.R, basis_state("00000")).normalize()
core, spectators = strip_spectators(out)
ilo = w_equivalence_certificate(core)
print("\nspectators:", spectators)
print("first ILO factor:\n", np.round(ilo.factors[0], 4))
