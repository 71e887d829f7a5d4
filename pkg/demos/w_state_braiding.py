"""
Braiding operators that make W states
=====================================

Build a four-qubit braiding operator, check that it solves the equation,
and watch it turn |0000> into a W-class state with one spectator qubit.
"""

import numpy as np

from gybo import instantiate_case, gybe_residual
from gybo.slocc import classify3, strip_spectators
from gybo.tensor_core import apply, basis_state

# the beta-family with beta1 = i/sqrt(3)
inst = instantiate_case("5A-i")
print("signature (d, m, l):", inst.signature)
print("resolved parameters:")
for name, value in sorted(inst.resolved_params.items()):
    if value != 0:
        print(f"  {name:7s} {value:.4f}")

print("equation residual:", gybe_residual(inst.R, inst.m, inst.l))

out = apply(inst.R, basis_state("0000")).normalize()
print("output support:")
for bits, amp in out.support().items():
    print(f"  |{bits}>  {amp:.4f}")

# the fourth qubit is untouched, so factor it out before classifying
core, spectators = strip_spectators(out)
print("spectators:", spectators)
rep = classify3(core)
print("class:", rep.cls, " three-tangle:", round(rep.three_tangle, 12))
print("pairwise concurrences:", {k: round(v, 4) for k, v in rep.concurrences.items()})
