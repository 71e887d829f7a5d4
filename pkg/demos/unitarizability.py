"""
Can a local change of basis make these operators unitary?
=========================================================

Run the obstruction cascade on a few registered cases: eigenvalue moduli,
diagonalizability, and factorability of (V V^dag)^-1 across single sites.
"""

from gybo import instantiate_case, ilo_unitarizability_test

for cid in ["5B", "5A-ii", "6B", "P1-phase", "P2-phase", "U3"]:
    rep = ilo_unitarizability_test(instantiate_case(cid))
    line = f"{cid:9s} {rep.verdict:30s} moduli spread {rep.moduli_spread:.3g}"
    if rep.cut_ranks:
        line += f"  cut ranks {dict(sorted(rep.cut_ranks.items()))} ({rep.basis} basis)"
    print(line)

# With degenerate eigenvalues the eigenbasis is not unique, so the last
# step only speaks for the basis it was given.
print("\nnote on 6B:", ilo_unitarizability_test(instantiate_case("6B")).note)
