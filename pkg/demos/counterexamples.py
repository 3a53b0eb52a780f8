"""Two-qubit states with prescribed spectra that separate the measures.

The marginal spectra are fitted numerically, then purified to three parties.
The sqrt-trace witness changes sign between the two states and the second
state breaks the purity-product inequality.
"""
from tripent.monogamy import marginal_compatibility, purity_product_witness, sqrt_trace_witness
from tripent.suites import SPECTRA_FIRST, SPECTRA_SECOND, witness_states

for name, target in (("first", SPECTRA_FIRST), ("second", SPECTRA_SECOND)):
    check = marginal_compatibility(target.joint, target.marginal_a_min, target.marginal_b_min)
    print(f"{name}: joint {target.joint}, marginal minima {target.marginal_a_min}, {target.marginal_b_min}")
    print(f"  compatibility slacks {tuple(round(s, 6) for s in check.slacks)}")

first, second = witness_states(seed=0)
print(f"\nsqrt-trace witness  first {sqrt_trace_witness(first):+.7f}  second {sqrt_trace_witness(second):+.7f}")
lhs, rhs = purity_product_witness(second)
print(f"purity product      Tr(B)^2 Tr(C)^2 = {lhs:.7f} < Tr(BC)^2 = {rhs:.7f}")
