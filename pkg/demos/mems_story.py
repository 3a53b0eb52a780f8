"""Maximally entangled mixed states and the double MEMS construction.

Builds the MEMS family, classifies it, then audits the double MEMS whose
tripartite EoF equals ln(mr) and splits into the AB and BC pairs.
"""
import numpy as np

from tripent import EOF, MemsSpec, RoofConfig, audit, classify_mems, double_mems, mems, mems_extension_pure
from tripent.qcore import partial_trace

for probs in ([0.5, 0.5], [0.7, 0.3]):
    spec = MemsSpec(2, 2, probs)
    v = classify_mems(mems(spec))
    psi = mems_extension_pure(spec)
    ac = partial_trace(psi, [0, 2]).matrix
    dev = np.abs(ac - np.kron(partial_trace(psi, 0).matrix, partial_trace(psi, 2).matrix)).max()
    print(f"probs {probs}: {v.label.value:<10} rho_AC product deviation {dev:.1e}")

# parties stored as (B, A, C)
rep = audit(double_mems(2, 2, 2), EOF, 1.0, RoofConfig(restarts=6), labels="BAC")
print()
for name, value in rep.rows():
    print(f"{name:<14}{value:10.6f}")
print("flags", " ".join(k for k, on in rep.disentangling_flags.items() if on))
print(f"ln 4 = {np.log(4):.6f}")
