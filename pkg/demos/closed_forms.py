"""Closed-form tripartite values on GHZ, W and Bell x |0>.

Every unified measure on Bell x |0> collapses to the two-party Bell value,
while GHZ and W separate the measures.
"""
import numpy as np

from tripent import (
    CONCURRENCE,
    EOF,
    NEGATIVITY,
    TANGLE,
    bell,
    ghz,
    measure_pure_bipartite,
    measure_pure_tripartite,
    tensor,
    three_tangle,
    tsallis,
    w_state,
)
from tripent.states import basis_ket

kinds = [EOF, TANGLE, CONCURRENCE, NEGATIVITY, tsallis(2.0)]
bc = tensor(bell(), basis_ket([0], [2]))

print(f"{'measure':<14}{'GHZ':>10}{'W':>10}{'Bell x 0':>10}{'Bell':>10}")
for k in kinds:
    row = [measure_pure_tripartite(s, k) for s in (ghz(), w_state(), bc)] + [measure_pure_bipartite(bell(), k)]
    print(f"{k.label:<14}" + "".join(f"{v:10.6f}" for v in row))

print(f"\nthree-tangle  GHZ {three_tangle(ghz()):.6f}  W {three_tangle(w_state()):.2e}")
print(f"1.5 ln 2 = {1.5 * np.log(2):.9f}")
