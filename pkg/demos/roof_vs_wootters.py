"""Numerical convex roof against the two-qubit Wootters formula.

Prints the roof value, the closed form and the optimiser's restart spread
for a handful of random mixed states.
"""
import numpy as np

from tripent import EOF, RoofConfig, convex_roof, random_mixed, wootters_ef

config = RoofConfig(restarts=8, seed=1)
print(f"{'rank':>4} {'roof':>12} {'wootters':>12} {'diff':>10} {'spread':>10}")
for seed in range(8):
    rho = random_mixed((2, 2), rank=1 + seed % 4, seed=seed)
    res = convex_roof(rho, EOF, config=config)
    exact = wootters_ef(rho)[1]
    spread = np.ptp(res.restart_values)
    print(f"{1 + seed % 4:>4} {res.value:12.9f} {exact:12.9f} {res.value - exact:10.2e} {spread:10.2e}")
