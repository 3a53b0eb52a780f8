"""Monogamy exponents for the tangle and EoF over random three-qubit states."""
from tripent import EOF, TANGLE, RoofConfig, monogamy_exponent, random_pure, w_state

samples = [random_pure((2, 2, 2), seed=s) for s in range(20)]
config = RoofConfig(restarts=6)
for kind in (TANGLE, EOF):
    est = monogamy_exponent(samples, kind, 1e-6, config)
    print(f"{kind.label:<8} alpha* {est.alpha_star:.6f}  violations {est.violations}  ceiling hits {est.ceiling_hits}")

w = monogamy_exponent([w_state()], TANGLE, 1e-8, config)
print(f"W state tangle exponent {w.alpha_star:.8f} (bracket {w.bracket[0]:.8f}, {w.bracket[1]:.8f})")
