"""Spherical functions on real hyperbolic spaces.

phi_lambda(a_t) is an average over K of exp((i lambda - rho) H(a_t k)).  On the
hyperbolic plane this is the conical Legendre function, which gives an
independent check.  Large lambda t is handled by the Jost-function split,
where the plain K-average would need very high order.

    python demos/01_spherical_functions.py
"""

import numpy as np

from orbconv import build_space, phi_values, plancherel_weights, spherical_values
from orbconv.oracles import conical_function

h2 = build_space("real-hyperbolic", [2])
h3 = build_space("real-hyperbolic", [3])

lam = np.array([0.0, 0.5, 2.0, 8.0, 20.0])
print("H^2: phi_lambda(a_t) from the K-integral vs the Mehler-Fock integral")
print(f"{'t':>5} " + " ".join(f"{'lam=' + str(l):>14}" for l in lam))
for t in (0.5, 1.0, 3.0):
    ours = spherical_values(h2, lam, t).real
    ref = conical_function(lam, t)
    print(f"{t:5.1f} " + " ".join(f"{v:14.10f}" for v in ours))
    print(f"{'gap':>5} " + " ".join(f"{abs(a - b):14.1e}" for a, b in zip(ours, ref)))

print("\nH^3 has phi_lambda(t) = sin(lambda t) / (lambda sinh t):")
for t in (0.7, 2.0):
    got = spherical_values(h3, [1.5], t).real[0]
    print(f"  t = {t}: {got:.15f}  closed form {np.sin(1.5 * t) / (1.5 * np.sinh(t)):.15f}")

print("\nLarge lambda t through the Jost split (H^2, t = 2):")
for l in (100.0, 1000.0, 10000.0):
    print(f"  lambda = {l:7.0f}: phi = {phi_values(h2, [l], 2.0)[0]: .3e}")

print("\nPlancherel weight |c(lambda)|^-2 / 2pi grows like lambda^(n-1):")
big = np.geomspace(1e2, 1e4, 50)
for space in (h2, h3):
    slope = np.polyfit(np.log(big), np.log(plancherel_weights(space, big)), 1)[0]
    print(f"  {space.name}: fitted slope {slope:.6f}")
