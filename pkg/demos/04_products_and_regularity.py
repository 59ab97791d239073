"""Derivatives of the density, and products of hyperbolic planes.

With r >= dim + k + 1 generators the density is C^k.  The derivative is
computed under the spectral integral and compared with finite differences.
On a product of rank-one spaces everything factorizes, and the thresholds
use the largest factor dimension.

    python demos/04_products_and_regularity.py
"""

from orbconv import (
    OrbitalConvolution,
    ProductConvolution,
    ProductSpace,
    ThresholdError,
    build_space,
    density_at,
    density_derivative,
    product_l2,
    product_profile,
    product_regularity_report,
)

h2 = build_space("real-hyperbolic", [2])
h3 = build_space("real-hyperbolic", [3])

conv = OrbitalConvolution(h2, (0.8, 1.0, 1.3, 1.7))
h = 1e-4
print("C^1 density on H^2 with r = 4")
print(f"  t = 0.0: analytic {density_derivative(conv, 0.0, 1): .8e}   (even in t, so 0)")
for t in (0.5, 1.0, 2.0):
    d = density_derivative(conv, t, 1)
    fd = (density_at(conv, t + h) - density_at(conv, t - h)) / (2 * h)
    print(f"  t = {t}: analytic {d: .8e}   finite difference {fd: .8e}")

try:
    density_derivative(OrbitalConvolution(h2, (1.0, 1.0, 1.0)), 1.5, 1)
except ThresholdError as exc:
    print(f"  r = 3, k = 1 refused: {exc}")

print("\nH^2 x H^2 with r = 3")
pc = ProductConvolution(ProductSpace((h2, h2)), ((1.0, 0.9), (1.0, 1.2), (1.0, 1.4)))
prof = product_profile(pc, levels=8)
l2 = product_l2(pc, profiles=prof["factors"])
print(f"  mass {prof['mass']:.8f}")
print(f"  L2 norm^2: product of factor spectral values {l2['spectral']:.8f}, "
      f"joint real-space {l2['real_space']:.8f}")

print("\nthreshold report (uses max factor dimension)")
for factors in ((h2, h2), (h2, h3)):
    for r in (3, 4):
        rep = product_regularity_report(ProductConvolution(ProductSpace(factors), ((1.0, 1.0),) * r))
        dims = tuple(f.dim for f in factors)
        print(f"  dims {dims}, r = {r}: {rep}")
