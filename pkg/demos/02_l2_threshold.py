"""When is nu_{a_1} * ... * nu_{a_r} square integrable?

By Plancherel the squared L2 norm is the integral of |prod phi_lambda(a_i)|^2
against the Plancherel weight.  Each spherical function decays like
lambda^{-(n-1)/2} and the weight grows like lambda^{n-1}, so the integrand
behaves like lambda^{(n-1)(1-r)}.  The fitted exponent decides the verdict.

    python demos/02_l2_threshold.py
"""

from orbconv import OrbitalConvolution, build_space, l2_norm_sq, regularity_report

print(f"{'space':>20} {'r':>3} {'exponent':>10} {'verdict':>10} {'value':>14}  r >= n+1")
for n in (2, 3, 4):
    space = build_space("real-hyperbolic", [n])
    for r in (2, 3, 4, 5):
        conv = OrbitalConvolution(space, (1.0,) * r)
        rep = l2_norm_sq(conv)
        value = f"{rep.value:14.8f}" if rep.value is not None else f"{'-':>14}"
        met = regularity_report(conv).l2_threshold_met
        print(f"{space.name:>20} {r:3d} {rep.tail_exponent:10.4f} {rep.verdict:>10} {value}  {met}")

print("\nThe sufficient condition r >= n + 1 is sharp on the plane. In higher")
print("dimension the spectral integrand already decays fast enough at smaller r.")
