"""The square-root series and the loss of radius through a fold point.

f(x) = x solves f = g o (x^2) near any a != 0 with g = sqrt(y), but the
solution only converges in |y - a^2| < a^2: the recovered coefficients are
the binomial series of sqrt at a^2, and the estimated radius shrinks like
|a|^2 as the centre approaches the fold at 0.  The fitted slope of
log r_G against log |a| is the scaling exponent 2 = mu - nu + 1.
"""

from fractions import Fraction

from germradius import estimate_radius, MapGerm, profile, recover, scaling_fit
from germradius.cli import parse_polynomial

TARGET = 120  # recovered coefficients per centre

family = []
for a in (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)):
    square = MapGerm([parse_polynomial("x^2", ["x"], center=(a,),
                                       degree=TARGET + 1)])
    prof = profile(square)
    f = parse_polynomial("x", ["x"], center=(a,), degree=TARGET)
    report = recover(square, f, TARGET)
    head = {k[0]: v for k, v in sorted(report.g_series.coeffs.items())[:4]}
    r_g = estimate_radius(report.g_series).estimate
    print(f"a = {a}:  mu={prof.mu} (det(J) = 2a != 0 here), "
          f"g coefficients {head} ...")
    print(f"        estimated r_G = {r_g:.6f}  vs  a^2 = {float(a * a):.6f}")
    family.append((a, 1.0, r_g))

fit = scaling_fit(family, x="t", y="r_g")
print(f"fitted exponent of r_G against |a|: {fit.slope:.3f} (expect 2)")
