"""Radius scaling through power maps: r_G = r_F^lambda on geometric families.

For x -> x^k the profile reports lambda = k, and composing a geometric
series of radius rho gives a composite whose shell values are exactly
rho^(1/k): the ratio r_G / r_F^lambda is 1 on the nose for these fixtures,
and the scaling exponent can be read off a log-log fit over the family.
"""

from fractions import Fraction

from germradius import (
    MapGerm,
    TruncatedSeries,
    bound_report,
    compose,
    estimate_radius,
    profile,
    scaling_fit,
)
from germradius.cli import parse_polynomial


def geometric(rho, degree, trunc):
    rho = Fraction(rho)
    return TruncatedSeries(1, (0,), trunc,
                           {(j,): rho ** -j for j in range(degree + 1)})


for k in (2, 3, 4):
    germ = MapGerm([parse_polynomial(f"x^{k}", ["x"], degree=60 * k)])
    prof = profile(germ)
    print(f"x -> x^{k}: mu={prof.mu}, nu={prof.nu}, lambda={prof.lam}")
    family = []
    for rho in (Fraction(1, 4), Fraction(1, 2)):
        g = geometric(rho, 60, trunc=60 * k)
        f = compose(g, germ)
        r_g = estimate_radius(g.truncated(60)).estimate
        r_f = estimate_radius(f).estimate
        rep = bound_report(prof, r_f, r_g)
        print(f"  rho={rho}: r_F={r_f:.6f}, r_G={r_g:.6f}, "
              f"r_G / r_F^{rep.lam} = {rep.ratio:.4f}")
        family.append((rho, r_f, r_g))
    fit = scaling_fit(family, x="r_f", y="r_g")
    print(f"  fitted exponent of log r_G vs log r_F: {fit.slope:.3f}")
