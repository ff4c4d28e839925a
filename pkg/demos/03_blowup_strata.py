"""Vanishing invariants of the blow-up across a grid, and the operator table.

The blow-up (x, y) -> (x, x*y) has Jacobian determinant x: it degenerates
exactly on the line x = 0.  Sampling profiles over a grid partitions the
points by (mu, nu), with one extraction index alpha per stratum; the
operator entries obey the order bound |alpha| - mu + |beta|(mu + nu - 1).
"""

from fractions import Fraction

from germradius import build_t_operators, stratify, verify_order_bound
from germradius.cli import parse_expression
from germradius.polymap import PolynomialMap

blowup = PolynomialMap([parse_expression("x", ["x", "y"]),
                        parse_expression("x*y", ["x", "y"])])

axis = [Fraction(-1), Fraction(-1, 2), Fraction(0), Fraction(1, 2), Fraction(1)]
grid = [(a, b) for a in axis for b in axis]
strat = stratify(blowup, grid)

print("strata over the 5x5 grid (ordered by decreasing mu):")
for group in strat.groups:
    pts = ", ".join(f"({s.point[0]},{s.point[1]})" for s in group.samples[:4])
    more = "" if len(group.samples) <= 4 else f", ... {len(group.samples)} total"
    print(f"  mu={group.mu} nu={group.nu} alpha={group.alpha}: {pts}{more}")

print()
print("operator order bounds at the origin (mu=1, nu=0):")
germ = blowup.germ_at((0, 0), 10)
table = build_t_operators(germ, 2, work_degree=9)
for check in verify_order_bound(table):
    print(f"  beta={check.beta} alpha={check.alpha}: required "
          f"{check.required_bound}, observed {check.observed_order} "
          f"-> {'ok' if check.passed else 'VIOLATED'}")
