"""Recovering the outer series of a composite, coefficient by coefficient.

Build G(y) = sum 4^k y^k (a geometric series with radius 1/4), push it
through the square map x -> x^2, and recover it back from the composite
alone.  Then try a series that is NOT a composite of the blow-up and watch
the residual flag it.
"""

from fractions import Fraction

from germradius import MapGerm, TruncatedSeries, compose, recover
from germradius.cli import parse_polynomial

DEGREE = 24

print("== a true composite through x -> x^2 ==")
square = MapGerm([parse_polynomial("x^2", ["x"], degree=DEGREE + 1)])
g_true = TruncatedSeries(1, (0,), DEGREE, {(k,): 4 ** k for k in range(DEGREE + 1)})
f = compose(g_true, square)
print("composite coefficients:", {k[0]: v for k, v in sorted(f.coeffs.items())[:5]}, "...")

report = recover(square, f, target_degree=6)
print("recovered G coefficients:",
      {k[0]: v for k, v in sorted(report.g_series.coeffs.items())})
print("recomposition residual is zero:", report.residual.is_zero)
print("largest degree the inputs would have supported:",
      report.max_recoverable_degree)

# The trace shows the extraction arithmetic per coefficient: the operator
# sum's pivot coefficient and the divisor beta! * (delta coefficient)^(2m-1).
traced = recover(square, f, target_degree=3, trace=True)
for beta, (h, d) in sorted(traced.per_beta_trace.items()):
    print(f"  beta={beta}: pivot value {h}, divisor {d}")

print()
print("== a non-composite through the blow-up (x, y) -> (x, x*y) ==")
blowup = MapGerm([parse_polynomial("x", ["x", "y"], degree=8),
                  parse_polynomial("x*y", ["x", "y"], degree=8)])
f_bad = parse_polynomial("y", ["x", "y"], degree=7)
report = recover(blowup, f_bad, target_degree=2)
print("composite within checked degree:", report.composite_within_checked_degree)
index, coeff = report.first_residual_term
print(f"first residual term: coefficient {coeff} at index {index}")
print("(no function of (x, x*y) can produce a bare y term)")
