"""Coefficient-by-coefficient recovery of G from a purported composite
F = G ∘ germ, with a recomposition residual as the self-check.

For beta of degree m >= 1, the operator sum H = Σ_alpha T[beta, alpha] · D^alpha F
has, at the extraction index (2m-1)·alpha(a), the value

    (coefficient of delta at alpha)^(2m-1) · beta! · G_beta :

every other contribution at that index needs a delta-power coefficient below
the minimal graded-lex index (2m-1)·alpha, which vanishes by additivity of
the order.  Dividing by the nonzero pivot recovers G_beta exactly.  The
divisor is the normalized COEFFICIENT of delta at alpha, not the derivative
value: the two differ by alpha!^(2m-1), and the cube-map fixture (alpha! = 2)
pins the coefficient form via the round trip.

The degree-zero coefficient is read off directly: G_0 = F(a).  The working
rule: to reach degree B, F and the operator table need truncation
(2B-1)·mu + B (the map germ one more), because the extraction coefficient
lives at degree (2m-1)·mu and each level consumes one derivative.

The level stream used here is the same construction as the materialized
table; only the traversal differs, so the recovered values are bit-identical
to a table-backed run.  Internally the determinant and adjugate are rescaled
by the least common denominator of their coefficients: that multiplies every
level-m entry by c^(2m-1), which the divisor absorbs exactly, and it keeps
the hot arithmetic in plain integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .errors import CenterMismatch, DimensionMismatch, TruncationError
from .cramerops import iter_t_levels
from .jacobian import SeriesMatrix, profile
from .mindex import enumerate_degree, enumerate_upto, grlex_key, mi_factorial, scale
from .pseries import (
    TruncatedSeries,
    as_exact,
    compose,
    product_coefficient,
    rational_str,
    series_to_dict,
)


@dataclass(eq=False)
class RecoveryReport:
    g_series: TruncatedSeries
    residual: TruncatedSeries
    max_recoverable_degree: int
    per_beta_trace: dict | None = None

    @property
    def composite_within_checked_degree(self):
        return self.residual.is_zero

    @property
    def first_residual_term(self):
        """Graded-lex-smallest nonzero residual term, or None."""
        if self.residual.is_zero:
            return None
        g = min(self.residual.coeffs, key=grlex_key)
        return g, self.residual.coeffs[g]


def working_degree(mu, target_degree):
    """Truncation F and the table need to recover G to ``target_degree``."""
    return (2 * target_degree - 1) * mu + target_degree


def max_recoverable_degree(mu, available_degree):
    """Largest target degree whose working rule fits in ``available_degree``."""
    return (available_degree + mu) // (2 * mu + 1)


def assemble_H(table, f_series, beta):
    """Full operator sum Σ_alpha T[beta, alpha] · D^alpha F as a series."""
    beta = tuple(beta)
    m = sum(beta)
    if not 1 <= m <= table.max_beta_degree:
        raise ValueError(
            f"beta degree {m} outside the table range 1..{table.max_beta_degree}")
    germ = table.germ
    if f_series.n != germ.n:
        raise DimensionMismatch("series and map disagree on dimension")
    if f_series.center != germ.center:
        raise CenterMismatch("series and map disagree on the centre")
    acc = None
    for alpha in enumerate_upto(germ.n, m):
        term = table.entries[(beta, alpha)].mul(f_series.derive(alpha))
        acc = term if acc is None else acc + term
    needed = (2 * m - 1) * table.profile.mu
    if acc.trunc < needed:
        raise TruncationError(
            f"operator sum valid to degree {acc.trunc}, extraction needs "
            f"{needed}", needed_degree=needed)
    return acc


def extract_G_coefficient(h_series, prof, beta):
    """Pivot division: H coefficient at (2m-1)·alpha over beta! · pivot^(2m-1)."""
    beta = tuple(beta)
    m = sum(beta)
    if m == 0:
        raise ValueError("the degree-zero coefficient reads off F directly")
    idx = scale(prof.alpha, 2 * m - 1)
    pivot = Fraction(prof.d_alpha_delta) / mi_factorial(prof.alpha)
    divisor = mi_factorial(beta) * pivot ** (2 * m - 1)
    return as_exact(Fraction(h_series.coefficient(idx)) / divisor)


def _common_denominator(prof):
    den = 1
    for c in prof.delta.coeffs.values():
        if isinstance(c, Fraction):
            den = lcm(den, c.denominator)
    for row in prof.adjugate.rows:
        for e in row:
            for c in e.coeffs.values():
                if isinstance(c, Fraction):
                    den = lcm(den, c.denominator)
    return den


def _scaled_copy(series, c):
    return TruncatedSeries._raw(
        series.n, series.center, series.trunc,
        {g: as_exact(v * c) for g, v in series.coeffs.items()})


def recover(germ, f_series, target_degree, trace=False):
    """Recover G up to ``target_degree`` from F, plus the recomposition
    residual computed to the largest degree both sides support.

    The residual is shipped even for exact composites, where it must be
    identically zero: it is the self-check that does not depend on how the
    operator entries were constructed.
    """
    if not isinstance(target_degree, int) or target_degree < 0:
        raise ValueError(f"target degree must be a nonnegative int, got {target_degree}")
    if f_series.n != germ.n:
        raise DimensionMismatch("series and map disagree on dimension")
    if f_series.center != germ.center:
        raise CenterMismatch("series and map disagree on the centre")
    prof = profile(germ)
    available = min(f_series.trunc, germ.trunc - 1)
    max_deg = max_recoverable_degree(prof.mu, available)
    if target_degree > max_deg:
        need = working_degree(prof.mu, target_degree)
        raise TruncationError(
            f"recovering to degree {target_degree} needs F and table "
            f"truncation {need} (map germ {need + 1}); the inputs support "
            f"degree {max_deg}", needed_degree=need)
    zero_idx = (0,) * germ.n
    coeffs = {}
    trace_data = {} if trace else None
    g0 = f_series.coefficient(zero_idx)
    if g0:
        coeffs[zero_idx] = g0
    if trace:
        trace_data[zero_idx] = (as_exact(Fraction(g0)), 1)
    if target_degree >= 1:
        work = working_degree(prof.mu, target_degree)
        den = _common_denominator(prof)
        delta = _scaled_copy(prof.delta, den) if den != 1 else prof.delta
        adj = prof.adjugate
        if den != 1:
            adj = SeriesMatrix(
                [[_scaled_copy(e, den) for e in row] for row in adj.rows])
        pivot = Fraction(prof.delta.coeffs[prof.alpha]) * den
        deriv_cache = {}

        def d_f(alpha):
            got = deriv_cache.get(alpha)
            if got is None:
                got = f_series.derive(alpha)
                deriv_cache[alpha] = got
            return got

        for m, level in iter_t_levels(germ, target_degree, work, prof=prof,
                                      delta=delta, adj=adj):
            idx = scale(prof.alpha, 2 * m - 1)
            pivot_pow = pivot ** (2 * m - 1)
            den_pow = den ** (2 * m - 1)
            for beta in enumerate_degree(germ.n, m):
                total = 0
                for alpha in enumerate_upto(germ.n, m):
                    entry = level[(beta, alpha)]
                    if not entry.coeffs:
                        continue
                    total += product_coefficient(entry, d_f(alpha), idx)
                divisor = mi_factorial(beta) * pivot_pow
                value = as_exact(Fraction(total) / divisor)
                if value:
                    coeffs[beta] = value
                if trace:
                    trace_data[beta] = (
                        as_exact(Fraction(total) / den_pow),
                        as_exact(divisor / den_pow))
    g_series = TruncatedSeries(germ.n, germ.image_point, target_degree, coeffs)
    checked = min(f_series.trunc, target_degree)
    residual = compose(g_series, germ) - f_series.truncated(checked)
    return RecoveryReport(
        g_series=g_series, residual=residual,
        max_recoverable_degree=max_deg, per_beta_trace=trace_data)


@dataclass(frozen=True, eq=False)
class ExtractionWitness:
    """Pivot structure of delta^(2m-1) for one exponent m."""

    m: int
    min_index: tuple
    min_degree: int
    pivot_coefficient: object
    expected_index: tuple
    expected_degree: int
    expected_coefficient: object

    @property
    def passed(self):
        return (self.min_index == self.expected_index
                and self.min_degree == self.expected_degree
                and self.pivot_coefficient == self.expected_coefficient)


def extraction_witness(prof, m):
    """Check the pivot structure of delta^(2m-1): minimal graded-lex index
    (2m-1)·alpha at minimal degree (2m-1)·mu, with coefficient equal to the
    alpha-coefficient of delta raised to the 2m-1."""
    if m < 1:
        raise ValueError("exponent level must be >= 1")
    target_degree = (2 * m - 1) * prof.mu
    if prof.delta.trunc < target_degree:
        raise TruncationError(
            f"determinant truncation {prof.delta.trunc} below pivot degree "
            f"{target_degree}", needed_degree=target_degree)
    power = prof.delta.truncated(target_degree) if prof.delta.trunc > target_degree \
        else prof.delta
    base = power
    for _ in range(2 * m - 2):
        power = power.mul(base, upto=target_degree)
    min_index = min(power.coeffs, key=grlex_key)
    expected_index = scale(prof.alpha, 2 * m - 1)
    return ExtractionWitness(
        m=m,
        min_index=min_index,
        min_degree=sum(min_index),
        pivot_coefficient=power.coeffs[min_index],
        expected_index=expected_index,
        expected_degree=target_degree,
        expected_coefficient=as_exact(
            Fraction(prof.delta.coeffs[prof.alpha]) ** (2 * m - 1)),
    )


def report_to_dict(report):
    out = {
        "g_series": series_to_dict(report.g_series),
        "residual": series_to_dict(report.residual),
        "max_recoverable_degree": report.max_recoverable_degree,
        "composite_within_checked_degree": report.composite_within_checked_degree,
    }
    first = report.first_residual_term
    if first is not None:
        out["first_residual"] = {
            "index": list(first[0]),
            "coeff": rational_str(first[1]),
        }
    if report.per_beta_trace is not None:
        out["per_beta_trace"] = [
            {
                "beta": list(beta),
                "h_coefficient": rational_str(h),
                "divisor": rational_str(d),
            }
            for beta, (h, d) in sorted(
                report.per_beta_trace.items(), key=lambda kv: grlex_key(kv[0]))
        ]
    return out
