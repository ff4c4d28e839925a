"""Jacobian matrix, determinant, adjugate, and pointwise vanishing invariants.

The adjugate is the transposed cofactor matrix, the unique matrix with
J · adj(J) = adj(J) · J = det(J) · I.  For a 1x1 matrix the adjugate is the
constant [1] (empty-minor convention), which forces the adjugate vanishing
order to 0 in one variable and thereby pins the scaling exponent of the
one-variable fixtures.

A profile is only meaningful relative to the truncation degree it was
computed at; it records that degree and callers must not read more into it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    CenterMismatch,
    DimensionMismatch,
    NotPolynomialError,
    SingularJacobianError,
    TruncationError,
)
from .mindex import grlex_key, mi_factorial, unit
from .pseries import MapGerm, TruncatedSeries, as_exact, rational_str


class SeriesMatrix:
    """Square matrix of series sharing centre and truncation degree."""

    __slots__ = ("size", "rows")

    def __init__(self, rows):
        rows = tuple(tuple(r) for r in rows)
        k = len(rows)
        if k == 0 or any(len(r) != k for r in rows):
            raise DimensionMismatch("matrix must be square")
        first = rows[0][0]
        for r in rows:
            for e in r:
                if e.n != first.n:
                    raise DimensionMismatch("matrix entries disagree on dimension")
                if e.center != first.center:
                    raise CenterMismatch("matrix entries disagree on the centre")
                if e.trunc != first.trunc:
                    raise TruncationError("matrix entries must share a truncation degree")
        self.size = k
        self.rows = rows

    def entry(self, i, j):
        return self.rows[i][j]

    @property
    def n(self):
        return self.rows[0][0].n

    @property
    def center(self):
        return self.rows[0][0].center

    @property
    def trunc(self):
        return self.rows[0][0].trunc

    def __eq__(self, other):
        if not isinstance(other, SeriesMatrix):
            return NotImplemented
        return self.rows == other.rows

    __hash__ = None

    def __repr__(self):
        return f"SeriesMatrix(size={self.size}, trunc={self.trunc})"


def jacobian_matrix(germ):
    """Matrix whose (j, i) entry is the derivative of component j in x_i."""
    if germ.trunc < 1:
        raise TruncationError(
            "need truncation degree >= 1 to differentiate the map",
            needed_degree=1)
    n = germ.n
    units = [unit(n, i) for i in range(n)]
    return SeriesMatrix(
        [[comp.derive(units[i]) for i in range(n)] for comp in germ.components])


def matmul(a, b):
    """Matrix product of two series matrices."""
    if a.size != b.size:
        raise DimensionMismatch("matrix sizes differ")
    k = a.size
    rows = []
    for i in range(k):
        row = []
        for j in range(k):
            acc = None
            for r in range(k):
                term = a.entry(i, r).mul(b.entry(r, j))
                acc = term if acc is None else acc + term
            row.append(acc)
        rows.append(row)
    return SeriesMatrix(rows)


def identity_matrix(n_vars, center, trunc, size):
    one = TruncatedSeries.constant(1, n_vars, center, trunc)
    zero = TruncatedSeries.zero(n_vars, center, trunc)
    return SeriesMatrix(
        [[one if i == j else zero for j in range(size)] for i in range(size)])


def _det(rows):
    k = len(rows)
    if k == 1:
        return rows[0][0]
    total = None
    for j in range(k):
        minor = [[row[c] for c in range(k) if c != j] for row in rows[1:]]
        term = rows[0][j].mul(_det(minor))
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def determinant(m):
    """Exact cofactor expansion; fine at the intended sizes (n <= 4)."""
    return _det([list(r) for r in m.rows])


def adjugate(m):
    """Transposed cofactor matrix; [1] for 1x1 by the empty-minor convention."""
    k = m.size
    if k == 1:
        e = m.entry(0, 0)
        return SeriesMatrix([[TruncatedSeries.constant(1, e.n, e.center, e.trunc)]])
    out = []
    for i in range(k):
        row = []
        for j in range(k):
            minor = [[m.entry(r, c) for c in range(k) if c != i]
                     for r in range(k) if r != j]
            term = _det(minor)
            if (i + j) % 2:
                term = -term
            row.append(term)
        out.append(row)
    return SeriesMatrix(out)


@dataclass(frozen=True, eq=False)
class JacobianProfile:
    """Vanishing data of a map germ at its centre.

    mu is the vanishing order of the determinant, nu the minimum vanishing
    order over adjugate entries, alpha the graded-lex-smallest index with a
    nonzero determinant coefficient (so |alpha| = mu), d_alpha_delta the
    corresponding derivative value alpha! * coefficient (nonzero by
    construction), and lam = mu - nu + 1 the radius scaling exponent.
    """

    delta: TruncatedSeries
    adjugate: SeriesMatrix
    mu: int
    nu: int
    alpha: tuple
    d_alpha_delta: object
    lam: int
    computed_at_degree: int

    def alpha_coefficient(self):
        """Coefficient of the determinant at alpha (derivative / alpha!)."""
        return self.delta.coeffs[self.alpha]


def profile(germ):
    """Vanishing invariants of the Jacobian determinant at the germ's centre.

    Raises ``SingularJacobianError`` when the determinant (or the whole
    adjugate) vanishes identically within the truncation degree; recovery and
    radius work must refuse to run off such a germ.
    """
    jac = jacobian_matrix(germ)
    delta = determinant(jac)
    adj = adjugate(jac)
    if delta.is_zero:
        raise SingularJacobianError(
            f"Jacobian determinant vanishes identically to degree {delta.trunc}")
    alpha = min(delta.coeffs, key=grlex_key)
    mu = sum(alpha)
    orders = []
    for row in adj.rows:
        for e in row:
            o = e.order_at_center()
            if o != math.inf:
                orders.append(o)
    if not orders:
        raise SingularJacobianError(
            f"adjugate vanishes identically to degree {adj.trunc}")
    nu = min(orders)
    d_alpha = as_exact(mi_factorial(alpha) * delta.coeffs[alpha])
    return JacobianProfile(
        delta=delta, adjugate=adj, mu=mu, nu=nu, alpha=alpha,
        d_alpha_delta=d_alpha, lam=mu - nu + 1,
        computed_at_degree=delta.trunc)


def profile_to_dict(p):
    return {
        "mu": p.mu,
        "nu": p.nu,
        "alpha": list(p.alpha),
        "lambda": p.lam,
        "d_alpha_delta": rational_str(p.d_alpha_delta),
        "computed_at_degree": p.computed_at_degree,
    }


def _boundary_nonzero(series):
    return any(sum(g) == series.trunc for g in series.coeffs)


def coefficient_bound_constants(germ):
    """Smallest (c1, c2), both >= 1, bounding every coefficient magnitude of
    the determinant and adjugate entries at index gamma by c1 * c2**|gamma|.

    For a polynomial germ the data is finite, so c2 = 1 is always feasible
    and minimizing c2 first pins c2 = 1; c1 is then the largest magnitude,
    floored at 1.  Nonzero coefficients at the truncation boundary mean the
    input cannot be certified polynomial and are rejected.
    """
    for comp in germ.components:
        if _boundary_nonzero(comp):
            raise NotPolynomialError(
                "map component has nonzero coefficients at the truncation "
                "boundary; raise the truncation degree of a polynomial input")
    jac = jacobian_matrix(germ)
    delta = determinant(jac)
    adj = adjugate(jac)
    series_list = [delta] + [e for row in adj.rows for e in row]
    for s in series_list:
        if _boundary_nonzero(s):
            raise NotPolynomialError(
                "cofactor data reaches the truncation boundary; raise the "
                "truncation degree of a polynomial input")
    biggest = 1
    for s in series_list:
        for c in s.coeffs.values():
            m = abs(c)
            if m > biggest:
                biggest = m
    return as_exact(biggest), 1
