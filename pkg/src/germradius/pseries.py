"""Truncated multivariate formal power series over exact rational coefficients.

A series is stored sparsely: a dict from exponent tuple to coefficient,
together with a centre point and an explicit truncation degree ``trunc``.
Absent coefficients of degree <= trunc are zero; anything beyond trunc is
unknown, and asking for it raises ``TruncationError`` instead of returning a
silent zero.  Coefficients are exact — Python ints or ``fractions.Fraction``
(whole fractions normalize to int at the boundaries, and arithmetic promotes
between the two transparently).  Floating point never appears here.

Truncation propagates through arithmetic as the min of the operand degrees;
differentiation of order alpha lowers it by |alpha|; composition keeps the
min of the series and map degrees, which is sound because every substituted
component vanishes at the centre, so deeper coefficients of the outer series
cannot reach down.

Series values are immutable once constructed: every operation returns a new
object and instances can be shared freely between threads.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import (
    CenterMismatch,
    CompositionError,
    DimensionMismatch,
    TruncationError,
)
from .mindex import grlex_key, unit, validate as validate_index


def as_exact(value):
    """Coerce to an exact coefficient; whole fractions collapse to int."""
    if isinstance(value, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, str):
        return as_exact(Fraction(value))
    raise TypeError(f"not an exact rational: {value!r}")


def rational_str(value):
    """Canonical lowest-terms string: '7', '-3/2', '0'."""
    return str(Fraction(value))


def _bucket_by_degree(coeffs):
    out = {}
    for g, c in coeffs.items():
        out.setdefault(sum(g), []).append((g, c))
    return out


class TruncatedSeries:
    """Formal power series centred at a point, known up to ``trunc``."""

    __slots__ = ("n", "center", "trunc", "coeffs")

    def __init__(self, n, center, trunc, coeffs=None):
        if not isinstance(n, int) or n < 1:
            raise DimensionMismatch(f"dimension must be a positive int, got {n}")
        center = tuple(as_exact(c) for c in center)
        if len(center) != n:
            raise DimensionMismatch(
                f"centre has {len(center)} coordinates for dimension {n}")
        if not isinstance(trunc, int) or trunc < 0:
            raise TruncationError(f"truncation degree must be >= 0, got {trunc}")
        clean = {}
        if coeffs:
            for gamma, value in coeffs.items():
                gamma = validate_index(gamma, n)
                if sum(gamma) > trunc:
                    raise TruncationError(
                        f"index {gamma} exceeds truncation degree {trunc}",
                        needed_degree=sum(gamma))
                value = as_exact(value)
                if value:
                    clean[gamma] = value
        self.n = n
        self.center = center
        self.trunc = trunc
        self.coeffs = clean

    @classmethod
    def _raw(cls, n, center, trunc, coeffs):
        """Trusted constructor for internal arithmetic: no validation, no copy."""
        obj = object.__new__(cls)
        obj.n = n
        obj.center = center
        obj.trunc = trunc
        obj.coeffs = coeffs
        return obj

    @classmethod
    def zero(cls, n, center, trunc):
        return cls(n, center, trunc, None)

    @classmethod
    def constant(cls, value, n, center, trunc):
        return cls(n, center, trunc, {(0,) * n: value})

    @classmethod
    def monomial(cls, gamma, n, center, trunc, coeff=1):
        return cls(n, center, trunc, {tuple(gamma): coeff})

    # -- inspection ---------------------------------------------------------

    @property
    def is_zero(self):
        return not self.coeffs

    def coefficient(self, gamma):
        """Coefficient at ``gamma``; beyond the truncation degree this is an
        error, never zero."""
        gamma = validate_index(gamma, self.n)
        d = sum(gamma)
        if d > self.trunc:
            raise TruncationError(
                f"coefficient at {gamma} (degree {d}) is beyond truncation "
                f"degree {self.trunc}", needed_degree=d)
        return self.coeffs.get(gamma, 0)

    def eval_at_center(self):
        """Value at the centre: the constant coefficient."""
        return self.coeffs.get((0,) * self.n, 0)

    def order_at_center(self):
        """Smallest total degree with a nonzero coefficient, or ``math.inf``
        when every stored coefficient vanishes (order exceeds ``trunc``)."""
        if not self.coeffs:
            return math.inf
        return min(sum(g) for g in self.coeffs)

    def support(self):
        """Nonzero indices in graded-lex order."""
        return sorted(self.coeffs, key=grlex_key)

    def truncated(self, new_trunc):
        """Forget coefficients beyond ``new_trunc`` (never extends)."""
        if new_trunc > self.trunc:
            raise TruncationError(
                f"cannot extend truncation {self.trunc} to {new_trunc}",
                needed_degree=new_trunc)
        if new_trunc == self.trunc:
            return self
        kept = {g: c for g, c in self.coeffs.items() if sum(g) <= new_trunc}
        return TruncatedSeries._raw(self.n, self.center, new_trunc, kept)

    def _require_same_frame(self, other):
        if self.n != other.n:
            raise DimensionMismatch(
                f"series dimensions differ: {self.n} vs {other.n}")
        if self.center != other.center:
            raise CenterMismatch(
                f"series centres differ: {self.center} vs {other.center}")

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            self._require_same_frame(other)
            t = min(self.trunc, other.trunc)
            out = {}
            for g, c in self.coeffs.items():
                if sum(g) <= t:
                    out[g] = c
            for g, c in other.coeffs.items():
                if sum(g) > t:
                    continue
                s = out.get(g, 0) + c
                if s:
                    out[g] = s
                elif g in out:
                    del out[g]
            return TruncatedSeries._raw(self.n, self.center, t, out)
        value = as_exact(other)
        if not value:
            return self
        key = (0,) * self.n
        out = dict(self.coeffs)
        s = out.get(key, 0) + value
        if s:
            out[key] = s
        elif key in out:
            del out[key]
        return TruncatedSeries._raw(self.n, self.center, self.trunc, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries._raw(
            self.n, self.center, self.trunc,
            {g: -c for g, c in self.coeffs.items()})

    def __sub__(self, other):
        if isinstance(other, TruncatedSeries):
            return self + (-other)
        return self + (-as_exact(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return self.mul(other)
        value = as_exact(other)
        if not value:
            return TruncatedSeries._raw(self.n, self.center, self.trunc, {})
        return TruncatedSeries._raw(
            self.n, self.center, self.trunc,
            {g: c * value for g, c in self.coeffs.items()})

    __rmul__ = __mul__

    def mul(self, other, upto=None):
        """Cauchy product truncated at min of the operand degrees, or lower
        when ``upto`` caps it.  Degree buckets keep the cost proportional to
        the coefficient pairs that can actually land within the cap."""
        self._require_same_frame(other)
        t = min(self.trunc, other.trunc)
        if upto is not None and upto < t:
            t = upto
        if t < 0:
            raise TruncationError("product capped below degree 0")
        a = _bucket_by_degree(self.coeffs)
        b = _bucket_by_degree(other.coeffs)
        if len(self.coeffs) > len(other.coeffs):
            a, b = b, a
        out = {}
        for da, items_a in a.items():
            room = t - da
            if room < 0:
                continue
            for db, items_b in b.items():
                if db > room:
                    continue
                for ga, ca in items_a:
                    for gb, cb in items_b:
                        key = tuple(x + y for x, y in zip(ga, gb))
                        s = out.get(key, 0) + ca * cb
                        if s:
                            out[key] = s
                        elif key in out:
                            del out[key]
        return TruncatedSeries._raw(self.n, self.center, t, out)

    def derive(self, alpha):
        """Formal derivative of mixed order ``alpha``; lowers trunc by |alpha|."""
        alpha = validate_index(alpha, self.n)
        total = sum(alpha)
        if total > self.trunc:
            raise TruncationError(
                f"derivative order {total} exceeds truncation degree {self.trunc}",
                needed_degree=total)
        if total == 0:
            return self
        out = {}
        for g, c in self.coeffs.items():
            ng = tuple(x - y for x, y in zip(g, alpha))
            if any(e < 0 for e in ng):
                continue
            factor = 1
            for base, step in zip(ng, alpha):
                for k in range(base + 1, base + step + 1):
                    factor *= k
            out[ng] = c * factor
        return TruncatedSeries._raw(self.n, self.center, self.trunc - total, out)

    # -- comparison / repr --------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.n == other.n and self.center == other.center
                and self.trunc == other.trunc and self.coeffs == other.coeffs)

    __hash__ = None

    def __repr__(self):
        return (f"TruncatedSeries(n={self.n}, trunc={self.trunc}, "
                f"terms={len(self.coeffs)})")


class MapGerm:
    """An n-tuple of series in n variables sharing centre and truncation.

    The image point is exactly the tuple of constant coefficients, so each
    component minus its image coordinate has order >= 1 by construction.
    """

    __slots__ = ("components", "n", "center", "trunc", "image_point")

    def __init__(self, components):
        components = tuple(components)
        if not components:
            raise DimensionMismatch("a map germ needs at least one component")
        first = components[0]
        n = first.n
        if len(components) != n:
            raise DimensionMismatch(
                f"{len(components)} components in {n} variables; maps are square")
        for comp in components[1:]:
            if comp.n != n:
                raise DimensionMismatch("components disagree on dimension")
            if comp.center != first.center:
                raise CenterMismatch("components disagree on the centre")
            if comp.trunc != first.trunc:
                raise TruncationError(
                    "components must share a truncation degree")
        self.components = components
        self.n = n
        self.center = first.center
        self.trunc = first.trunc
        self.image_point = tuple(c.eval_at_center() for c in components)

    def deviations(self):
        """Components minus their centre values; each has order >= 1."""
        return tuple(c - b for c, b in zip(self.components, self.image_point))

    def __repr__(self):
        return f"MapGerm(n={self.n}, trunc={self.trunc})"


def _monomial_power(kappa, cache, devs, cap):
    """(devs)^kappa with memoized predecessors, built without recursion."""
    stack = [kappa]
    while stack:
        cur = stack[-1]
        if cur in cache:
            stack.pop()
            continue
        j = max(i for i, e in enumerate(cur) if e)
        prev = cur[:j] + (cur[j] - 1,) + cur[j + 1:]
        p = cache.get(prev)
        if p is None:
            stack.append(prev)
            continue
        cache[cur] = p.mul(devs[j], upto=cap)
        stack.pop()
    return cache[kappa]


def compose(g, germ):
    """Formal composition: substitute the germ's components into ``g``.

    ``g`` must be centred exactly at the germ's image point.  The result is
    centred at the germ's centre with truncation min(g.trunc, germ.trunc);
    coefficients up to that degree depend only on the retained coefficients
    of both inputs because every substituted deviation has order >= 1.
    """
    if not isinstance(germ, MapGerm):
        raise TypeError("compose expects a MapGerm as its second argument")
    if g.n != germ.n:
        raise DimensionMismatch(
            f"series in {g.n} variables composed with a {germ.n}-component map")
    if g.center != germ.image_point:
        raise CompositionError(
            f"series centre {g.center} differs from map image {germ.image_point}")
    t = min(g.trunc, germ.trunc)
    devs = [d if d.trunc <= t else d.truncated(t) for d in germ.deviations()]
    for d in devs:
        if d.coeffs.get((0,) * germ.n):
            raise CompositionError(
                "map component has a nonzero deviation at the centre")
    zero_src = (0,) * germ.n
    zero_img = (0,) * g.n
    acc = {}
    const = g.coeffs.get(zero_img)
    if const:
        acc[zero_src] = const
    cache = {zero_img: TruncatedSeries._raw(germ.n, germ.center, t, {zero_src: 1})}
    for kappa in sorted(g.coeffs, key=grlex_key):
        if sum(kappa) == 0:
            continue
        if sum(kappa) > t:
            break
        power = _monomial_power(kappa, cache, devs, t)
        c = g.coeffs[kappa]
        for gsrc, v in power.coeffs.items():
            s = acc.get(gsrc, 0) + c * v
            if s:
                acc[gsrc] = s
            elif gsrc in acc:
                del acc[gsrc]
    return TruncatedSeries._raw(germ.n, germ.center, t, acc)


def product_coefficient(a, b, gamma):
    """Coefficient of a*b at ``gamma`` without forming the whole product."""
    a._require_same_frame(b)
    gamma = validate_index(gamma, a.n)
    d = sum(gamma)
    if d > min(a.trunc, b.trunc):
        raise TruncationError(
            f"product coefficient at degree {d} exceeds the valid degree "
            f"{min(a.trunc, b.trunc)}", needed_degree=d)
    if len(b.coeffs) < len(a.coeffs):
        a, b = b, a
    total = 0
    bc = b.coeffs
    for g, c in a.coeffs.items():
        rest = tuple(x - y for x, y in zip(gamma, g))
        if any(e < 0 for e in rest):
            continue
        other = bc.get(rest)
        if other:
            total += c * other
    return as_exact(total) if total else 0


def chain_rule_residuals(g, germ):
    """Residuals d(g∘φ)/dx_i - Σ_j ((dg/dy_j)∘φ)·(dφ_j/dx_i) for each i.

    All residuals are identically zero within truncation; this is the
    correctness witness for ``compose`` against ``derive``.
    """
    f = compose(g, germ)
    n = germ.n
    outer = [compose(g.derive(unit(n, j)), germ) for j in range(n)]
    residuals = []
    for i in range(n):
        e_i = unit(n, i)
        acc = None
        for j in range(n):
            term = outer[j].mul(germ.components[j].derive(e_i))
            acc = term if acc is None else acc + term
        residuals.append(f.derive(e_i) - acc)
    return residuals


# -- serialization -----------------------------------------------------------


def series_to_dict(series):
    """Series literal: n, centre, degree, and graded-lex-sorted terms."""
    return {
        "n": series.n,
        "center": [rational_str(c) for c in series.center],
        "degree": series.trunc,
        "terms": [
            {"index": list(g), "coeff": rational_str(series.coeffs[g])}
            for g in series.support()
        ],
    }


def series_from_dict(data):
    """Inverse of :func:`series_to_dict`; round trips are bit-exact."""
    try:
        n = data["n"]
        center = [as_exact(c if isinstance(c, int) else str(c))
                  for c in data["center"]]
        trunc = data["degree"]
        coeffs = {}
        for term in data.get("terms", ()):
            idx = tuple(term["index"])
            coeffs[idx] = as_exact(
                term["coeff"] if isinstance(term["coeff"], int)
                else str(term["coeff"]))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed series literal: {exc}") from exc
    return TruncatedSeries(n, center, trunc, coeffs)
