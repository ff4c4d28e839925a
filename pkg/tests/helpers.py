"""Shared fixture builders: parsed germs and seeded random series/maps."""

from fractions import Fraction

from germradius import MapGerm, SingularJacobianError, TruncatedSeries, profile
from germradius.cli import parse_expression, parse_polynomial
from germradius.mindex import enumerate_upto
from germradius.polymap import Polynomial, PolynomialMap


def series_of(expr, variables, center=None, degree=None):
    return parse_polynomial(expr, variables, center=center, degree=degree)


def germ_of(exprs, variables, center=None, degree=8):
    n = len(variables)
    if center is None:
        center = (0,) * n
    return MapGerm([parse_polynomial(e, variables, center=center, degree=degree)
                    for e in exprs])


def pmap_of(exprs, variables):
    return PolynomialMap([parse_expression(e, variables) for e in exprs])


def identity_germ(n=2, degree=8):
    variables = ["x", "y", "z"][:n]
    return germ_of(variables, variables, degree=degree)


def square_germ(degree=8, center=None):
    return germ_of(["x^2"], ["x"], center=center, degree=degree)


def cube_germ(degree=16, center=None):
    return germ_of(["x^3"], ["x"], center=center, degree=degree)


def blowup_germ(degree=8, center=None):
    return germ_of(["x", "x*y"], ["x", "y"], center=center, degree=degree)


def random_series(rng, n, degree, center=None, span=4, density=0.7,
                  trunc=None):
    """Random exact series: integer coefficients, roughly `density` filled."""
    if center is None:
        center = (0,) * n
    if trunc is None:
        trunc = degree
    coeffs = {}
    for gamma in enumerate_upto(n, degree):
        if rng.random() < density:
            c = rng.randint(-span, span)
            if c:
                coeffs[gamma] = c
    return TruncatedSeries(n, center, trunc, coeffs)


def random_map(rng, n, trunc, deg=3, singular=False, max_mu=2):
    """Seeded random polynomial map germ at the origin with a usable profile.

    With ``singular`` the linear part of every component is dropped in one
    variable's favour so the determinant vanishes at the centre; maps whose
    determinant dies identically (or whose mu exceeds ``max_mu``) are
    redrawn, keeping the draw deterministic for a given rng state.
    """
    variables = ["x", "y", "z"][:n]
    while True:
        comps = []
        for _ in range(n):
            coeffs = {}
            for gamma in enumerate_upto(n, deg):
                if rng.random() < 0.6:
                    c = rng.randint(-3, 3)
                    if c:
                        coeffs[gamma] = c
            comps.append(Polynomial(n, coeffs))
        if singular:
            # kill the constant-and-linear data of the first component;
            # degree-2+ terms alone force the determinant to vanish at 0
            first = {g: c for g, c in comps[0].coeffs.items() if sum(g) >= 2}
            comps[0] = Polynomial(n, first)
        pm = PolynomialMap(comps)
        germ = pm.germ_at((0,) * n, trunc)
        try:
            prof = profile(germ)
        except SingularJacobianError:
            continue
        if singular:
            if prof.mu == 0 or prof.mu > max_mu:
                continue
        elif prof.mu != 0:
            continue
        return germ
