"""Jacobian matrix, determinant/adjugate, vanishing profiles, bound constants."""

import itertools
import random

import pytest

from germradius import (
    NotPolynomialError,
    SeriesMatrix,
    SingularJacobianError,
    TruncatedSeries,
    TruncationError,
    adjugate,
    coefficient_bound_constants,
    determinant,
    identity_matrix,
    jacobian_matrix,
    matmul,
    profile,
)
from helpers import (
    blowup_germ,
    cube_germ,
    germ_of,
    identity_germ,
    random_map,
    series_of,
    square_germ,
)


def permutation_determinant(m):
    """Independent oracle: Leibniz expansion over permutations."""
    k = m.size
    total = TruncatedSeries.zero(m.n, m.center, m.trunc)
    for perm in itertools.permutations(range(k)):
        sign = 1
        for i in range(k):
            for j in range(i + 1, k):
                if perm[i] > perm[j]:
                    sign = -sign
        term = TruncatedSeries.constant(sign, m.n, m.center, m.trunc)
        for i in range(k):
            term = term * m.entry(i, perm[i])
        total = total + term
    return total


def test_jacobian_matrix_examples():
    jac = jacobian_matrix(square_germ(degree=6))
    assert jac.entry(0, 0).coeffs == {(1,): 2}
    sigma = jacobian_matrix(blowup_germ(degree=6))
    assert sigma.entry(0, 0).coeffs == {(0, 0): 1}
    assert sigma.entry(0, 1).is_zero
    assert sigma.entry(1, 0).coeffs == {(0, 1): 1}
    assert sigma.entry(1, 1).coeffs == {(1, 0): 1}
    ident = jacobian_matrix(identity_germ(2, degree=6))
    assert ident == identity_matrix(2, (0, 0), 5, 2)


def test_jacobian_needs_degree_one():
    flat = germ_of(["x"], ["x"], degree=0)
    with pytest.raises(TruncationError):
        jacobian_matrix(flat)


def test_determinant_and_adjugate_blowup():
    jac = jacobian_matrix(blowup_germ(degree=6))
    delta = determinant(jac)
    assert delta.coeffs == {(1, 0): 1}
    adj = adjugate(jac)
    assert adj.entry(0, 0).coeffs == {(1, 0): 1}
    assert adj.entry(0, 1).is_zero
    assert adj.entry(1, 0).coeffs == {(0, 1): -1}
    assert adj.entry(1, 1).coeffs == {(0, 0): 1}
    # J * adj = delta * I on the nose
    prod = matmul(jac, adj)
    for i in range(2):
        for j in range(2):
            want = delta if i == j else TruncatedSeries.zero(2, (0, 0), delta.trunc)
            assert prod.entry(i, j).coeffs == want.coeffs


def test_one_by_one_adjugate_convention():
    jac = jacobian_matrix(square_germ(degree=6))
    assert determinant(jac).coeffs == {(1,): 2}
    assert adjugate(jac).entry(0, 0).coeffs == {(0,): 1}


def test_identity_map_determinant():
    jac = jacobian_matrix(identity_germ(2, degree=6))
    assert determinant(jac).coeffs == {(0, 0): 1}
    assert adjugate(jac) == identity_matrix(2, (0, 0), 5, 2)


@pytest.mark.parametrize("n", [2, 3])
def test_determinant_against_permutation_oracle(n):
    rng = random.Random(100 + n)
    for _ in range(4):
        germ = random_map(rng, n, trunc=5)
        jac = jacobian_matrix(germ)
        assert determinant(jac) == permutation_determinant(jac)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cramer_cofactor_identity_random(n):
    rng = random.Random(200 + n)
    for singular in (False, True):
        germ = random_map(rng, n, trunc=5, singular=singular)
        jac = jacobian_matrix(germ)
        delta = determinant(jac)
        adj = adjugate(jac)
        left = matmul(jac, adj)
        right = matmul(adj, jac)
        for i in range(n):
            for j in range(n):
                want = delta.coeffs if i == j else {}
                assert left.entry(i, j).coeffs == want
                assert right.entry(i, j).coeffs == want


def test_profile_square_matches_scaling_example():
    p = profile(square_germ(degree=8))
    assert (p.mu, p.nu, p.alpha, p.d_alpha_delta, p.lam) == (1, 0, (1,), 2, 2)
    assert p.computed_at_degree == 7


def test_profile_blowup():
    p = profile(blowup_germ(degree=8))
    assert (p.mu, p.nu, p.alpha, p.lam) == (1, 0, (1, 0), 2)
    # the degree-1 index (0,1) precedes (1,0) but carries a zero coefficient
    assert p.delta.coefficient((0, 1)) == 0
    assert p.delta.coefficient((1, 0)) == 1


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_profile_power_maps(k):
    germ = germ_of([f"x^{k}"], ["x"], degree=k + 6)
    p = profile(germ)
    assert (p.mu, p.nu, p.lam) == (k - 1, 0, k)
    assert p.alpha == (k - 1,)
    assert p.d_alpha_delta == __import__("math").factorial(k - 1) * k


def test_profile_invariants_on_random_maps():
    rng = random.Random(31)
    for n in (1, 2, 3):
        for singular in (False, True):
            germ = random_map(rng, n, trunc=6, singular=singular)
            p = profile(germ)
            assert sum(p.alpha) == p.mu
            assert p.mu >= p.nu
            assert p.lam >= 1
            assert p.d_alpha_delta != 0
            if n == 1:
                assert p.nu == 0
            # indices strictly below alpha in graded-lex have no coefficient
            from germradius.mindex import enumerate_upto, grlex_key
            for gamma in enumerate_upto(n, p.mu):
                if grlex_key(gamma) < grlex_key(p.alpha):
                    assert p.delta.coefficient(gamma) == 0


def test_profile_rejects_identically_singular():
    germ = germ_of(["x*y", "x*y"], ["x", "y"], degree=5)
    with pytest.raises(SingularJacobianError):
        profile(germ)


def test_bound_constants_examples():
    assert coefficient_bound_constants(square_germ(degree=8)) == (2, 1)
    assert coefficient_bound_constants(identity_germ(2, degree=8)) == (1, 1)
    assert coefficient_bound_constants(blowup_germ(degree=8)) == (1, 1)


def test_bound_constants_bound_holds():
    rng = random.Random(77)
    germ = random_map(rng, 2, trunc=8)
    c1, c2 = coefficient_bound_constants(germ)
    jac = jacobian_matrix(germ)
    series_list = [determinant(jac)]
    adj = adjugate(jac)
    series_list += [adj.entry(i, j) for i in range(2) for j in range(2)]
    for s in series_list:
        for gamma, c in s.coeffs.items():
            assert abs(c) <= c1 * c2 ** sum(gamma)


def test_bound_constants_reject_boundary():
    # truncation equal to the polynomial degree: cannot certify polynomiality
    tight = germ_of(["x^2"], ["x"], degree=2)
    with pytest.raises(NotPolynomialError):
        coefficient_bound_constants(tight)


def test_series_matrix_validation():
    a = series_of("x", ["x"], degree=4)
    b = series_of("x", ["x"], degree=3)
    with pytest.raises(TruncationError):
        SeriesMatrix([[a]]) and SeriesMatrix([[a, a], [a, b]])
