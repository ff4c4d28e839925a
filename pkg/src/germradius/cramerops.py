"""Higher-order Cramer operator tables.

For a map germ with Jacobian determinant ``delta`` and adjugate entries
``adj[i][j]``, the table stores, for every pair (beta, alpha) with
|alpha| <= |beta| <= B and |beta| >= 1, a series T[beta, alpha] satisfying,
for EVERY formal g centred at the image point and f = g ∘ germ,

    delta^(2|beta|-1) · ((D^beta g) ∘ germ) = Σ_{|alpha| <= |beta|} T[beta, alpha] · D^alpha f

exactly within truncation.  Level one is Cramer's rule: T[e_j, e_i] is the
(i, j) adjugate entry and T[e_j, 0] = 0.  Level m+1 comes from the level-m
identity by differentiating in direction e_i, contracting with adjugate
column j (the smallest coordinate of the new beta), and multiplying through
by delta:

    T[beta + e_j, alpha] = delta · Σ_i adj[i][j] · D^{e_i} T[beta, alpha]
                         + delta · Σ_i adj[i][j] · T[beta, alpha - e_i]
                         - (2|beta| - 1) · (Σ_i adj[i][j] · D^{e_i} delta) · T[beta, alpha]

with invalid alpha - e_i skipped.  The recurrence is a construction device;
the identity check over a monomial basis is the contract that certifies a
table, and the build is deterministic, so recomputation is bit-identical.

Entries at level m carry truncation work_degree - (m - 1): each level spends
one derivative.  Construction is sequential in the level; finished tables
are immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import TruncationError
from .jacobian import profile
from .mindex import (
    enumerate_degree,
    enumerate_upto,
    grlex_key,
    sub as mi_sub,
    unit,
)
from .pseries import MapGerm, TruncatedSeries, compose, series_to_dict


@dataclass(eq=False)
class TOperatorTable:
    germ: MapGerm
    profile: object
    max_beta_degree: int
    work_degree: int
    entries: dict  # (beta, alpha) -> TruncatedSeries

    def entry(self, beta, alpha):
        return self.entries[(tuple(beta), tuple(alpha))]


class _LevelBuilder:
    """Builds successive operator levels from a determinant/adjugate pair.

    ``delta`` and ``adj`` may be uniformly rescaled copies: scaling both by a
    constant c multiplies every level-m entry by c^(2m-1), which downstream
    extraction can divide out exactly.
    """

    __slots__ = ("n", "center", "work_degree", "delta", "adj", "units", "s_cols")

    def __init__(self, n, center, work_degree, delta, adj):
        if delta.trunc < work_degree:
            raise TruncationError(
                f"determinant truncation {delta.trunc} below working degree "
                f"{work_degree}", needed_degree=work_degree)
        self.n = n
        self.center = center
        self.work_degree = work_degree
        self.delta = delta
        self.adj = adj
        self.units = [unit(n, i) for i in range(n)]
        # column contractions of the determinant gradient, reused at every level
        self.s_cols = []
        for j in range(n):
            acc = None
            for i in range(n):
                term = adj.entry(i, j).mul(delta.derive(self.units[i]))
                acc = term if acc is None else acc + term
            self.s_cols.append(acc)

    def base_level(self):
        w = self.work_degree
        zero_idx = (0,) * self.n
        level = {}
        for j in range(self.n):
            beta = self.units[j]
            level[(beta, zero_idx)] = TruncatedSeries.zero(self.n, self.center, w)
            for i in range(self.n):
                entry = self.adj.entry(i, j)
                level[(beta, self.units[i])] = entry.truncated(min(entry.trunc, w))
        return level

    def next_level(self, level, m):
        """Entries of degree m+1 from the degree-m entries."""
        n = self.n
        target = self.work_degree - m
        if target < 0:
            raise TruncationError(
                f"working degree {self.work_degree} exhausted at level {m + 1}",
                needed_degree=m)
        out = {}
        scale_back = -(2 * m - 1)
        for beta_new in enumerate_degree(n, m + 1):
            j = next(k for k in range(n) if beta_new[k] > 0)
            beta = tuple(
                e - 1 if k == j else e for k, e in enumerate(beta_new))
            for alpha in enumerate_upto(n, m + 1):
                pieces = []
                prev = level.get((beta, alpha))
                if prev is not None and prev.coeffs:
                    grad = None
                    for i in range(n):
                        term = self.adj.entry(i, j).mul(
                            prev.derive(self.units[i]), upto=target)
                        grad = term if grad is None else grad + term
                    pieces.append(self.delta.mul(grad, upto=target))
                    pieces.append(
                        prev.mul(self.s_cols[j], upto=target) * scale_back)
                shift = None
                for i in range(n):
                    down = mi_sub(alpha, self.units[i])
                    if down is None:
                        continue
                    prior = level.get((beta, down))
                    if prior is None or not prior.coeffs:
                        continue
                    term = self.adj.entry(i, j).mul(prior, upto=target)
                    shift = term if shift is None else shift + term
                if shift is not None:
                    pieces.append(self.delta.mul(shift, upto=target))
                if pieces:
                    entry = pieces[0]
                    for p in pieces[1:]:
                        entry = entry + p
                    if entry.trunc != target:
                        entry = entry.truncated(target)
                else:
                    entry = TruncatedSeries.zero(n, self.center, target)
                out[(beta_new, alpha)] = entry
        return out


def iter_t_levels(germ, max_beta_degree, work_degree, prof=None,
                  delta=None, adj=None):
    """Yield (m, level entries) for m = 1..max_beta_degree, one level at a
    time; earlier levels are not retained here, so callers that only need a
    streaming pass stay within memory at large degrees."""
    if max_beta_degree < 1:
        raise ValueError("max_beta_degree must be >= 1")
    if prof is None:
        prof = profile(germ)
    if germ.trunc < work_degree + 1:
        raise TruncationError(
            f"map germ truncation {germ.trunc} too low for working degree "
            f"{work_degree}", needed_degree=work_degree + 1)
    builder = _LevelBuilder(
        germ.n, germ.center, work_degree,
        prof.delta if delta is None else delta,
        prof.adjugate if adj is None else adj)
    level = builder.base_level()
    yield 1, level
    for m in range(1, max_beta_degree):
        level = builder.next_level(level, m)
        yield m + 1, level


def default_work_degree(mu, max_beta_degree):
    """Working truncation rule: (2B - 1) * mu + B."""
    return (2 * max_beta_degree - 1) * mu + max_beta_degree


def build_t_operators(germ, max_beta_degree, work_degree=None):
    """Materialize the full operator table for |beta| <= max_beta_degree.

    ``work_degree`` defaults to the working rule for the germ's own
    invariants; the germ truncation must exceed it by one so the base level
    carries the full working degree.
    """
    prof = profile(germ)
    if work_degree is None:
        work_degree = default_work_degree(prof.mu, max_beta_degree)
    entries = {}
    for _, level in iter_t_levels(germ, max_beta_degree, work_degree, prof=prof):
        entries.update(level)
    return TOperatorTable(
        germ=germ, profile=prof, max_beta_degree=max_beta_degree,
        work_degree=work_degree, entries=entries)


def _delta_power(delta, exponent, upto=None):
    out = delta if upto is None else delta.truncated(min(delta.trunc, upto))
    for _ in range(exponent - 1):
        out = out.mul(delta, upto=upto)
    return out


def verify_defining_identity(table, g, beta):
    """Residual of the defining identity for one concrete g and beta; it is
    identically zero within truncation exactly when the table is right."""
    beta = tuple(beta)
    m = sum(beta)
    if not 1 <= m <= table.max_beta_degree:
        raise ValueError(
            f"beta degree {m} outside the table range 1..{table.max_beta_degree}")
    germ = table.germ
    f = compose(g, germ)
    lhs = _delta_power(table.profile.delta, 2 * m - 1).mul(
        compose(g.derive(beta), germ))
    rhs = None
    for alpha in enumerate_upto(germ.n, m):
        term = table.entries[(beta, alpha)].mul(f.derive(alpha))
        rhs = term if rhs is None else rhs + term
    return lhs - rhs


def verify_cramer_base(germ, g, prof=None):
    """Residuals of the level-one contraction for each image coordinate j:
    delta · ((dg/dy_j) ∘ germ) - Σ_i (df/dx_i) · adj[i][j]."""
    if prof is None:
        prof = profile(germ)
    n = germ.n
    f = compose(g, germ)
    f_grad = [f.derive(unit(n, i)) for i in range(n)]
    residuals = []
    for j in range(n):
        lhs = prof.delta.mul(compose(g.derive(unit(n, j)), germ))
        acc = None
        for i in range(n):
            term = f_grad[i].mul(prof.adjugate.entry(i, j))
            acc = term if acc is None else acc + term
        residuals.append(lhs - acc)
    return residuals


def verify_identity_on_monomials(table, g_degree):
    """Run the defining identity over every centred monomial g of degree
    <= g_degree, for every beta in the table.

    Returns records (beta, kappa, residual_is_zero, checked_degree).  Shares
    the composed monomial powers and the delta powers across all checks; for
    g = (y - b)^kappa the composed series is the deviation power product, and
    D^beta g composes to a falling-factorial multiple of a smaller one.
    """
    germ = table.germ
    n = germ.n
    w = table.work_degree
    devs = list(germ.deviations())
    powers = {(0,) * n: TruncatedSeries.constant(1, n, germ.center, germ.trunc)}
    for kappa in enumerate_upto(n, g_degree):
        if sum(kappa) == 0:
            continue
        j = max(i for i, e in enumerate(kappa) if e)
        prev = kappa[:j] + (kappa[j] - 1,) + kappa[j + 1:]
        powers[kappa] = powers[prev].mul(devs[j])
    deriv_cache = {}

    def d_power(kappa, alpha):
        got = deriv_cache.get((kappa, alpha))
        if got is None:
            got = powers[kappa].derive(alpha)
            deriv_cache[(kappa, alpha)] = got
        return got

    records = []
    kappas = enumerate_upto(n, g_degree)
    for m in range(1, table.max_beta_degree + 1):
        cap = w - m + 1
        dpow = _delta_power(table.profile.delta, 2 * m - 1, upto=cap)
        lhs_cache = {}
        alphas = enumerate_upto(n, m)
        for beta in enumerate_degree(n, m):
            for kappa in kappas:
                down = mi_sub(kappa, beta)
                if down is None:
                    lhs = TruncatedSeries.zero(n, germ.center, cap)
                else:
                    scaled = lhs_cache.get(down)
                    if scaled is None:
                        scaled = dpow.mul(powers[down], upto=cap)
                        lhs_cache[down] = scaled
                    fall = 1
                    for ke, be in zip(kappa, beta):
                        for k in range(ke - be + 1, ke + 1):
                            fall *= k
                    lhs = scaled * fall
                rhs = None
                for alpha in alphas:
                    entry = table.entries[(beta, alpha)]
                    term = entry.mul(d_power(kappa, alpha), upto=cap)
                    rhs = term if rhs is None else rhs + term
                residual = lhs - rhs
                records.append((beta, kappa, residual.is_zero, residual.trunc))
    return records


@dataclass(frozen=True, eq=False)
class OrderBoundCheck:
    beta: tuple
    alpha: tuple
    observed_order: object  # int or math.inf for entries zero within truncation
    required_bound: int
    passed: bool


def verify_order_bound(table):
    """Order lower bounds |alpha| - mu + |beta|(mu + nu - 1) for every stored
    entry, measured relative to the working truncation."""
    mu = table.profile.mu
    nu = table.profile.nu
    out = []
    keys = sorted(table.entries, key=lambda k: (grlex_key(k[0]), grlex_key(k[1])))
    for beta, alpha in keys:
        required = sum(alpha) - mu + sum(beta) * (mu + nu - 1)
        observed = table.entries[(beta, alpha)].order_at_center()
        passed = required <= 0 or observed >= required
        out.append(OrderBoundCheck(beta, alpha, observed, required, passed))
    return out


def table_to_dict(table):
    """Table dump: per (beta, alpha), the series in the standard literal."""
    keys = sorted(table.entries, key=lambda k: (grlex_key(k[0]), grlex_key(k[1])))
    return {
        "max_beta_degree": table.max_beta_degree,
        "work_degree": table.work_degree,
        "entries": [
            {
                "beta": list(beta),
                "alpha": list(alpha),
                "series": series_to_dict(table.entries[(beta, alpha)]),
            }
            for beta, alpha in keys
        ],
    }
