"""Filling-engine tests with independent optimality oracles.

The oracle for the minimal-infinity fill enumerates candidate vertices of
the feasible polytope directly (every subset of d+1 active bound constraints
over the solution affine space), so it shares no code path with the LP.
"""

from itertools import combinations, product

import pytest

from coiso.exact import RAT, ZERO
from coiso.complexes import (build_complex, cycle_complex, simplex_boundary)
from coiso.homalg import Cochain, boundary_matrix, norm_inf
from coiso.linalg import RationalSolver, mat_vec
from coiso.filling import (FillingError, NotACoboundary, bounded_lift,
                           coiso_constants_tiny, estimate_cip,
                           get_fill_context, integral_fill,
                           linf_fill_rational, sample_integral_coboundary,
                           trial_rng)
from coiso.subdivision import edgewise_subdivide
from coiso.trees import (greedy_spanning_tree, lifting_basis, wrapping_tree,
                         telescope_complex)


def linf_oracle(rows, ncols, om):
    """Exhaustive vertex enumeration for min ||a||_inf s.t. D a = om."""
    S = RationalSolver(rows, ncols)
    a0 = S.solve(om)
    assert a0 is not None
    N = S.nullspace()
    d = len(N)
    if d == 0:
        return max((abs(v) for v in a0), default=ZERO)
    best = None
    for sub in combinations(range(ncols), d + 1):
        for signs in product((1, -1), repeat=d + 1):
            rows2, rhs2 = [], []
            for s, i in zip(signs, sub):
                row = {j: RAT(s) * N[j].get(i, ZERO) for j in range(d)}
                row[d] = RAT(-1)
                rows2.append({k: v for k, v in row.items() if v})
                rhs2.append(RAT(-s) * a0[i])
            S2 = RationalSolver(rows2, d + 1)
            if S2.rank < d + 1:
                continue
            sol = S2.solve(rhs2)
            if sol is None or sol[d] < 0:
                continue
            a = list(a0)
            for j in range(d):
                if sol[j]:
                    for i, v in N[j].items():
                        a[i] += v * sol[j]
            if max(abs(v) for v in a) <= sol[d]:
                if best is None or sol[d] < best:
                    best = sol[d]
    return best


def test_zero_cochain_fills_to_zero():
    res = linf_fill_rational(cycle_complex(4), Cochain(1, {}, "int"))
    assert res.norm_inf_alpha == 0 and not res.alpha.entries
    assert not res.certificate.entries


def test_c4_optimal_half():
    X = cycle_complex(4)
    om = Cochain(1, {0: 1, 3: -1}, "int")   # +1 on (0,1), -1 on (2,3)
    res = linf_fill_rational(X, om)
    assert res.norm_inf_alpha == RAT(1, 2)
    delta = boundary_matrix(X, 1).transpose()
    assert linf_oracle(delta.rows, delta.ncols, om.dense(4)) == RAT(1, 2)


def test_sphere_adjacent_pm_fill_certified():
    X = simplex_boundary(3)
    om = Cochain(2, {0: 1, 2: -1}, "int")   # adjacent triangles, coboundary
    res = linf_fill_rational(X, om)
    delta = boundary_matrix(X, 2).transpose()
    assert res.norm_inf_alpha == linf_oracle(delta.rows, delta.ncols, om.dense(4))
    assert res.details["optimal"]


def test_not_a_coboundary_rejected_with_witness():
    X = cycle_complex(4)
    om = Cochain(1, {0: 1}, "int")
    with pytest.raises(NotACoboundary) as ei:
        linf_fill_rational(X, om)
    z = ei.value.witness
    # the witness is a genuine cycle pairing nontrivially with omega
    B = boundary_matrix(X, 1)
    dense = [z.get(i, ZERO) for i in range(4)]
    assert all(v == 0 for v in B.mat_vec(dense))
    assert ei.value.pairing != 0


# -- bounded lifting -----------------------------------------------------------

def test_lift_of_zero_is_zero():
    X = cycle_complex(3)
    z = bounded_lift(Cochain(1, {}, "rat"), greedy_spanning_tree(X, 1),
                     wrapping_tree(X, 0))
    assert not z.entries


def test_lift_on_triangle_boundary_thirds():
    X = cycle_complex(3)
    T = greedy_spanning_tree(X, 1)
    U = wrapping_tree(X, 0)
    z = Cochain(1, {i: RAT(1, 3) for i in range(3)}, "rat")
    zl = bounded_lift(z, T, U)
    _, g, _ = lifting_basis(T)
    assert norm_inf(zl) <= 1 + 1 + g
    for i in range(3):
        assert (zl(i) - z(i)).denominator == 1


def test_lift_on_sphere_halves():
    X = simplex_boundary(3)
    T = greedy_spanning_tree(X, 2)
    U = wrapping_tree(X, 1)
    z = Cochain(2, {i: RAT(1, 2) for i in range(4)}, "rat")
    zl = bounded_lift(z, T, U)
    _, g, _ = lifting_basis(T)
    assert norm_inf(zl) <= 2 + 1 + g
    for i in range(4):
        assert (zl(i) - z(i)).denominator == 1


def random_mod_z_cocycle(X, k, rng):
    """Fractional part of a random rational cocycle: always liftable."""
    if k + 1 > X.dim:
        nullspace = None
        n = X.n_cells(k)
        vec = [RAT(rng.randint(-8, 8), rng.choice((2, 3, 4))) for _ in range(n)]
    else:
        delta = boundary_matrix(X, k + 1).transpose()
        basis = RationalSolver(delta.rows, delta.ncols).nullspace()
        n = X.n_cells(k)
        vec = [ZERO] * n
        for b in basis:
            c = RAT(rng.randint(-8, 8), rng.choice((2, 3, 4)))
            if c:
                for i, v in b.items():
                    vec[i] += c * v
    return Cochain(k, {i: v - (v.numerator // v.denominator)
                       for i, v in enumerate(vec)}, "rat")


LIFT_CORPUS = [
    (cycle_complex(4), 1),
    (build_complex([(0, 1, 2)]), 1),
    (simplex_boundary(3), 2),
    (telescope_complex(), 1),
    (telescope_complex(), 2),
]


@pytest.mark.parametrize("X,k", LIFT_CORPUS, ids=lambda v: repr(v))
def test_lift_bound_never_violated(X, k):
    T = greedy_spanning_tree(X, k)
    U = wrapping_tree(X, k - 1)
    _, g, _ = lifting_basis(T)
    bound = k + 1 + g
    for t in range(12):
        rng = trial_rng(11, k, t)
        z = random_mod_z_cocycle(X, k, rng)
        zl = bounded_lift(z, T, U)
        assert norm_inf(zl) <= bound
        for i in range(X.n_cells(k)):
            assert (zl(i) - z(i)).denominator == 1


# -- integral filling ------------------------------------------------------------

def test_c4_integral_fill_norm_one_and_optimal():
    X = cycle_complex(4)
    om = Cochain(1, {0: 1, 3: -1}, "int")
    res = integral_fill(X, om)
    assert res.alpha.ring == "int"
    assert res.norm_inf_alpha == 1
    assert not res.certificate.entries
    # brute force over integer boxes: norm 1 is optimal and attained
    delta = boundary_matrix(X, 1).transpose()
    target = [int(v) for v in om.dense(4)]
    best = None
    for cand in product(range(-2, 3), repeat=4):
        if delta.mat_vec(list(cand)) == target:
            m = max(abs(v) for v in cand)
            best = m if best is None else min(best, m)
    assert best == 1


def test_integral_fill_zero():
    res = integral_fill(cycle_complex(4), Cochain(1, {}, "int"))
    assert res.norm_inf_alpha == 0


def test_integral_fill_on_subdivided_sphere():
    X = edgewise_subdivide(simplex_boundary(3), 2).result
    rng = trial_rng(3, 2, 0)
    om = sample_integral_coboundary(X, 2, rng)
    res = integral_fill(X, om)
    # exact residual and the rounding-proximity bound
    assert not res.certificate.entries
    diff = res.norm_inf_alpha - res.details["rational_norm"]
    assert diff <= 2 + 1 + res.details["g_upper"]
    assert res.norm_inf_alpha <= res.details["rational_norm"] + 2 + 1 + res.details["g_upper"]


def test_integral_fill_requires_integral_omega():
    with pytest.raises(FillingError):
        integral_fill(cycle_complex(4), Cochain(1, {0: RAT(1, 2)}, "rat"))


def test_integral_fill_rejects_non_coboundary():
    with pytest.raises(NotACoboundary):
        integral_fill(cycle_complex(4), Cochain(1, {0: 1}, "int"))


# -- the sweep -------------------------------------------------------------------

def test_estimate_cip_shape_single_row():
    out = estimate_cip(simplex_boundary(3), 2, [1], 1, 12)
    rows = out["rows"]
    assert len(rows) == 1 and rows[0]["L"] == 1
    assert rows[0]["ratio"] >= 0


def test_estimate_cip_deterministic():
    a = estimate_cip(simplex_boundary(3), 2, [2, 4], 4, 99)
    b = estimate_cip(simplex_boundary(3), 2, [2, 4], 4, 99)
    assert a["summary"] == b["summary"]
    assert [(r["L"], r["trial"], r.get("ratio")) for r in a["rows"]] == \
           [(r["L"], r["trial"], r.get("ratio")) for r in b["rows"]]


def test_estimate_cip_rejects_zero_trials():
    with pytest.raises(FillingError):
        estimate_cip(simplex_boundary(3), 2, [1], 0, 1)


def test_sampler_yields_integral_coboundaries():
    X = simplex_boundary(3)
    ctx = get_fill_context(X, 2)
    for t in range(6):
        om = sample_integral_coboundary(X, 2, trial_rng(5, 1, t))
        dense = om.dense(4)
        assert any(dense) and all(v in (-1, 0, 1) for v in dense)
        assert ctx.coboundary_witness(dense) is None


# -- duality ---------------------------------------------------------------------

GOLDEN = [
    (cycle_complex(4), 1, RAT(1)),
    (build_complex([(0, 1, 2)]), 1, RAT(1, 2)),
    (simplex_boundary(3), 2, RAT(1, 2)),
]


@pytest.mark.parametrize("X,k,value", GOLDEN, ids=lambda v: repr(v))
def test_duality_constants_equal_and_golden(X, k, value):
    co, fi = coiso_constants_tiny(X, k)
    assert co == fi
    assert co == value


def test_duality_size_cap():
    X = edgewise_subdivide(simplex_boundary(3), 4).result
    with pytest.raises(FillingError):
        coiso_constants_tiny(X, 2)
