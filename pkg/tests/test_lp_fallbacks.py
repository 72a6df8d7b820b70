"""The LP fast path can always fail over to slower exact routes; these tests
force each fallback and check it reproduces the certified optimum."""

import pytest

from coiso.exact import RAT
from coiso.complexes import build_complex, cycle_complex, simplex_boundary
from coiso.homalg import Cochain, boundary_matrix
from coiso.lp import LinfProblem, exact_simplex, Infeasible, l1_min
from coiso.filling import integral_fill, sample_integral_coboundary, trial_rng
from coiso.subdivision import edgewise_subdivide
from coiso.trees import gnarledness_exact_tiny, gnarledness_upper, greedy_spanning_tree


def _reference_problem(L):
    X = edgewise_subdivide(simplex_boundary(3), L).result
    delta = boundary_matrix(X, 2).transpose()
    om = sample_integral_coboundary(X, 2, trial_rng(21, L, 0)).dense(X.n_cells(2))
    return delta, om


def test_recursive_path_matches_reconstruction():
    delta, om = _reference_problem(4)
    P = LinfProblem(delta.rows, delta.ncols)
    _, t_fast, mode = P.solve(om)
    assert mode == "reconstructed"
    out = P._solve_recursive([RAT(v) for v in om], 0)
    assert out is not None
    alpha, t_rec = out
    assert t_rec == t_fast
    assert max(abs(v) for v in alpha) <= t_fast


def test_forced_fallback_small_uses_exact_simplex(monkeypatch):
    X = cycle_complex(4)
    delta = boundary_matrix(X, 1).transpose()
    P = LinfProblem(delta.rows, delta.ncols)
    monkeypatch.setattr(LinfProblem, "_reconstruct", lambda *a, **k: None)
    alpha, t, mode = P.solve([RAT(1), RAT(0), RAT(0), RAT(-1)])
    assert mode == "simplex"
    assert t == RAT(1, 2)


def test_forced_fallback_large_uses_recursion(monkeypatch):
    delta, om = _reference_problem(4)
    P = LinfProblem(delta.rows, delta.ncols)
    _, t_ref, _ = P.solve(om)
    P2 = LinfProblem(delta.rows, delta.ncols)
    monkeypatch.setattr(LinfProblem, "_reconstruct", lambda *a, **k: None)
    alpha, t, mode = P2.solve(om)
    assert mode == "recursive"
    assert t == t_ref


def test_exact_simplex_infeasible():
    with pytest.raises(Infeasible):
        exact_simplex([[RAT(1)], [RAT(1)]], [RAT(1), RAT(2)], [RAT(0)])


def test_l1_min_is_exact_on_c4():
    B = boundary_matrix(cycle_complex(4), 1)
    tau, v = l1_min(B.rows, B.ncols, [1, -1, 0, 0])
    assert v == 1
    assert B.mat_vec([int(x) for x in tau]) == [1, -1, 0, 0]


# -- corners of the surrounding machinery --------------------------------------

def test_integral_fill_on_disconnected_complex():
    from coiso.homalg import apply_coboundary
    X = build_complex([(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    om = apply_coboundary(X, Cochain(0, {0: 1, 4: -2}, "int")).map(int, "int")
    res = integral_fill(X, om)
    assert not res.certificate.entries
    assert res.alpha.ring == "int"


def test_exact_gnarledness_rank_two():
    X = build_complex([(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    T = greedy_spanning_tree(X, 1)
    assert T.rel_rank == 2
    assert gnarledness_upper(T) == 1
    assert gnarledness_exact_tiny(T, 1) == 1
