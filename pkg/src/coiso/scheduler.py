"""Obstruction cocycles and the layered degree schedule on X x I.

The prism complex is the product cell structure with the unit interval cut
into `layers` subintervals: m-cells are vertical (an (m-1)-simplex times a
subinterval) or horizontal (an m-simplex at a level), and (m+1)-cells are
the prisms themselves.  Orientation is the interval-first product
convention, so the boundary of a prism is

    (top horizontal) - (bottom horizontal) - sum_p sign(q,p) (vertical p)

which is the convention that makes the floor-spread schedule a cocycle.

The schedule spreads an integral fill alpha of the obstruction omega evenly
along the interval: vertical cells get consecutive floor differences of
(i/layers) * alpha, horizontal cells the defect that closes every prism,
interpolating -omega at the bottom to 0 at the top.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .exact import RAT, rat_floor, is_integral
from .homalg import Cochain, IntegerMatrix, boundary_matrix, norm_inf
from .complexes import top_cells
from .filling import (get_fill_context, integral_fill,
                      sample_integral_coboundary, FillingError)


class SchedulerError(ValueError):
    pass


class ScheduleInvariantError(SchedulerError):
    def __init__(self, report):
        self.report = report
        bad = [k for k, v in report.items() if isinstance(v, dict) and not v.get("passed", True)]
        super().__init__("schedule invariants failed: %s" % ", ".join(bad))


class PrismComplex:
    """Product cell structure on X x I with `layers` interval layers.

    Cell order: vertical m-cells (p, i) sorted by (p, i) first, then
    horizontal m-cells (q, j) by (q, j); prisms (q, i) by (q, i).
    """

    def __init__(self, X, layers: int):
        if layers < 1:
            raise SchedulerError("layers must be >= 1")
        m = X.dim
        if m < 1:
            raise SchedulerError("base must have dimension >= 1")
        if any(len(c) - 1 != m for c in top_cells(X)):
            raise SchedulerError("base must be pure of top dimension")
        self.X = X
        self.m = m
        self.layers = layers
        self.n_low = X.n_cells(m - 1)
        self.n_top = X.n_cells(m)
        self.n_vertical = self.n_low * layers
        self.n_horizontal = self.n_top * (layers + 1)
        self.n_prisms = self.n_top * layers

    # -- m-cell indexing ------------------------------------------------------

    def vertical_index(self, p: int, i: int) -> int:
        return p * self.layers + i

    def horizontal_index(self, q: int, j: int) -> int:
        return self.n_vertical + q * (self.layers + 1) + j

    def prism_index(self, q: int, i: int) -> int:
        return q * self.layers + i

    def n_cells_mid(self) -> int:
        return self.n_vertical + self.n_horizontal

    # -- boundary maps ---------------------------------------------------------

    def boundary_top(self) -> IntegerMatrix:
        """(m+1)-cells -> m-cells: top - bottom - signed verticals."""
        B = boundary_matrix(self.X, self.m)
        M = IntegerMatrix(self.n_cells_mid(), self.n_prisms)
        cols = B.col_dicts()
        for q in range(self.n_top):
            for i in range(self.layers):
                c = self.prism_index(q, i)
                M.set(self.horizontal_index(q, i + 1), c, 1)
                M.set(self.horizontal_index(q, i), c, -1)
                for p, sgn in cols[q].items():
                    M.set(self.vertical_index(p, i), c, -sgn)
        return M

    def boundary_mid(self) -> IntegerMatrix:
        """m-cells -> (m-1)-cells of the prism complex."""
        m, T = self.m, self.layers
        n_low_h = self.n_low * (T + 1)
        n_low_v = (self.X.n_cells(m - 2) * T) if m >= 2 else 0

        def low_h(p, j):
            return p * (T + 1) + j

        def low_v(s, i):
            return n_low_h + s * T + i

        M = IntegerMatrix(n_low_h + n_low_v, self.n_cells_mid())
        B = boundary_matrix(self.X, self.m)
        colsB = B.col_dicts()
        if m >= 2:
            Bl = boundary_matrix(self.X, self.m - 1)
            colsBl = Bl.col_dicts()
        for p in range(self.n_low):
            for i in range(T):
                c = self.vertical_index(p, i)
                M.set(low_h(p, i + 1), c, 1)
                M.set(low_h(p, i), c, -1)
                if m >= 2:
                    for s, sgn in colsBl[p].items():
                        M.set(low_v(s, i), c, -sgn)
        for q in range(self.n_top):
            for j in range(T + 1):
                c = self.horizontal_index(q, j)
                for p, sgn in colsB[q].items():
                    M.set(low_h(p, j), c, sgn)
        return M


def build_prism_complex(X, layers: int) -> PrismComplex:
    return PrismComplex(X, layers)


@dataclass
class PrismSchedule:
    prism: PrismComplex
    vertical: dict      # (p, i) -> int
    horizontal: dict    # (q, j) -> int
    omega: Cochain
    alpha: Cochain

    def value(self, kind, a, b) -> int:
        if kind == "vertical":
            return self.vertical.get((a, b), 0)
        return self.horizontal.get((a, b), 0)

    def max_abs_vertical(self) -> int:
        return max((abs(v) for v in self.vertical.values()), default=0)

    def max_abs_horizontal(self) -> int:
        return max((abs(v) for v in self.horizontal.values()), default=0)

    def norm_inf(self) -> int:
        return max(self.max_abs_vertical(), self.max_abs_horizontal())

    def to_json_dict(self):
        return {
            "layers": self.prism.layers,
            "vertical": [[p, i, v] for (p, i), v in sorted(self.vertical.items())],
            "horizontal": [[q, j, v] for (q, j), v in sorted(self.horizontal.items())],
            "omega": self.omega.to_json_dict(),
            "alpha": self.alpha.to_json_dict(),
        }


def obstruction_cocycle(X, f_deg: Cochain, g_deg: Cochain) -> Cochain:
    """Top-degree obstruction: the entrywise degree difference f - g."""
    m = X.dim
    if f_deg.k != m or g_deg.k != m:
        raise SchedulerError("degree cochains must live in the top dimension")
    n = X.n_cells(m)
    if any(i >= n for i in f_deg.entries) or any(i >= n for i in g_deg.entries):
        raise SchedulerError("cochain indexed against a different complex")
    if not (f_deg.is_integral() and g_deg.is_integral()):
        raise SchedulerError("degrees must be integers")
    return f_deg.sub(g_deg, ring="int")


def degree_schedule(X, omega: Cochain, alpha: Cochain, layers: int) -> PrismSchedule:
    """The floor-spread schedule; all invariants verified before return.

    alpha must be an integral fill of the integral cocycle omega; layers
    should be at least ||alpha||_inf or the norm invariant cannot hold.
    """
    m = X.dim
    if omega.k != m:
        raise SchedulerError(f"omega degree {omega.k}, expected top dimension {m}")
    if alpha.k != m - 1:
        raise SchedulerError(f"alpha degree {alpha.k}, expected {m - 1}")
    if not omega.is_integral() or not alpha.is_integral():
        raise SchedulerError("schedule needs integral omega and alpha")
    if layers < 1:
        raise SchedulerError("layers must be >= 1")
    ctx = get_fill_context(X, m)
    dense_o = omega.dense(X.n_cells(m))
    from .linalg import mat_vec
    got = mat_vec(ctx.delta.rows, alpha.dense(X.n_cells(m - 1)))
    residual = {i: got[i] - dense_o[i] for i in range(len(dense_o))
                if got[i] != dense_o[i]}
    if residual:
        raise SchedulerError(
            "delta(alpha) != omega; residual on cells %s" % sorted(residual)[:5])

    prism = PrismComplex(X, layers)
    T = layers
    vertical = {}
    for p in range(prism.n_low):
        a = int(alpha(p))
        if a == 0:
            continue
        prev = 0
        for i in range(T):
            nxt = rat_floor(RAT((i + 1) * a, T))
            v = nxt - prev
            if v:
                vertical[(p, i)] = v
            prev = nxt
    horizontal = {}
    cols = boundary_matrix(X, m).col_dicts()
    for q in range(prism.n_top):
        w = int(omega(q))
        for i in range(T):
            s = -w
            for p, sgn in cols[q].items():
                a = int(alpha(p))
                if a:
                    s += sgn * rat_floor(RAT(i * a, T))
            if s:
                horizontal[(q, i)] = s
        # top level is zero by construction; nothing stored

    sched = PrismSchedule(prism, vertical, horizontal, omega, alpha)
    report = verify_schedule(sched)
    if not report["all_passed"]:
        raise ScheduleInvariantError(report)
    return sched


def verify_schedule(s: PrismSchedule) -> dict:
    """Re-checks closedness, bottom/top traces, and the norm bound."""
    prism = s.prism
    X, m, T = prism.X, prism.m, prism.layers
    cols = boundary_matrix(X, m).col_dicts()

    bad_closed = []
    for q in range(prism.n_top):
        for i in range(T):
            total = s.value("horizontal", q, i + 1) - s.value("horizontal", q, i)
            for p, sgn in cols[q].items():
                total -= sgn * s.value("vertical", p, i)
            if total:
                bad_closed.append([q, i, total])

    bad_bottom = []
    bad_top = []
    for q in range(prism.n_top):
        w = int(s.omega(q))
        if s.value("horizontal", q, 0) != -w:
            bad_bottom.append(q)
        if s.value("horizontal", q, T) != 0:
            bad_top.append(q)

    bound = int(norm_inf(s.omega)) + m + 1
    worst = s.norm_inf()

    report = {
        "closedness": {"passed": not bad_closed, "offenders": bad_closed[:10]},
        "bottom_trace": {"passed": not bad_bottom, "offenders": bad_bottom[:10]},
        "top_trace": {"passed": not bad_top, "offenders": bad_top[:10]},
        "norm_bound": {"passed": worst <= bound, "norm": worst, "bound": bound},
        "max_abs_vertical": s.max_abs_vertical(),
        "max_abs_horizontal": s.max_abs_horizontal(),
    }
    report["all_passed"] = all(v["passed"] for k, v in report.items()
                               if isinstance(v, dict) and "passed" in v)
    return report


# ---------------------------------------------------------------------------
# the sphere demo pipeline

MAX_DEMO_RETRIES = 50

_sphere_cache = {}


def _subdivided_sphere(L: int):
    """Subdivided spheres are immutable; reuse them (and their fill caches)."""
    if L not in _sphere_cache:
        from .complexes import simplex_boundary
        from .subdivision import edgewise_subdivide
        _sphere_cache[L] = edgewise_subdivide(simplex_boundary(3), L).result
    return _sphere_cache[L]


def s2_null_demo(L: int, seed) -> dict:
    """Full pipeline on the subdivided 2-sphere: sample a zero-degree
    obstruction, fill it integrally, and build + verify the schedule.

    The report records the norms, the layer count, the per-check outcomes,
    and the tube-count reading of alpha (its value on an edge p is the
    signed number of tubes crossing p x [0,1]).  Deterministic in (L, seed).
    """
    if L < 1:
        raise SchedulerError("L must be >= 1")
    X = _subdivided_sphere(L)
    rng = random.Random(f"s2demo/{seed}/{L}")
    omega = None
    for _ in range(MAX_DEMO_RETRIES):
        try:
            omega = sample_integral_coboundary(X, 2, rng)
            break
        except FillingError:
            continue
    if omega is None:
        raise SchedulerError("could not sample a nonzero degree cochain")

    fill = integral_fill(X, omega)
    alpha = fill.alpha
    layers = max(1, int(norm_inf(alpha)))
    sched = degree_schedule(X, omega, alpha, layers)
    report = verify_schedule(sched)

    tube_counts = [[p, int(v)] for p, v in sorted(alpha.entries.items())]
    return {
        "L": L,
        "seed": seed,
        "norm_omega": int(norm_inf(omega)),
        "norm_alpha": int(norm_inf(alpha)),
        "rational_norm": str(fill.details["rational_norm"]),
        "layers": layers,
        "max_abs_beta_horizontal": report["max_abs_horizontal"],
        "max_abs_beta_vertical": report["max_abs_vertical"],
        "checks": {k: v["passed"] for k, v in report.items()
                   if isinstance(v, dict) and "passed" in v},
        "all_passed": report["all_passed"],
        "tube_counts": tube_counts,
        "omega": omega.to_json_dict(),
        "alpha": alpha.to_json_dict(),
        "beta": sched.to_json_dict(),
    }
