"""LP1 construction and exact feasibility testing.

Two solver routes with the same contract (zero-tolerance rational answers):

* "cuts" (default): a master LP over y only, solved by the exact phase-1
  simplex below, with lazily separated client-set inequalities
  sum_u min(L(u), |N[u] cap W|) * y_u >= |W|.  Separation is an exact
  rational max-flow; a saturating flow directly yields the x values.
  Every generated inequality is implied by LP1 (constraints 2+3+4), and each
  round adds an inequality violated by the current master point, so the loop
  terminates: there are finitely many client sets.
* "dense": phase-1 simplex over the full (x, y) variable space.  Quadratic
  blowup, used for cross-checking on small instances.

Vertices with capacity 0 get y pinned to 0 up front; with the pin, k larger
than the number of positive-capacity vertices is naturally infeasible in
hard mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .assignment import Assignment
from .errors import InputError, PipelineError
from .flownet import MaxFlowNetwork
from .graph_core import HARD, INF, SOFT
from .rational import RAT, as_fraction

_MAX_PIVOTS = 500_000
_MAX_ROUNDS = 10_000
_BLAND_AFTER = 50  # degenerate pivots before switching to Bland's rule


@dataclass(frozen=True)
class LPModel:
    graph: object
    capacities: tuple
    k: int
    soft: bool
    pinned: frozenset  # capacity-0 vertices, y fixed to 0
    x_pairs: tuple  # ordered (u, v) with hop distance <= 1

    @property
    def mode(self):
        return SOFT if self.soft else HARD


@dataclass(frozen=True)
class FeasibilityResult:
    assignment: object  # Assignment when feasible, None otherwise

    @property
    def feasible(self):
        return self.assignment is not None


def build_lp1(graph, capacities, k, soft=False):
    n = graph.vertex_count
    if len(capacities) != n:
        raise InputError("capacity list length mismatch")
    for v, c in enumerate(capacities):
        if not isinstance(c, int) or c < 0:
            raise InputError(f"capacity of vertex {v} must be a nonnegative integer")
    if k < 1:
        raise InputError("k must be >= 1")
    if not soft and k > n:
        raise InputError(f"hard mode needs k <= |V| ({k} > {n})")
    pairs = []
    for u in range(n):
        for v in sorted([u] + graph.neighbors(u)):
            pairs.append((u, v))
    pinned = frozenset(v for v in range(n) if capacities[v] == 0)
    return LPModel(graph, tuple(capacities), k, soft, pinned, tuple(pairs))


# ---------------------------------------------------------------------------
# exact sparse phase-1 simplex


class Phase1Tableau:
    """Incremental exact phase-1 simplex over {x >= 0} plus appended rows.

    Rows may be added between solves; the basis carries over, so re-solving
    after one extra row usually takes a handful of pivots.  The cut loop in
    _solve_cuts leans on this: a fresh solve of its master costs seconds at
    500+ vertices, a warm one does not.
    Anti-cycling: Dantzig entering, falling back to Bland's rule after a
    degenerate streak; leaving ties always break on the smallest basis column.
    """

    def __init__(self, num_vars):
        self.num_vars = num_vars
        self.next_col = num_vars
        self.mat = []  # sparse rows: column -> rational, basis column kept at 1
        self.rhs = []
        self.basis = []
        self.art_cols = set()

    def add_row(self, coefs, sense, b):
        b = RAT(b)
        d = {c: RAT(v) for c, v in coefs.items() if v != 0}
        # substitute out the current basic variables so the row enters in
        # reduced form; tableau rows hold no other basic columns, so one pass
        # suffices
        for i, bc in enumerate(self.basis):
            coef = d.pop(bc, None)
            if coef is None or coef == 0:
                continue
            for c, v in self.mat[i].items():
                if c == bc:
                    continue
                nv = d.get(c, 0) - coef * v
                if nv == 0:
                    d.pop(c, None)
                else:
                    d[c] = nv
            b = b - coef * self.rhs[i]
        if b < 0:
            b = -b
            d = {c: -v for c, v in d.items()}
            sense = {"<=": ">=", ">=": "<=", "==": "=="}[sense]
        if sense == "<=":
            d[self.next_col] = RAT(1)
            self.basis.append(self.next_col)
            self.next_col += 1
        elif sense in (">=", "=="):
            if sense == ">=":
                d[self.next_col] = RAT(-1)
                self.next_col += 1
            d[self.next_col] = RAT(1)
            self.basis.append(self.next_col)
            self.art_cols.add(self.next_col)
            self.next_col += 1
        else:
            raise PipelineError(f"bad sense {sense!r}")
        self.mat.append(d)
        self.rhs.append(b)

    def values(self):
        vals = [Fraction(0)] * self.num_vars
        for i, bc in enumerate(self.basis):
            if bc < self.num_vars:
                vals[bc] = as_fraction(self.rhs[i])
        return vals

    def _pivot(self, pr, entering):
        mat, rhs = self.mat, self.rhs
        prow = mat[pr]
        pval = prow.pop(entering)
        if pval != 1:
            prow = {c: v / pval for c, v in prow.items()}
            rhs[pr] = rhs[pr] / pval
            mat[pr] = prow
        rp = rhs[pr]
        for i in range(len(mat)):
            if i == pr:
                continue
            row = mat[i]
            coef = row.pop(entering, None)
            if coef is None or coef == 0:
                continue
            for c, v in prow.items():
                nv = row.get(c, 0) - coef * v
                if nv == 0:
                    row.pop(c, None)
                else:
                    row[c] = nv
            rhs[i] = rhs[i] - coef * rp
        prow[entering] = RAT(1)
        self.basis[pr] = entering
        return prow, rp

    def _expel_artificials(self):
        """Degenerate-pivot every basic artificial out, then drop dead columns.

        Runs only at w = 0, where each basic artificial sits at rhs 0: the
        pivot moves no mass, but once an artificial is nonbasic it is pinned
        to 0 and later pivots cannot disturb the row it used to patch.  Rows
        with no structural entry left are redundant and inert; their
        artificial stays, marked live.
        """
        live = set()
        for i, bc in enumerate(self.basis):
            if bc not in self.art_cols:
                continue
            entering = None
            for c, v in self.mat[i].items():
                if c != bc and c not in self.art_cols and v != 0:
                    entering = c
                    break
            if entering is None:
                live.add(bc)
            else:
                self._pivot(i, entering)
        dead = self.art_cols - live
        if dead:
            for row in self.mat:
                for c in row.keys() & dead:
                    del row[c]
            self.art_cols = live

    def solve(self):
        """Drive the basic-artificial total to 0.  True iff feasible."""
        mat, rhs, basis = self.mat, self.rhs, self.basis
        art_cols = self.art_cols
        # objective w = sum of basic artificials, over nonbasic columns:
        # w = wrhs - sum wrow[c] * x_c
        wrow = {}
        wrhs = RAT(0)
        for i, bc in enumerate(basis):
            if bc not in art_cols:
                continue
            wrhs += rhs[i]
            for c, v in mat[i].items():
                if c == bc:
                    continue
                nv = wrow.get(c, 0) + v
                if nv == 0:
                    wrow.pop(c, None)
                else:
                    wrow[c] = nv
        if wrhs == 0:
            self._expel_artificials()
            return True

        degenerate_streak = 0
        for _ in range(_MAX_PIVOTS):
            entering = None
            if degenerate_streak < _BLAND_AFTER:
                best = None
                for c, v in wrow.items():
                    if v <= 0 or c in art_cols:
                        continue
                    if best is None or v > best or (v == best and c < entering):
                        best = v
                        entering = c
            else:
                for c in sorted(wrow):
                    if wrow[c] > 0 and c not in art_cols:
                        entering = c
                        break
            if entering is None:
                return False  # w minimized at a positive value
            pr = None
            best_ratio = None
            best_basis = None
            for i in range(len(mat)):
                a = mat[i].get(entering)
                if a is not None and a > 0:
                    ratio = rhs[i] / a
                    if (
                        best_ratio is None
                        or ratio < best_ratio
                        or (ratio == best_ratio and basis[i] < best_basis)
                    ):
                        best_ratio = ratio
                        pr = i
                        best_basis = basis[i]
            if pr is None:
                raise PipelineError("phase-1 search direction unbounded; w >= 0 forbids this")
            degenerate_streak = degenerate_streak + 1 if best_ratio == 0 else 0

            prow, rp = self._pivot(pr, entering)
            wc = wrow.pop(entering, None)
            if wc is not None and wc != 0:
                for c, v in prow.items():
                    if c == entering:
                        continue
                    nv = wrow.get(c, 0) - wc * v
                    if nv == 0:
                        wrow.pop(c, None)
                    else:
                        wrow[c] = nv
                wrhs = wrhs - wc * rp
            if wrhs == 0:
                self._expel_artificials()
                return True
        raise PipelineError("phase-1 simplex exceeded the pivot budget")


def phase1_feasible(num_vars, rows):
    """Decide feasibility of {x >= 0} + rows; rows are (coefs, sense, rhs).

    coefs maps column -> rational, sense is one of '<=', '>=', '=='.
    Returns per-column values (Fractions) or None if infeasible.
    """
    tab = Phase1Tableau(num_vars)
    for coefs, sense, b in rows:
        tab.add_row(coefs, sense, b)
    if not tab.solve():
        return None
    return tab.values()


# ---------------------------------------------------------------------------
# verification (constraints 1-5 and 7 exactly, plus the distance rule)


def verify_assignment_feasible(graph, capacities, k, assignment, delta, soft=False):
    n = graph.vertex_count
    if assignment.vertex_count != n or delta < 0:
        return False
    y = assignment.y
    for q in y:
        if q < 0:
            return False
        if not soft and q > 1:
            return False
    if sum(y, Fraction(0)) != k:
        return False
    hops = graph.hop_distances()
    client_total = [Fraction(0)] * n
    for u, row in assignment.x.items():
        cap_u = capacities[u]
        yu = y[u]
        load = Fraction(0)
        hu = hops[u]
        for v, q in row.items():
            if q <= 0 or q > yu:
                return False
            d = hu[v]
            if d == INF or d > delta:
                return False
            load += q
            client_total[v] += q
        if load > cap_u * yu:
            return False
    return all(t == 1 for t in client_total)


# ---------------------------------------------------------------------------
# solver routes


def solve_feasibility(model, method="cuts"):
    if method == "cuts":
        return _solve_cuts(model)
    if method == "dense":
        return _solve_dense(model)
    raise InputError(f"unknown method {method!r}")


def _finish(model, assignment):
    ok = verify_assignment_feasible(
        model.graph, model.capacities, model.k, assignment, 1, model.soft
    )
    if not ok:
        raise PipelineError("solver produced an assignment that fails verification")
    return FeasibilityResult(assignment)


def _solve_cuts(model):
    graph, caps, k, soft = model.graph, model.capacities, model.k, model.soft
    n = graph.vertex_count
    centers = [u for u in range(n) if u not in model.pinned]
    if not centers:
        return FeasibilityResult(None)  # no capacity anywhere, yet k >= 1 clients
    col = {u: i for i, u in enumerate(centers)}
    m = len(centers)
    nbhd = [sorted([v] + graph.neighbors(v)) for v in range(n)]

    tab = Phase1Tableau(m)
    tab.add_row({i: 1 for i in range(m)}, "==", k)
    if not soft:
        for i in range(m):
            tab.add_row({i: 1}, "<=", 1)

    signatures = set()

    def add_cut(coefs, rhs_val):
        sig = (tuple(sorted(coefs.items())), rhs_val)
        if sig in signatures:
            return False
        signatures.add(sig)
        tab.add_row(coefs, ">=", rhs_val)
        return True

    # one-client inequalities seeded up front: sum of y over N[v] >= 1
    for v in range(n):
        cols = [col[u] for u in nbhd[v] if u in col]
        if not cols:
            return FeasibilityResult(None)  # nobody can serve v
        add_cut({c: 1 for c in cols}, 1)

    for _ in range(_MAX_ROUNDS):
        if not tab.solve():
            return FeasibilityResult(None)
        vals = tab.values()

        net = MaxFlowNetwork(2 + m + n)
        s, t = 0, 1 + m + n
        center_arcs = {}
        for i, u in enumerate(centers):
            yi = vals[i]
            if yi == 0:
                continue
            net.add_edge(s, 1 + i, caps[u] * yi)
            for v in nbhd[u]:
                center_arcs[(u, v)] = net.add_edge(1 + i, 1 + m + v, yi)
        for v in range(n):
            net.add_edge(1 + m + v, t, 1)
        total = net.max_flow(s, t)
        if total == n:
            a = Assignment(n, model.mode)
            for i, u in enumerate(centers):
                a.y[u] = vals[i]
            for (u, v), arc in center_arcs.items():
                q = net.flow_on(arc)
                if q > 0:
                    a.set_x(u, v, as_fraction(q))
            return _finish(model, a)

        reach = net.source_side_cut(s)
        w_set = {v for v in range(n) if (1 + m + v) not in reach}
        coefs = {}
        for i, u in enumerate(centers):
            c = min(caps[u], sum(1 for v in nbhd[u] if v in w_set))
            if c > 0:
                coefs[i] = c
        lhs = sum(coefs.get(i, 0) * vals[i] for i in range(m))
        if lhs >= len(w_set):
            raise PipelineError("separated inequality is not violated; cut logic bug")
        if not add_cut(coefs, len(w_set)):
            raise PipelineError("duplicate cut separated; master solution ignored it")
    raise PipelineError("cut loop exceeded the round budget")


def _lp1_rows(model):
    """Full LP1 row list over columns: y_u -> u, x pair j -> n + j."""
    graph, caps, k, soft = model.graph, model.capacities, model.k, model.soft
    n = graph.vertex_count
    pair_col = {p: n + j for j, p in enumerate(model.x_pairs)}
    rows = []
    rows.append(({u: 1 for u in range(n)}, "==", k, "sum_y"))
    for (u, v), c in pair_col.items():
        rows.append(({c: 1, u: -1}, "<=", 0, f"open_{u}_{v}"))
    by_center = {u: [] for u in range(n)}
    by_client = {v: [] for v in range(n)}
    for (u, v), c in pair_col.items():
        by_center[u].append(c)
        by_client[v].append(c)
    for u in range(n):
        coefs = {c: 1 for c in by_center[u]}
        coefs[u] = coefs.get(u, 0) - caps[u]
        rows.append((coefs, "<=", 0, f"load_{u}"))
    for v in range(n):
        rows.append(({c: 1 for c in by_client[v]}, "==", 1, f"serve_{v}"))
    for u in range(n):
        if u in model.pinned:
            rows.append(({u: 1}, "<=", 0, f"pin_{u}"))
        elif not soft:
            rows.append(({u: 1}, "<=", 1, f"cap1_{u}"))
    return rows, pair_col


def _solve_dense(model):
    n = model.graph.vertex_count
    rows, pair_col = _lp1_rows(model)
    vals = phase1_feasible(n + len(model.x_pairs), [(c, s, b) for c, s, b, _ in rows])
    if vals is None:
        return FeasibilityResult(None)
    a = Assignment(n, model.mode)
    for u in range(n):
        a.y[u] = vals[u]
    for (u, v), c in pair_col.items():
        if vals[c] > 0:
            a.set_x(u, v, vals[c])
    return _finish(model, a)


# ---------------------------------------------------------------------------
# LP text dump (interchange format; documentation aid, nothing consumes it)


def format_lp_dump(model):
    n = model.graph.vertex_count

    def var(col):
        if col < n:
            return f"y_{col}"
        u, v = model.x_pairs[col - n]
        return f"x_{u}_{v}"

    rows, _ = _lp1_rows(model)
    out = ["\\ LP1 feasibility model (no objective)", "Minimize", " obj: 0 y_0", "Subject To"]
    sense_txt = {"<=": "<=", ">=": ">=", "==": "="}
    for coefs, sense, b, name in rows:
        if name.startswith(("pin_", "cap1_")):
            continue  # bounds section below
        terms = []
        for c in sorted(coefs):
            q = coefs[c]
            if q == 0:
                continue
            sign = "+" if q > 0 else "-"
            mag = abs(q)
            coef_txt = "" if mag == 1 else f"{mag} "
            terms.append(f"{sign} {coef_txt}{var(c)}")
        if not terms:
            terms = ["+ 0 y_0"]
        expr = " ".join(terms)
        if expr.startswith("+ "):
            expr = expr[2:]
        out.append(f" {name}: {expr} {sense_txt[sense]} {b}")
    out.append("Bounds")
    for u in range(n):
        if u in model.pinned:
            out.append(f" y_{u} = 0")
        elif not model.soft:
            out.append(f" y_{u} <= 1")
    out.append("End")
    return "\n".join(out) + "\n"


def write_lp_dump(model, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_lp_dump(model))
