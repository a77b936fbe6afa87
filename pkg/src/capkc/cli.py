"""Command line front end.

Subcommands:

  solve    round an instance end to end (hard, soft, or exact mode)
  verify   check a solution file against an instance file
  gen      write one of the built-in instance families
  oracle   query the brute-force exact solver

Exit codes: 0 solved or valid, 2 infeasible or invalid, 3 bad input.

The solver sweeps candidate radii in ascending order.  At each radius it
splits the threshold graph into connected components, binary-searches
the smallest per-component budget whose relaxation is feasible, and
accepts the radius once those budgets fit inside k.  The first accepted
radius is therefore also a certified lower bound on the optimum, and
the reported hop radius bounds the stretch against it.
"""

import argparse
import sys
from fractions import Fraction

from .assignment import write_assignment
from .caterpillar import round_y
from .errors import CapkcError, InputError, ValidationError
from .exact_oracle import exact_opt, feasible_at
from .graph_core import (
    HARD,
    SOFT,
    candidate_radii,
    connected_components,
    induced_subgraph,
    read_instance,
    threshold_graph,
    write_instance,
)
from .instances import (
    gen_fig1,
    gen_gap_construction,
    gen_random_connected,
    gen_x3c,
)
from .lp_feasibility import build_lp1, solve_feasibility, write_lp_dump
from .rational import format_rational, parse_rational
from .shifting import RoundingContext, TraceLog
from .soft_solver import solve_soft
from .x_rounding import (
    Solution,
    format_solution,
    read_solution,
    round_x,
    validate_solution,
    write_solution,
)

__all__ = ["main"]


def _print(line=""):
    sys.stdout.write(line + "\n")


def _minimal_budget(graph, capacities, k_cap, soft):
    """Smallest k' in [1, k_cap] whose relaxation is feasible, or None.

    Feasibility is monotone in k': extra opening mass can always sit on
    a vertex with headroom.  Returns (k', assignment) for the leftmost
    feasible budget.
    """
    if k_cap < 1:
        return None
    lo, hi = 1, k_cap
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        res = solve_feasibility(build_lp1(graph, list(capacities), mid, soft=soft))
        if res.feasible:
            best = (mid, res.assignment)
            hi = mid - 1
        else:
            lo = mid + 1
    return best


def _component_plan(inst, r, soft):
    """Per-component minimal budgets at threshold radius r.

    Returns (plans, shortfall): plans is a list of
    (subgraph, old_ids, budget, assignment); shortfall collects report
    lines for components whose relaxation never becomes feasible.
    """
    g = threshold_graph(inst, r)
    plans = []
    shortfall = []
    for comp in connected_components(g):
        sub, old_ids = induced_subgraph(g, comp)
        caps = [inst.capacities[v] for v in old_ids]
        k_cap = inst.k if soft else min(inst.k, sub.vertex_count)
        found = _minimal_budget(sub, caps, k_cap, soft)
        if found is None:
            shortfall.append(
                f"component of {old_ids[0]}: relaxation infeasible"
                f" for every budget up to {k_cap}"
            )
            plans.append((sub, old_ids, None, None))
        else:
            plans.append((sub, old_ids, found[0], found[1]))
    return plans, shortfall


def _stitch(inst, plans, soft):
    """Round every component and merge into one full-instance Solution.

    Returns (solution, hop_radius, certificate_text).  Budgets below k
    in total are padded: hard mode opens unused vertices with zero load,
    soft mode stacks extra multiplicity on the first opened center.
    """
    n = inst.vertex_count
    phi = [-1] * n
    centers = {}
    hop_radius = 0
    sections = []
    spent = 0
    for sub, old_ids, budget, assignment in plans:
        spent += budget
        if soft:
            caps = [inst.capacities[v] for v in old_ids]
            sol = solve_soft(sub, caps, budget, assignment)
        else:
            caps = [inst.capacities[v] for v in old_ids]
            trace = TraceLog()
            ctx = RoundingContext(sub, caps, trace=trace)
            delta = round_y(ctx, assignment, budget)
            sol = round_x(sub, caps, assignment, delta)
            ids = " ".join(str(v) for v in old_ids)
            sections.append(f"# component {ids}\n" + trace.to_text())
        hop_radius = max(hop_radius, sol.radius)
        for new_id, center in enumerate(sol.phi):
            phi[old_ids[new_id]] = old_ids[center]
        for center, mult in sol.centers.items():
            old = old_ids[center]
            centers[old] = centers.get(old, 0) + mult

    spare = inst.k - spent
    if spare > 0:
        if soft:
            first = min(centers)
            centers[first] += spare
        else:
            for v in range(n):
                if spare == 0:
                    break
                if v not in centers:
                    centers[v] = 1
                    spare -= 1
            if spare:
                raise InputError(
                    f"cannot open {inst.k} distinct centers"
                    f" on {n} vertices"
                )

    reach = max(Fraction(inst.dist[phi[v]][v]) for v in range(n))
    if reach.denominator == 1:
        reach = int(reach)
    solution = Solution(
        k=inst.k,
        radius=reach,
        centers=centers,
        phi=tuple(phi),
        trace="".join(sections),
    )
    return solution, hop_radius


def _emit_solution(inst, solution, args):
    soft = inst.mode == SOFT
    validate_solution(inst.dist, inst.capacities, inst.k, solution, soft=soft)
    if getattr(args, "emit_certificate", None):
        with open(args.emit_certificate, "w", encoding="ascii") as fh:
            fh.write(solution.trace or "")
    if args.output:
        write_solution(solution, args.output)
    else:
        sys.stdout.write(format_solution(solution))


def _cmd_solve(args):
    inst = read_instance(args.instance)
    mode = args.mode or inst.mode

    if mode == "exact":
        found = exact_opt(inst)
        if found is None:
            _print("status: infeasible")
            _print("reason: no center set serves every client at any radius")
            return 2
        radius, solution = found
        _print("status: solved")
        _print(f"radius: {format_rational(radius)}")
        _print("method: exact")
        _emit_solution(inst, solution, args)
        return 0

    soft = mode == SOFT
    if not soft and inst.k > inst.vertex_count:
        _print("status: infeasible")
        _print(
            f"reason: k = {inst.k} exceeds the {inst.vertex_count} vertices"
            " available for distinct centers"
        )
        return 2

    radii = [Fraction(0)]
    radii.extend(r for r in candidate_radii(inst) if r != 0)
    last_report = []
    for r in radii:
        plans, shortfall = _component_plan(inst, r, soft)
        needed = sum(budget for _, _, budget, _ in plans if budget is not None)
        last_report = [
            f"component of {old_ids[0]}: needs {budget} centers"
            for _, old_ids, budget, _ in plans
            if budget is not None
        ] + shortfall
        if shortfall or needed > inst.k:
            if args.emit_lp_dump:
                g = threshold_graph(inst, r)
                write_lp_dump(
                    build_lp1(g, list(inst.capacities), inst.k, soft=soft),
                    args.emit_lp_dump,
                )
            continue

        solution, hops = _stitch(inst, plans, soft)
        if args.max_stretch_assert is not None and hops > args.max_stretch_assert:
            raise CapkcError(
                f"stretch assertion failed: {hops} hops"
                f" > {args.max_stretch_assert}"
            )
        _print("status: solved")
        _print(f"threshold: {format_rational(r)}")
        _print(f"stretch: {hops}")
        _print(f"radius: {format_rational(solution.radius)}")
        if args.seed is not None:
            _print(f"seed: {args.seed}")
        if args.emit_lp_dump:
            g = threshold_graph(inst, r)
            write_lp_dump(
                build_lp1(g, list(inst.capacities), inst.k, soft=soft),
                args.emit_lp_dump,
            )
        _emit_solution(inst, solution, args)
        return 0

    _print("status: infeasible")
    _print(f"k: {inst.k}")
    _print("at the largest radius the relaxation still needs:")
    for line in last_report:
        _print("  " + line)
    return 2


def _cmd_verify(args):
    inst = read_instance(args.instance)
    solution = read_solution(args.solution)
    try:
        validate_solution(
            inst.dist,
            inst.capacities,
            inst.k,
            solution,
            soft=inst.mode == SOFT,
        )
    except ValidationError as exc:
        _print(f"invalid: {exc}")
        return 2
    _print(
        f"valid: {solution.open_count()} centers within radius"
        f" {format_rational(solution.radius)}"
    )
    return 0


def _write_or_print_instance(inst, out):
    if out:
        write_instance(inst, out)
    else:
        from .graph_core import format_instance

        sys.stdout.write(format_instance(inst))


def _cmd_gen(args):
    witness = None
    if args.family == "fig1":
        inst, witness = gen_fig1()
    elif args.family == "gap":
        inst, witness = gen_gap_construction(args.k, nonuniform=args.nonuniform)
    elif args.family == "x3c":
        universe = [s for s in args.universe.split(",") if s]
        sets = [
            tuple(part.split(","))
            for part in args.sets.split(";")
            if part
        ]
        inst = gen_x3c(sets, universe)
    else:
        inst = gen_random_connected(
            args.n,
            args.density,
            (args.cap_lo, args.cap_hi),
            args.k,
            args.seed,
            mode=args.mode,
        )
    _write_or_print_instance(inst, args.out)
    if args.witness_out:
        if witness is None:
            raise InputError(f"family {args.family} has no witness to write")
        write_assignment(witness, args.witness_out)
    return 0


def _cmd_oracle(args):
    inst = read_instance(args.instance)
    if args.radius is not None:
        try:
            radius = parse_rational(args.radius)
        except ValueError as exc:
            raise InputError(f"bad --radius value: {exc}") from exc
        solution = feasible_at(inst, radius, args.mode)
        if solution is None:
            _print(f"infeasible at radius {args.radius}")
            return 2
        sys.stdout.write(format_solution(solution))
        return 0
    found = exact_opt(inst, args.mode)
    if found is None:
        _print("infeasible at every radius")
        return 2
    radius, solution = found
    _print(f"radius: {format_rational(radius)}")
    sys.stdout.write(format_solution(solution))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="capkc",
        description="capacitated k-center solver toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve an instance file")
    solve.add_argument("instance")
    solve.add_argument("--mode", choices=[HARD, SOFT, "exact"], default=None)
    solve.add_argument("--output", "-o", default=None, help="solution file")
    solve.add_argument("--emit-certificate", default=None, metavar="PATH")
    solve.add_argument("--emit-lp-dump", default=None, metavar="PATH")
    solve.add_argument(
        "--seed",
        type=int,
        default=None,
        help="recorded in the report; the pipeline itself is deterministic",
    )
    solve.add_argument("--max-stretch-assert", type=int, default=None)
    solve.set_defaults(func=_cmd_solve)

    verify = sub.add_parser("verify", help="validate a solution file")
    verify.add_argument("instance")
    verify.add_argument("solution")
    verify.set_defaults(func=_cmd_verify)

    gen = sub.add_parser("gen", help="generate a built-in instance")
    fam = gen.add_subparsers(dest="family", required=True)

    fig1 = fam.add_parser("fig1")
    gap = fam.add_parser("gap")
    gap.add_argument("--k", type=int, required=True)
    gap.add_argument("--nonuniform", action="store_true")
    x3c = fam.add_parser("x3c")
    x3c.add_argument("--universe", required=True, help="comma-separated labels")
    x3c.add_argument("--sets", required=True, help="semicolon-separated triples")
    rnd = fam.add_parser("random")
    rnd.add_argument("--n", type=int, required=True)
    rnd.add_argument("--density", type=float, default=0.5)
    rnd.add_argument("--cap-lo", type=int, default=1)
    rnd.add_argument("--cap-hi", type=int, default=4)
    rnd.add_argument("--k", type=int, required=True)
    rnd.add_argument("--seed", type=int, default=0)
    rnd.add_argument("--mode", choices=[HARD, SOFT], default=HARD)
    for p in (fig1, gap, x3c, rnd):
        p.add_argument("--out", default=None)
        p.add_argument("--witness-out", default=None)
        p.set_defaults(func=_cmd_gen)

    oracle = sub.add_parser("oracle", help="query the brute-force solver")
    oracle.add_argument("instance")
    oracle.add_argument("--radius", default=None)
    oracle.add_argument("--mode", choices=[HARD, SOFT], default=None)
    oracle.set_defaults(func=_cmd_oracle)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except CapkcError as exc:
        # pipeline and validation failures are bugs or broken assertions,
        # not bad input; surface them distinctly
        print(f"failure: {exc}", file=sys.stderr)
        return 1
