import random
from fractions import Fraction

import pytest

from capkc.assignment import Assignment, global_delta, radius_of
from capkc.caterpillar import (
    Caterpillar,
    SeparabilityWitness,
    build_caterpillar,
    build_rounding_flow,
    gamma,
    is_safe,
    make_safe,
    round_y,
    separability_witness,
    separate,
    validate_caterpillar,
)
from capkc.errors import PipelineError, ValidationError
from capkc.graph_core import Graph
from capkc.lp_feasibility import build_lp1, solve_feasibility, verify_assignment_feasible
from capkc.shifting import RoundingContext, TraceLog, chain_shift, replay_trace

from helpers import rand_connected_graph, two_hub_gadget, two_hub_witness


F = Fraction


def path_graph(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def star_assignment(n, spine, leaf_y, x_pairs=None):
    """y = 1 on `spine`, `leaf_y` maps vertex -> fraction, x from pairs."""
    a = Assignment(n)
    for v in spine:
        a.y[v] = F(1)
    for v, q in leaf_y.items():
        a.y[v] = q
    for (u, v), q in (x_pairs or {}).items():
        a.set_x(u, v, q)
    return a


def self_serving_x(a, spine, leaf_anchor):
    """Spine vertices serve themselves; each leaf splits between itself and its anchor."""
    for v in spine:
        a.set_x(v, v, F(1))
    for u, s in leaf_anchor.items():
        a.set_x(u, u, a.y[u])
        a.set_x(s, u, 1 - a.y[u])


# ---------------------------------------------------------------------------
# frozen seven-spine scenarios
#
# "wide": a separable structure; spine capacities (2,1,5,5,3,5,5), six leaves.
# "narrow": a dangerous but non-separable structure; every side of every
# low spine vertex is short on headroom.

WIDE_SPINE_CAPS = (2, 1, 5, 5, 3, 5, 5)
WIDE_LEAF = {7: F(1, 2), 8: F(4, 5), 9: F(1, 2), 10: F(9, 10), 11: F(3, 5), 12: F(7, 10)}
WIDE_LEAF_CAPS = {7: 4, 8: 2, 9: 1, 10: 4, 11: 4, 12: 4}
WIDE_ANCHOR = {7: 0, 8: 0, 9: 2, 10: 3, 11: 5, 12: 6}


def wide_case():
    edges = [(i, i + 1) for i in range(6)] + sorted(
        (min(u, s), max(u, s)) for u, s in WIDE_ANCHOR.items()
    )
    g = Graph(13, edges)
    caps = list(WIDE_SPINE_CAPS) + [WIDE_LEAF_CAPS[u] for u in range(7, 13)]
    a = star_assignment(13, range(7), WIDE_LEAF)
    self_serving_x(a, range(7), WIDE_ANCHOR)
    cat = Caterpillar(1, tuple(range(7)), (7, 8, None, 9, 10, None, 11, 12, None))
    return RoundingContext(g, caps), a, cat


NARROW_SPINE_CAPS = (9, 9, 2, 9, 2, 9, 9)
NARROW_LEAF = {
    7: F(2, 5), 8: F(7, 10), 9: F(4, 5), 10: F(1, 5), 11: F(4, 5), 12: F(3, 5), 13: F(1, 2)
}
NARROW_LEAF_CAPS = {7: 5, 8: 1, 9: 1, 10: 1, 11: 1, 12: 1, 13: 5}
NARROW_ANCHOR = {7: 0, 8: 0, 9: 2, 10: 3, 11: 4, 12: 5, 13: 6}


def narrow_case():
    edges = [(i, i + 1) for i in range(6)] + sorted(
        (min(u, s), max(u, s)) for u, s in NARROW_ANCHOR.items()
    )
    g = Graph(14, edges)
    caps = list(NARROW_SPINE_CAPS) + [NARROW_LEAF_CAPS[u] for u in range(7, 14)]
    a = star_assignment(14, range(7), NARROW_LEAF)
    self_serving_x(a, range(7), NARROW_ANCHOR)
    cat = Caterpillar(1, tuple(range(7)), (7, 8, None, 9, 10, 11, 12, 13, None))
    return RoundingContext(g, caps), a, cat


# ---------------------------------------------------------------------------
# the structure type and its validator


class TestCaterpillarType:
    def test_shape_mismatch(self):
        with pytest.raises(ValidationError, match="spine length plus two"):
            Caterpillar(1, (0, 1), (None, None))

    def test_delta_positive(self):
        with pytest.raises(ValidationError, match="delta"):
            Caterpillar(0, (0,), (None, None, None))

    def test_reverse_involution(self):
        cat = Caterpillar(3, (0, 1, 2), (5, None, 6, None, 7))
        assert cat.reverse().reverse() == cat
        assert cat.reverse().spine == (2, 1, 0)
        assert cat.reverse().leaves == (7, None, 6, None, 5)

    def test_anchors_clamp_to_spine_ends(self):
        cat = Caterpillar(1, (4, 5, 6), (0, 1, 2, 3, 9))
        assert [cat.anchor(j) for j in range(5)] == [4, 4, 5, 6, 6]


class TestValidate:
    def ok(self):
        # path 0-1-2 with leaves 3,4 on the ends
        g = Graph(5, [(0, 1), (1, 2), (0, 3), (2, 4)])
        caps = [3, 3, 3, 2, 2]
        a = star_assignment(5, (0, 1, 2), {3: F(1, 2), 4: F(1, 2)})
        return RoundingContext(g, caps), a, Caterpillar(1, (0, 1, 2), (3, None, None, None, 4))

    def test_valid(self):
        ctx, a, cat = self.ok()
        validate_caterpillar(ctx, a, cat)

    def test_out_of_range(self):
        ctx, a, _ = self.ok()
        with pytest.raises(ValidationError, match="out of range"):
            validate_caterpillar(ctx, a, Caterpillar(1, (0, 9), (None, None, None, None)))

    def test_spine_repeat(self):
        ctx, a, _ = self.ok()
        with pytest.raises(ValidationError, match="spine vertex repeats"):
            validate_caterpillar(ctx, a, Caterpillar(1, (0, 0), (None, None, None, None)))

    def test_spine_needs_full_y(self):
        ctx, a, cat = self.ok()
        a.y[1] = F(1, 2)
        with pytest.raises(ValidationError, match="must have y = 1"):
            validate_caterpillar(ctx, a, cat)

    def test_spine_gap(self):
        ctx, a, _ = self.ok()
        with pytest.raises(ValidationError, match="spine gap"):
            validate_caterpillar(ctx, a, Caterpillar(1, (0, 2), (None, None, None, None)))

    def test_leaf_on_spine(self):
        ctx, a, _ = self.ok()
        with pytest.raises(ValidationError, match="lies on the spine"):
            validate_caterpillar(ctx, a, Caterpillar(1, (0, 1, 2), (None, 2, None, None, None)))

    def test_leaf_needs_fractional_y(self):
        ctx, a, cat = self.ok()
        a.y[3] = F(1)
        with pytest.raises(ValidationError, match="fractional"):
            validate_caterpillar(ctx, a, cat)

    def test_leaf_distance(self):
        ctx, a, _ = self.ok()
        # leaf 4 hangs off vertex 2, far from anchor 0
        cat = Caterpillar(1, (0, 1, 2), (4, None, None, None, 3))
        with pytest.raises(ValidationError, match="too far"):
            validate_caterpillar(ctx, a, cat)

    def test_middle_leaf_capacity(self):
        g = Graph(3, [(0, 1), (0, 2)])
        ctx = RoundingContext(g, [1, 3, 3])
        a = star_assignment(3, (0,), {1: F(1, 2), 2: F(1, 2)})
        with pytest.raises(ValidationError, match="outgrows"):
            validate_caterpillar(ctx, a, Caterpillar(1, (0,), (None, 1, 2)))

    def test_end_leaf_capacity_free(self):
        # end slots carry no capacity constraint
        g = Graph(3, [(0, 1), (0, 2)])
        ctx = RoundingContext(g, [1, 3, 3])
        a = star_assignment(3, (0,), {1: F(1, 2), 2: F(1, 2)})
        validate_caterpillar(ctx, a, Caterpillar(1, (0,), (1, None, 2)))

    def test_leaf_repeats(self):
        g = Graph(3, [(0, 1), (1, 2)])
        ctx = RoundingContext(g, [3, 3, 3])
        a = star_assignment(3, (1,), {0: F(1, 2)})
        with pytest.raises(ValidationError, match="leaf repeats"):
            validate_caterpillar(ctx, a, Caterpillar(1, (1,), (0, None, 0)))

    def test_leaf_total_integral(self):
        ctx, a, cat = self.ok()
        a.y[4] = F(1, 3)
        with pytest.raises(ValidationError, match="total an integer"):
            validate_caterpillar(ctx, a, cat)

    def test_empty_spine_carries_nothing(self):
        ctx, a, _ = self.ok()
        with pytest.raises(ValidationError, match="empty spine"):
            validate_caterpillar(ctx, a, Caterpillar(1, (), (3, None)))
        validate_caterpillar(ctx, a, Caterpillar(1, (), (None, None)))


# ---------------------------------------------------------------------------
# endangered vertices and witnesses


class TestGammaAndWitness:
    def test_wide_gamma(self):
        ctx, a, cat = wide_case()
        assert gamma(cat, ctx.capacities) == {0, 1, 4}
        assert not is_safe(cat, ctx.capacities)

    def test_wide_witness_prefers_right(self):
        # both sides of the minimum-capacity vertex qualify; right wins
        ctx, a, cat = wide_case()
        w = separability_witness(cat, a, ctx.capacities)
        assert w == SeparabilityWitness(2, "right", F(4, 5), F(27, 10))
        rw = separability_witness(cat.reverse(), a, ctx.capacities)
        assert rw == SeparabilityWitness(6, "right", F(7, 10), F(13, 10))

    def test_narrow_gamma(self):
        ctx, a, cat = narrow_case()
        assert gamma(cat, ctx.capacities) == {2, 4}

    def test_narrow_has_no_witness(self):
        ctx, a, cat = narrow_case()
        assert separability_witness(cat, a, ctx.capacities) is None

    def test_empty_structure_is_safe(self):
        cat = Caterpillar(1, (), (None, None))
        assert gamma(cat, [5]) == frozenset()
        assert is_safe(cat, [5])
        assert separability_witness(cat, Assignment(1), [5]) is None

    def test_leafless_structure_is_safe(self):
        cat = Caterpillar(1, (0, 1), (None, None, None, None))
        assert gamma(cat, [2, 2]) == frozenset()


# ---------------------------------------------------------------------------
# construction


class TestBuildCaterpillar:
    def test_trivial_path_spine_keeps_the_open_vertex(self):
        g = path_graph(3)
        ctx = RoundingContext(g, [3, 3, 3])
        a = Assignment(3)
        a.y[1] = F(1)
        for v in range(3):
            a.set_x(1, v, F(1))
        cat = build_caterpillar(ctx, a)
        assert cat == Caterpillar(21, (1,), (None, None, None))
        assert a.y == [F(0), F(1), F(0)]

    def test_rejects_soft_mode(self):
        g = path_graph(2)
        ctx = RoundingContext(g, [2, 2], soft=True)
        with pytest.raises(ValidationError, match="hard"):
            build_caterpillar(ctx, Assignment(2))

    def test_rejects_disconnected(self):
        g = Graph(4, [(0, 1), (2, 3)])
        ctx = RoundingContext(g, [2, 2, 2, 2])
        with pytest.raises(ValidationError, match="connected"):
            build_caterpillar(ctx, Assignment(4))

    def test_rejects_fractional_total(self):
        g = path_graph(2)
        ctx = RoundingContext(g, [2, 2])
        a = Assignment(2)
        a.y[0] = F(1, 2)
        with pytest.raises(ValidationError, match="integer"):
            build_caterpillar(ctx, a)

    def test_rejects_infeasible_assignment(self):
        g = path_graph(3)
        ctx = RoundingContext(g, [3, 1, 3])
        a = Assignment(3)
        a.y[1] = F(1)
        for v in range(3):
            a.set_x(1, v, F(1))
        with pytest.raises(ValidationError, match="not feasible"):
            build_caterpillar(ctx, a)

    def test_hub_pair_collapses_to_one_anchor(self):
        g = Graph(6, two_hub_gadget())
        ctx = RoundingContext(g, [4] * 6)
        a = Assignment(6)
        two_hub_witness(a)
        a.y[2] = F(1, 2)
        cat = build_caterpillar(ctx, a)
        assert cat == Caterpillar(21, (0,), (None, None, None))
        assert a.y == [F(1), F(0), F(1), F(0), F(0), F(0)]


# ---------------------------------------------------------------------------
# separation


class TestSeparate:
    def test_non_separable_is_untouched(self):
        ctx, a, cat = narrow_case()
        y0 = list(a.y)
        out = separate(ctx, a, cat)
        assert out == [cat]
        assert a.y == y0

    def test_integral_side_splits_without_shifting(self):
        # spine (0,1), capacities (1,9); the right side's leaf mass is already 1
        g = Graph(6, [(0, 1), (0, 2), (0, 3), (1, 4), (1, 5)])
        ctx = RoundingContext(g, [1, 9, 3, 1, 3, 3])
        a = star_assignment(
            6, (0, 1), {2: F(3, 10), 3: F(7, 10), 4: F(9, 20), 5: F(11, 20)}
        )
        cat = Caterpillar(1, (0, 1), (2, 3, 4, 5))
        w = separability_witness(cat, a, ctx.capacities)
        assert w == SeparabilityWitness(1, "right", F(1), F(1))
        y0 = list(a.y)
        out = separate(ctx, a, cat)
        assert out == [
            Caterpillar(1, (0,), (2, 3, None)),
            Caterpillar(1, (1,), (None, 4, 5)),
        ]
        assert a.y == y0

    def test_wide_case_full_split(self):
        ctx, a, cat = wide_case()
        trace = TraceLog()
        ctx = RoundingContext(ctx.graph, ctx.capacities, trace=trace)
        out = separate(ctx, a, cat)
        # the witness at spine vertex 1 pushes 3/10 into the bigger right leaves
        assert a.y[1] == F(7, 10)
        assert a.y[10] == F(1)
        assert a.y[11] == F(4, 5)
        assert out == [
            Caterpillar(1, (2, 3, 4, 5, 6), (None, 9, None, None, 11, 12, None)),
            Caterpillar(1, (0,), (7, 8, 1)),
        ]
        assert "path 1/10 1 2 3 10" in trace.lines
        assert "path 1/5 1 2 3 4 5 11" in trace.lines
        for c in out:
            assert separability_witness(c, a, ctx.capacities) is None
        # vertex 10 was filled and dropped
        assert verify_assignment_feasible(ctx.graph, ctx.capacities, 11, a, 5)

    def test_left_witness_runs_mirrored(self):
        # right side lacks headroom at the weak vertex; left side certifies
        g = Graph(7, [(0, 1), (1, 2), (0, 3), (0, 4), (2, 5), (2, 6)])
        ctx = RoundingContext(g, [9, 1, 9, 3, 2, 1, 3])
        a = star_assignment(
            7, (0, 1, 2), {3: F(1, 2), 4: F(1, 4), 5: F(1, 2), 6: F(3, 4)}
        )
        self_serving_x(a, (0, 1, 2), {3: 0, 4: 0, 5: 2, 6: 2})
        cat = Caterpillar(1, (0, 1, 2), (3, 4, None, 5, 6))
        w = separability_witness(cat, a, ctx.capacities)
        assert w == SeparabilityWitness(2, "left", F(5, 4), F(3, 4))
        out = separate(ctx, a, cat)
        assert a.y == [F(1), F(3, 4), F(1), F(1, 2), F(1, 2), F(1, 2), F(3, 4)]
        assert out == [
            Caterpillar(1, (0,), (3, 4, None)),
            Caterpillar(1, (2,), (1, 5, 6)),
        ]

    def test_head_split_regroups_everything_away(self):
        # single spine vertex between two big leaves: the flow fills the right
        # leaf, the regroup empties the spine vertex into the left leaf
        g = Graph(3, [(0, 1), (1, 2)])
        ctx = RoundingContext(g, [5, 3, 5])
        a = star_assignment(3, (1,), {0: F(1, 2), 2: F(1, 2)})
        a.set_x(1, 1, F(1))
        a.set_x(0, 0, F(1, 2))
        a.set_x(1, 0, F(1, 2))
        a.set_x(2, 2, F(1, 2))
        a.set_x(1, 2, F(1, 2))
        cat = Caterpillar(1, (1,), (0, None, 2))
        out = separate(ctx, a, cat)
        assert out == []
        assert a.y == [F(1), F(0), F(1)]

    def test_rejects_invalid_structure(self):
        ctx, a, cat = wide_case()
        a.y[0] = F(1, 2)
        with pytest.raises(ValidationError, match="y = 1"):
            separate(ctx, a, cat)


# ---------------------------------------------------------------------------
# defusing


class TestMakeSafe:
    def test_safe_inputs_come_back_as_is(self):
        ctx, a, cat = wide_case()
        parts = separate(ctx, a, cat)
        assert make_safe(ctx, a, parts) == parts

    def test_rejects_separable_input(self):
        ctx, a, cat = wide_case()
        with pytest.raises(ValidationError, match="non-separable"):
            make_safe(ctx, a, [cat])

    def test_narrow_case_single_pass(self):
        ctx, a, cat = narrow_case()
        trace = TraceLog()
        ctx = RoundingContext(ctx.graph, ctx.capacities, trace=trace)
        out = make_safe(ctx, a, [cat])
        # vertex 2 drains 3/5 into leaf 7 and 2/5 into leaf 13, then leaves
        # the spine; its leaf 9 takes the vacated slot
        assert "path 3/5 2 1 0 7" in trace.lines
        assert "path 2/5 2 3 4 5 6 13" in trace.lines
        assert a.y[2] == F(0)
        assert a.y[7] == F(1)
        assert a.y[13] == F(9, 10)
        assert out == [
            Caterpillar(2, (0, 1, 3, 4, 5, 6), (None, 8, 9, 10, 11, 12, 13, None))
        ]
        assert is_safe(out[0], ctx.capacities)
        assert verify_assignment_feasible(ctx.graph, ctx.capacities, 11, a, 3)

    def test_narrow_case_drains_fully(self):
        ctx, a, cat = narrow_case()
        (safe,) = make_safe(ctx, a, [cat])
        flow = build_rounding_flow(safe, a, ctx.capacities)
        chain_shift(ctx, a, flow)
        assert all(a.y[v] in (F(0), F(1)) for v in safe.vertices())
        assert a.sum_y() == 11
        assert verify_assignment_feasible(
            ctx.graph, ctx.capacities, 11, a, global_delta(a, ctx.graph)
        )


# ---------------------------------------------------------------------------
# rounding flows


class TestRoundingFlow:
    def test_leafless_structure_gives_empty_flow(self):
        g = path_graph(3)
        a = star_assignment(3, (1,), {})
        flow = build_rounding_flow(Caterpillar(1, (1,), (None, None, None)), a, [3, 3, 3])
        assert flow.is_empty()

    def test_two_leaves_single_drain_path(self):
        g = Graph(3, [(0, 1), (0, 2)])
        a = star_assignment(3, (0,), {1: F(3, 10), 2: F(7, 10)})
        cat = Caterpillar(1, (0,), (1, 2, None))
        flow = build_rounding_flow(cat, a, [5, 1, 2])
        assert flow.paths == ((F(3, 10), (1, 0, 2)),)
        assert flow.sources == {1}
        assert flow.sinks == {2}
        a.set_x(0, 0, F(1))
        a.set_x(1, 1, F(3, 10))
        a.set_x(0, 1, F(7, 10))
        a.set_x(2, 2, F(7, 10))
        a.set_x(0, 2, F(3, 10))
        ctx = RoundingContext(g, [5, 1, 2])
        chain_shift(ctx, a, flow)
        assert a.y == [F(1), F(0), F(1)]

    def test_rejects_unsafe_structure(self):
        ctx, a, cat = narrow_case()
        with pytest.raises(ValidationError, match="safe"):
            build_rounding_flow(cat, a, ctx.capacities)

    def test_rejects_fractional_leaf_total(self):
        g = Graph(2, [(0, 1)])
        a = star_assignment(2, (0,), {1: F(1, 2)})
        with pytest.raises(ValidationError, match="integral leaf total"):
            build_rounding_flow(Caterpillar(1, (0,), (None, 1, None)), a, [2, 2])

    def test_assignment_is_not_touched(self):
        ctx, a, cat = narrow_case()
        (safe,) = make_safe(ctx, a, [cat])
        y0 = list(a.y)
        build_rounding_flow(safe, a, ctx.capacities)
        assert a.y == y0


# ---------------------------------------------------------------------------
# the full pipeline on the frozen wide scenario


class TestWidePipeline:
    def test_stage_by_stage(self):
        ctx, a, cat = wide_case()
        parts = separate(ctx, a, cat)
        safe = make_safe(ctx, a, parts)
        assert safe == parts

        right, left = safe
        rflow = build_rounding_flow(right, a, ctx.capacities)
        assert set(rflow.paths) == {
            (F(3, 10), (9, 2, 3, 4, 5, 6, 12)),
            (F(1, 5), (9, 2, 3, 4, 5, 11)),
        }
        chain_shift(ctx, a, rflow)
        lflow = build_rounding_flow(left, a, ctx.capacities)
        assert set(lflow.paths) == {
            (F(1, 5), (1, 0, 8)),
            (F(1, 2), (1, 0, 7)),
        }
        chain_shift(ctx, a, lflow)

        ones = [v for v in range(13) if a.y[v] == 1]
        assert a.y == [
            F(1), F(0), F(1), F(1), F(1), F(1), F(1),
            F(1), F(1), F(0), F(1), F(1), F(1),
        ]
        assert len(ones) == 11
        assert verify_assignment_feasible(
            ctx.graph, ctx.capacities, 11, a, global_delta(a, ctx.graph)
        )


# ---------------------------------------------------------------------------
# round_y


class TestRoundY:
    def test_rejects_soft_mode(self):
        ctx = RoundingContext(path_graph(2), [2, 2], soft=True)
        with pytest.raises(ValidationError, match="hard"):
            round_y(ctx, Assignment(2), 1)

    def test_total_must_match_k(self):
        ctx = RoundingContext(path_graph(2), [2, 2])
        a = Assignment(2)
        a.y[0] = F(1)
        with pytest.raises(ValidationError, match="different total"):
            round_y(ctx, a, 2)

    def test_integral_input_short_circuits(self):
        g = path_graph(3)
        ctx = RoundingContext(g, [3, 3, 3], trace=TraceLog())
        a = Assignment(3)
        a.y[1] = F(1)
        for v in range(3):
            a.set_x(1, v, F(1))
        assert round_y(ctx, a, 1) == 1
        assert a.y == [F(0), F(1), F(0)]
        assert ctx.trace.lines == []

    def test_hub_gadget_rounds_to_two_centers(self):
        g = Graph(6, two_hub_gadget())
        ctx = RoundingContext(g, [4] * 6)
        a = Assignment(6)
        two_hub_witness(a)
        a.y[2] = F(1, 2)
        delta = round_y(ctx, a, 2)
        assert a.y == [F(1), F(0), F(1), F(0), F(0), F(0)]
        assert delta == 2

    def test_wide_instance_end_to_end_with_replay(self):
        ctx, a, _ = wide_case()
        trace = TraceLog()
        ctx = RoundingContext(ctx.graph, ctx.capacities, trace=trace)
        before = a.copy()
        delta = round_y(ctx, a, 11)
        assert all(q in (F(0), F(1)) for q in a.y)
        assert a.sum_y() == 11
        assert delta <= 68
        assert verify_assignment_feasible(ctx.graph, ctx.capacities, 11, a, delta)
        replayed = replay_trace(ctx, before, trace.to_text())
        assert replayed.y == a.y
        assert sorted(replayed.x_items()) == sorted(a.x_items())


# ---------------------------------------------------------------------------
# randomized pipeline soundness


def random_feasible_case(rng, n_lo=6, n_hi=16):
    while True:
        n = rng.randint(n_lo, n_hi)
        g = rand_connected_graph(rng, n)
        caps = [rng.randint(1, 6) for _ in range(n)]
        k = rng.randint(2, max(2, n // 2))
        res = solve_feasibility(build_lp1(g, list(caps), k))
        if res.feasible:
            return g, caps, k, res.assignment


class TestRandomizedPipeline:
    def test_stage_invariants_hold(self):
        rng = random.Random(20260815)
        for _ in range(12):
            g, caps, k, a = random_feasible_case(rng)
            ctx = RoundingContext(g, caps)
            cat = build_caterpillar(ctx, a)
            assert cat.delta == 21
            validate_caterpillar(ctx, a, cat)
            members = set(cat.vertices())
            assert all(
                a.y[v].denominator == 1 for v in range(g.vertex_count) if v not in members
            )
            assert verify_assignment_feasible(g, caps, k, a, 5)

            parts = separate(ctx, a, cat)
            assert verify_assignment_feasible(g, caps, k, a, 68)
            seen = set()
            for c in parts:
                assert separability_witness(c, a, caps) is None
                vs = set(c.vertices())
                assert not vs & seen
                seen |= vs
                for v in vs:
                    assert radius_of(a, g, v) <= 47

            for c in make_safe(ctx, a, parts):
                assert is_safe(c, caps)
                flow = build_rounding_flow(c, a, caps)
                if not flow.is_empty():
                    chain_shift(ctx, a, flow)
                assert all(a.y[v].denominator == 1 for v in c.vertices())

            assert all(q in (F(0), F(1)) for q in a.y)
            assert a.sum_y() == k

    def test_round_y_with_replay(self):
        rng = random.Random(97)
        for _ in range(10):
            g, caps, k, a = random_feasible_case(rng)
            trace = TraceLog()
            ctx = RoundingContext(g, caps, trace=trace)
            before = a.copy()
            delta = round_y(ctx, a, k)
            assert all(q in (F(0), F(1)) for q in a.y)
            assert a.sum_y() == k
            assert 0 <= delta <= 700
            assert verify_assignment_feasible(g, caps, k, a, delta)
            replayed = replay_trace(ctx, before, trace.to_text())
            assert replayed.y == a.y
            assert sorted(replayed.x_items()) == sorted(a.x_items())
