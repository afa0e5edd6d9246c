import numpy as np
import pytest
from shapely.geometry import Polygon

from epibarrier import (
    Case,
    ConstraintCaps,
    MembershipStatus,
    SetKind,
    area,
    build_regions,
    compute_regions,
    contains,
    efficiency_ratio,
)
from epibarrier._geometry import shoelace_area
from epibarrier.barrier import BarrierCurve, Termination, TerminationKind
from epibarrier.region import _walk_box

# Frozen after the first verified run; cross-checked against the grid-count
# ratio (within 0.1%) in test_oracle.py.
CV_EFFICIENCY_RATIO = 0.8427846297327682


class TestBuildRegions:
    def test_comfortable_is_exactly_the_box(self, pipelines):
        entry = pipelines["comfortable"]
        for region in (entry["adm"], entry["mrpi"]):
            assert region.vertices == [(0.0, 0.0), (0.7, 0.0), (0.7, 0.7), (0.0, 0.7)]
            assert region.area == pytest.approx(0.49)
            assert region.barrier_range is None
            assert region.closure == "box"

    def test_desperate_degenerates_to_origin(self, pipelines):
        entry = pipelines["desperate"]
        for region in (entry["adm"], entry["mrpi"]):
            assert region.vertices == [(0.0, 0.0)]
            assert region.area == 0.0
            assert region.degenerate

    def test_viable_admissible_strictly_inside(self, pipelines):
        adm = pipelines["viable"]["adm"]
        assert adm.area < 0.03
        assert 0.0 < adm.area < 0.15 * 0.2
        assert pipelines["viable"]["mrpi"].degenerate

    def test_polygons_simple_ccw_and_boxed(self, pipelines):
        for entry in pipelines.values():
            caps = entry["caps"]
            for region in (entry["adm"], entry["mrpi"]):
                if region.degenerate:
                    continue
                v = np.asarray(region.vertices)
                assert shoelace_area(v) > 0.0  # counterclockwise
                assert v[:, 0].min() >= 0.0 and v[:, 1].min() >= 0.0
                assert v[:, 0].max() <= caps.xbar1 and v[:, 1].max() <= caps.xbar2
                assert Polygon(region.vertices).is_valid  # simple, no crossings

    def test_area_matches_shoelace(self, pipelines):
        for entry in pipelines.values():
            for region in (entry["adm"], entry["mrpi"]):
                if region.degenerate:
                    continue
                assert region.area == pytest.approx(
                    abs(shoelace_area(np.asarray(region.vertices))), abs=1e-15
                )

    def test_mrpi_inside_admissible(self, pipelines):
        entry = pipelines["comfortable_viable"]
        adm = entry["adm"]
        for v in entry["mrpi"].vertices:
            m = contains(adm, v, eps=1e-9)
            assert m.status is not MembershipStatus.OUTSIDE or m.distance <= 1e-9

    def test_mismatched_curves_rejected(self, pipelines, cali):
        viable = pipelines["viable"]
        cv = pipelines["comfortable_viable"]
        with pytest.raises(ValueError, match="requires"):
            build_regions(cali, viable["caps"], viable["cls"], {})
        with pytest.raises(ValueError, match="admits no"):
            build_regions(
                cali, pipelines["comfortable"]["caps"], pipelines["comfortable"]["cls"],
                {SetKind.ADMISSIBLE: viable["curves"][SetKind.ADMISSIBLE]},
            )
        with pytest.raises(ValueError):
            build_regions(
                cali, cv["caps"], cv["cls"],
                {
                    SetKind.ADMISSIBLE: cv["curves"][SetKind.MRPI],
                    SetKind.MRPI: cv["curves"][SetKind.MRPI],
                },
            )

    def test_barrier_range_marks_curve_part(self, pipelines):
        adm = pipelines["viable"]["adm"]
        lo, hi = adm.barrier_range
        # barrier vertices sit strictly between the box walls except at the
        # two face attachment points
        inner = adm.vertices[lo + 1 : hi]
        caps = pipelines["viable"]["caps"]
        for v in inner:
            assert 0.0 < v[0] < caps.xbar1
            assert 0.0 < v[1] < caps.xbar2


class TestRadialStallClosure:
    def test_synthetic_stalled_curve(self, pipelines, cali):
        # a curve that stops mid-interior gets joined to the nearest wall
        viable = pipelines["viable"]
        real = viable["curves"][SetKind.ADMISSIBLE]
        cut = len(real.samples) // 2
        stalled = BarrierCurve(
            real.set_kind,
            real.tangent,
            list(real.samples[:cut]),
            Termination(
                TerminationKind.VELOCITY_STALL, None, real.samples[cut - 1].state
            ),
            [],
            list(real.dense[: cut - 1]),
        )
        adm, _ = build_regions(cali, viable["caps"], viable["cls"],
                               {SetKind.ADMISSIBLE: stalled})
        assert adm.closure == "radial_stall"
        assert shoelace_area(np.asarray(adm.vertices)) > 0
        # the radial joining segment is not labeled as barrier
        lo, hi = adm.barrier_range
        assert hi - lo + 1 < len(adm.vertices)


class TestContains:
    def test_origin_in_any_nontrivial_region(self, pipelines):
        for name in ("comfortable", "comfortable_viable", "viable"):
            adm = pipelines[name]["adm"]
            m = contains(adm, (0.0, 0.0))
            assert m.status is not MembershipStatus.OUTSIDE

    def test_viable_corner_outside(self, pipelines):
        adm = pipelines["viable"]["adm"]
        m = contains(adm, (0.15, 0.2))
        assert m.status is MembershipStatus.OUTSIDE
        assert m.distance > 0.01

    def test_tangent_point_on_boundary(self, pipelines):
        adm = pipelines["viable"]["adm"]
        tp = pipelines["viable"]["curves"][SetKind.ADMISSIBLE].tangent.point
        m = contains(adm, tp)
        assert m.status in (
            MembershipStatus.ON_BARRIER,
            MembershipStatus.ON_CONSTRAINT_BOUNDARY,
        )
        assert m.distance <= 1e-9

    def test_barrier_midpoint_label(self, pipelines):
        adm = pipelines["viable"]["adm"]
        lo, hi = adm.barrier_range
        mid = adm.vertices[(lo + hi) // 2]
        m = contains(adm, mid)
        assert m.status is MembershipStatus.ON_BARRIER

    def test_box_wall_label(self, pipelines):
        adm = pipelines["viable"]["adm"]
        m = contains(adm, (0.075, 0.0))
        assert m.status is MembershipStatus.ON_CONSTRAINT_BOUNDARY

    def test_degenerate_region(self, pipelines):
        adm = pipelines["desperate"]["adm"]
        assert contains(adm, (0.0, 0.0)).status is MembershipStatus.INSIDE
        assert contains(adm, (1e-12, 0.0)).status is MembershipStatus.INSIDE
        assert contains(adm, (0.01, 0.01)).status is MembershipStatus.OUTSIDE

    def test_eps_validation(self, pipelines):
        with pytest.raises(ValueError):
            contains(pipelines["viable"]["adm"], (0.1, 0.1), eps=0.0)

    def test_distance_is_euclidean(self, pipelines):
        adm = pipelines["comfortable"]["adm"]
        m = contains(adm, (0.35, 0.6))
        assert m.status is MembershipStatus.INSIDE
        assert m.distance == pytest.approx(0.1)


class TestEfficiencyRatio:
    def test_comfortable_is_one(self, pipelines):
        e = pipelines["comfortable"]
        assert efficiency_ratio(e["mrpi"], e["adm"]) == 1.0

    def test_viable_is_zero(self, pipelines):
        e = pipelines["viable"]
        assert efficiency_ratio(e["mrpi"], e["adm"]) == 0.0

    def test_desperate_undefined(self, pipelines):
        e = pipelines["desperate"]
        assert efficiency_ratio(e["mrpi"], e["adm"]) is None

    def test_cv_regression_value(self, pipelines):
        e = pipelines["comfortable_viable"]
        r = efficiency_ratio(e["mrpi"], e["adm"])
        assert 0.0 < r < 1.0
        assert r == pytest.approx(CV_EFFICIENCY_RATIO, abs=1e-9)

    def test_argument_order_enforced(self, pipelines):
        e = pipelines["comfortable_viable"]
        with pytest.raises(ValueError):
            efficiency_ratio(e["adm"], e["mrpi"])

    def test_area_accessor(self, pipelines):
        e = pipelines["comfortable"]
        assert area(e["adm"]) == e["adm"].area


class TestBoxWalk:
    def test_walk_through_origin_both_directions(self):
        caps = ConstraintCaps(0.7, 0.2)
        # top face to bottom face, counterclockwise through (0,0)
        walk = _walk_box((0.346, 0.2), (0.597, 0.0), caps)
        assert walk == [(0.0, 0.2), (0.0, 0.0)]
        # right face to top face, clockwise through (0,0)
        caps2 = ConstraintCaps(0.15, 0.2)
        walk2 = _walk_box((0.15, 0.115), (0.113, 0.2), caps2)
        assert walk2 == [(0.15, 0.0), (0.0, 0.0), (0.0, 0.2)]


class TestExports:
    def test_json_keys(self, pipelines):
        d = pipelines["viable"]["adm"].to_json_dict()
        assert set(d) == {"kind", "case", "vertices", "barrier_range", "area", "closure"}
        assert d["kind"] == "admissible"
        assert d["case"] == "viable"

    def test_csv_flags(self, pipelines):
        adm = pipelines["viable"]["adm"]
        lines = adm.to_csv().splitlines()
        assert lines[0] == "x1,x2,on_barrier"
        flags = [int(ln.split(",")[2]) for ln in lines[1:]]
        lo, hi = adm.barrier_range
        assert sum(flags) == hi - lo + 1

    def test_pipeline_convenience(self, cali, caps_viable):
        cls, curves, adm, mrpi = compute_regions(cali, caps_viable)
        assert cls.case is Case.VIABLE
        assert curves[SetKind.ADMISSIBLE] is not None
        assert adm.kind is SetKind.ADMISSIBLE


def test_comfortable_area_is_exactly_the_box_product(pipelines):
    adm = pipelines["comfortable"]["adm"]
    assert adm.area == 0.7 * 0.7


def test_viable_corner_escapes_under_max_input(pipelines, cali):
    # the top-right corner is outside the admissible set; the brute-force
    # route confirms it crosses the mosquito cap under the maximal input
    import numpy as np

    from epibarrier.oracle import survival

    caps = pipelines["viable"]["caps"]
    t_bad, _, face = survival(
        cali, caps, np.array([[0.15, 0.2]]), cali.u_max, 3000.0, freeze=False
    )
    assert t_bad[0] > 0
    assert face[0] == 0  # the x1 cap face
