"""Region assembly: closed polygons for the admissible and invariant sets.

A nontrivial region is bounded by its barrier polyline plus a walk along the
box boundary chosen so the disease-free origin stays enclosed.  Membership
queries use ray casting with a boundary band and label boundary hits by
whether the nearest segment belongs to the barrier proper or to a box face.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._geometry import PolygonGeometry, shoelace_area
from .barrier import BarrierCurve, TerminationKind, compute_barrier
from .classifier import Case, Classification, classify
from .model import ConstraintCaps, ModelParams, State
from .tangency import SetKind

BARRIER_RESAMPLE = 1e-3  # max polyline segment length, in state space


class MembershipStatus(Enum):
    INSIDE = "inside"
    ON_BARRIER = "on_barrier"
    ON_CONSTRAINT_BOUNDARY = "on_constraint_boundary"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class Membership:
    status: MembershipStatus
    distance: float  # unsigned distance to the region boundary

    @property
    def in_region(self) -> bool:
        return self.status is not MembershipStatus.OUTSIDE

    def to_json_dict(self) -> dict:
        return {"status": self.status.value, "distance": self.distance}


@dataclass
class RegionSet:
    """A closed region of the cap box, stored as a counterclockwise polygon.

    closure records how the outline was completed: "box" (whole box),
    "degenerate" (the origin point), "face" (barrier reached a box face) or
    "radial_stall" (barrier stalled at an equilibrium and was joined to the
    nearest box-boundary point by a straight segment).
    """

    kind: SetKind
    case: Case
    vertices: list[State]
    barrier_range: tuple[int, int] | None
    area: float
    closure: str

    _geometry: PolygonGeometry | None = None

    @property
    def degenerate(self) -> bool:
        return len(self.vertices) < 3

    def geometry(self) -> PolygonGeometry:
        if self._geometry is None:
            self._geometry = PolygonGeometry(np.asarray(self.vertices))
        return self._geometry

    def barrier_segment_indices(self) -> range:
        if self.barrier_range is None:
            return range(0)
        i, j = self.barrier_range
        return range(i, j)  # segment k joins vertex k to k+1

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "case": self.case.value,
            "vertices": [[v[0], v[1]] for v in self.vertices],
            "barrier_range": list(self.barrier_range) if self.barrier_range else None,
            "area": self.area,
            "closure": self.closure,
        }

    def to_csv(self) -> str:
        lines = ["x1,x2,on_barrier"]
        barrier = set()
        if self.barrier_range is not None:
            barrier = set(range(self.barrier_range[0], self.barrier_range[1] + 1))
        for i, v in enumerate(self.vertices):
            flag = 1 if i in barrier else 0
            lines.append(f"{v[0]:.17g},{v[1]:.17g},{flag}")
        return "\n".join(lines) + "\n"


def _box_polygon(caps: ConstraintCaps) -> list[State]:
    return [(0.0, 0.0), (caps.xbar1, 0.0), (caps.xbar1, caps.xbar2), (0.0, caps.xbar2)]


def _clamp(pt: State, caps: ConstraintCaps) -> State:
    return (
        min(max(pt[0], 0.0), caps.xbar1),
        min(max(pt[1], 0.0), caps.xbar2),
    )


def _perimeter_pos(pt: State, caps: ConstraintCaps, tol: float = 1e-9) -> float:
    """Arc-length position of a box-boundary point, counterclockwise from (0,0)."""
    x, y = pt
    w, h = caps.xbar1, caps.xbar2
    if abs(y) <= tol:
        return x
    if abs(x - w) <= tol:
        return w + y
    if abs(y - h) <= tol:
        return w + h + (w - x)
    if abs(x) <= tol:
        return 2 * w + h + (h - y)
    raise ValueError(f"point {pt!r} does not lie on the box boundary")


def _walk_box(start: State, end: State, caps: ConstraintCaps) -> list[State]:
    """Corners visited walking the box boundary from start to end through the
    origin corner (exclusive of both endpoints)."""
    w, h = caps.xbar1, caps.xbar2
    length = 2 * (w + h)
    corners = [(0.0, 0.0), (w, 0.0), (w, h), (0.0, h)]
    positions = [0.0, w, w + h, 2 * w + h]
    ps = _perimeter_pos(start, caps)
    pe = _perimeter_pos(end, caps)
    out: list[State] = []
    if pe < ps:
        # counterclockwise from start wraps through position 0; the origin
        # corner (position 0) always lands in the second sweep since pe > 0
        order = sorted(range(4), key=lambda i: positions[i])
        for i in order:
            if positions[i] > ps + 1e-12:
                out.append(corners[i])
        for i in order:
            if positions[i] < pe - 1e-12:
                out.append(corners[i])
    else:
        # clockwise from start wraps through position 0
        order = sorted(range(4), key=lambda i: -positions[i])
        for i in order:
            if positions[i] < ps - 1e-12:
                out.append(corners[i])
        for i in order:
            if positions[i] > pe + 1e-12:
                out.append(corners[i])
    # De-duplicate a corner picked up twice (start/end sitting on a corner).
    deduped: list[State] = []
    for v in out:
        if not deduped or _dist(deduped[-1], v) > 0.0:
            deduped.append(v)
    return deduped


def _dist(a: State, b: State) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def _region_from_curve(
    kind: SetKind, case: Case, curve: BarrierCurve, caps: ConstraintCaps
) -> RegionSet:
    pts = curve.resampled_states(BARRIER_RESAMPLE)
    # Ordered far terminal -> tangent point, clamped into the closed box.
    chain = [_clamp(q, caps) for q in reversed(pts)]
    closure = "face"
    prefix = 0
    if curve.termination.kind is TerminationKind.VELOCITY_STALL:
        stall = chain[0]
        proj = _nearest_boundary_point(stall, caps)
        chain.insert(0, proj)
        prefix = 1  # the radial joining segment is not part of the barrier
        closure = "radial_stall"
    tangent_pt = chain[-1]
    terminal_pt = chain[0]
    walk = _walk_box(tangent_pt, terminal_pt, caps)

    # Collapse adjacent duplicates (clamping can merge points near corners,
    # and a terminal point can sit exactly on one) while tracking where the
    # barrier part of the outline lands.
    cleaned: list[State] = []
    barrier_lo = barrier_hi = None

    def push(v: State, on_barrier: bool) -> None:
        nonlocal barrier_lo, barrier_hi
        if not cleaned or _dist(cleaned[-1], v) > 0.0:
            cleaned.append(v)
        if on_barrier:
            idx = len(cleaned) - 1
            if barrier_lo is None:
                barrier_lo = idx
            barrier_hi = idx

    for i, v in enumerate(chain):
        push(v, i >= prefix)
    for v in walk:
        push(v, False)
    assert barrier_lo is not None and barrier_hi is not None
    if (
        len(cleaned) > 1
        and _dist(cleaned[0], cleaned[-1]) == 0.0
        and len(cleaned) - 1 > barrier_hi
    ):
        cleaned.pop()

    signed = shoelace_area(np.asarray(cleaned))
    if signed < 0.0:
        n = len(cleaned)
        cleaned = cleaned[::-1]
        barrier_lo, barrier_hi = n - 1 - barrier_hi, n - 1 - barrier_lo
        signed = -signed
    origin_inside = PolygonGeometry(np.asarray(cleaned)).contains((1e-9, 1e-9))
    assert origin_inside, "region closure failed to enclose the origin"
    return RegionSet(kind, case, cleaned, (barrier_lo, barrier_hi), signed, closure)


def _nearest_boundary_point(pt: State, caps: ConstraintCaps) -> State:
    x, y = pt
    w, h = caps.xbar1, caps.xbar2
    candidates = [
        ((x, 0.0), y),
        ((x, h), h - y),
        ((0.0, y), x),
        ((w, y), w - x),
    ]
    best = min(candidates, key=lambda c: c[1])
    return best[0]


def build_regions(
    p: ModelParams,
    caps: ConstraintCaps,
    cls: Classification,
    curves: dict[SetKind, BarrierCurve | None] | None = None,
) -> tuple[RegionSet, RegionSet]:
    """(admissible, invariant) regions for a classification and its barriers.

    Comfortable: both equal the box.  Desperate: both degenerate to the
    origin.  Viable: the admissible region comes from its barrier, the
    invariant one degenerates.  Comfortable-viable: both come from barriers.
    The curves supplied must match what the classification requires.
    """
    curves = curves or {}
    needed: dict[SetKind, bool] = {
        SetKind.ADMISSIBLE: cls.case in (Case.VIABLE, Case.COMFORTABLE_VIABLE),
        SetKind.MRPI: cls.case is Case.COMFORTABLE_VIABLE,
    }
    for kind, need in needed.items():
        have = curves.get(kind) is not None
        if need and not have:
            raise ValueError(f"{cls.case.value} requires a {kind.value} barrier curve")
        if have and not need:
            raise ValueError(f"{cls.case.value} admits no {kind.value} barrier curve")
        if have:
            curve = curves[kind]
            assert curve is not None
            if curve.set_kind is not kind:
                raise ValueError("curve kind does not match its slot")
            if cls.active_face is not None and curve.tangent.face is not cls.active_face:
                raise ValueError("curve tangency face does not match the classification")

    box = _box_polygon(caps)
    degenerate = [(0.0, 0.0)]
    if cls.case is Case.COMFORTABLE:
        a = caps.xbar1 * caps.xbar2
        return (
            RegionSet(SetKind.ADMISSIBLE, cls.case, list(box), None, a, "box"),
            RegionSet(SetKind.MRPI, cls.case, list(box), None, a, "box"),
        )
    if cls.case is Case.DESPERATE:
        return (
            RegionSet(SetKind.ADMISSIBLE, cls.case, list(degenerate), None, 0.0, "degenerate"),
            RegionSet(SetKind.MRPI, cls.case, list(degenerate), None, 0.0, "degenerate"),
        )
    adm_curve = curves[SetKind.ADMISSIBLE]
    assert adm_curve is not None
    admissible = _region_from_curve(SetKind.ADMISSIBLE, cls.case, adm_curve, caps)
    if cls.case is Case.VIABLE:
        mrpi = RegionSet(SetKind.MRPI, cls.case, list(degenerate), None, 0.0, "degenerate")
    else:
        mrpi_curve = curves[SetKind.MRPI]
        assert mrpi_curve is not None
        mrpi = _region_from_curve(SetKind.MRPI, cls.case, mrpi_curve, caps)
    return admissible, mrpi


def contains(region: RegionSet, point: State, eps: float = 1e-9) -> Membership:
    """Membership with a boundary band of width eps."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if region.degenerate:
        d = math.hypot(point[0], point[1])
        if d <= eps:
            return Membership(MembershipStatus.INSIDE, d)
        return Membership(MembershipStatus.OUTSIDE, d)
    geo = region.geometry()
    d, seg, inside = geo.query(point)
    if d <= eps:
        status = (
            MembershipStatus.ON_BARRIER
            if seg in region.barrier_segment_indices()
            else MembershipStatus.ON_CONSTRAINT_BOUNDARY
        )
        return Membership(status, d)
    return Membership(MembershipStatus.INSIDE if inside else MembershipStatus.OUTSIDE, d)


def area(region: RegionSet) -> float:
    return region.area


def efficiency_ratio(mrpi: RegionSet, admissible: RegionSet) -> float | None:
    """Area(invariant) / Area(admissible); None when both sets are trivial
    (the desperate regime, where the ratio is undefined)."""
    if admissible.kind is not SetKind.ADMISSIBLE or mrpi.kind is not SetKind.MRPI:
        raise ValueError("pass (mrpi, admissible) regions in that order")
    if admissible.case is not mrpi.case:
        raise ValueError("regions come from different classifications")
    if admissible.degenerate:
        return None
    if mrpi.degenerate:
        return 0.0
    return mrpi.area / admissible.area


def compute_regions(
    p: ModelParams, caps: ConstraintCaps
) -> tuple[Classification, dict[SetKind, BarrierCurve | None], RegionSet, RegionSet]:
    """Full pipeline: classify, trace the needed barriers, assemble regions."""
    cls = classify(p, caps)
    curves: dict[SetKind, BarrierCurve | None] = {}
    if cls.case in (Case.VIABLE, Case.COMFORTABLE_VIABLE):
        curves[SetKind.ADMISSIBLE] = compute_barrier(p, caps, SetKind.ADMISSIBLE)
    if cls.case is Case.COMFORTABLE_VIABLE:
        curves[SetKind.MRPI] = compute_barrier(p, caps, SetKind.MRPI)
    admissible, mrpi = build_regions(p, caps, cls, curves)
    return cls, curves, admissible, mrpi
