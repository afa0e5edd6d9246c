"""Fumigation recommendations and forward simulation.

The recommendation table maps where the state sits relative to the two sets:
inside the invariant set or the admissible interior, minimal fumigation
suffices; on or near the admissible barrier, only maximal fumigation keeps
the caps; outside the admissible set (or in the desperate regime) no input
can, and the advice is to relax the caps or raise the fumigation ceiling.

The closed-loop simulator follows the table with a proximity band around the
admissible boundary plus hysteresis, so the bang switching cannot chatter at
machine resolution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from ._rk import AdaptiveStepper, Segment, bisect
from .classifier import Case, Classification
from .model import ConstraintCaps, Face, ModelParams, State, constraint_values, in_box, vector_field
from .region import Membership, MembershipStatus, RegionSet, contains

VIOLATION_TOL = 1e-12
DEFAULT_BAND = 0.005  # closed-loop proximity band around the admissible boundary


class Action(Enum):
    USE_MIN = "use_min"
    USE_MAX = "use_max"
    RELAX_CAPS_OR_INCREASE_FUMIGATION = "relax_caps_or_increase_fumigation"


@dataclass(frozen=True)
class PolicyAdvice:
    action: Action
    rationale: str
    in_admissible: Membership
    in_mrpi: Membership

    def to_json_dict(self) -> dict:
        return {
            "action": self.action.value,
            "rationale": self.rationale,
            "in_admissible": self.in_admissible.to_json_dict(),
            "in_mrpi": self.in_mrpi.to_json_dict(),
        }


def recommend(
    x: State,
    admissible: RegionSet,
    mrpi: RegionSet,
    cls: Classification,
    caps: ConstraintCaps,
    eps: float = 1e-9,
) -> PolicyAdvice:
    """Fumigation advice for a state inside the cap box."""
    if not in_box(x, caps, tol=0.0):
        raise ValueError(f"state {x!r} lies outside the cap box")
    m_adm = contains(admissible, x, eps)
    m_mrpi = contains(mrpi, x, eps)

    def advice(action: Action, rationale: str) -> PolicyAdvice:
        return PolicyAdvice(action, rationale, m_adm, m_mrpi)

    if cls.case is Case.DESPERATE:
        return advice(
            Action.RELAX_CAPS_OR_INCREASE_FUMIGATION,
            "desperate: no initial state except the origin can hold the caps",
        )
    if cls.case is Case.COMFORTABLE:
        return advice(Action.USE_MIN, "comfortable: the whole box is robustly invariant")
    if m_adm.status is MembershipStatus.OUTSIDE:
        return advice(
            Action.RELAX_CAPS_OR_INCREASE_FUMIGATION,
            "outside the admissible set: a cap violation is unavoidable",
        )
    if cls.case is Case.COMFORTABLE_VIABLE and m_mrpi.in_region:
        return advice(Action.USE_MIN, "inside the invariant set: any admissible input is safe")
    if m_adm.status is MembershipStatus.ON_BARRIER:
        return advice(Action.USE_MAX, "on the admissible barrier: only maximal fumigation stays safe")
    if m_adm.status is MembershipStatus.ON_CONSTRAINT_BOUNDARY:
        # viable: advised outright; comfortable-viable outside the invariant
        # set: the conservative choice at the caps.
        return advice(Action.USE_MAX, "at the cap boundary of the admissible set")
    return advice(Action.USE_MIN, "interior of the admissible set")


@dataclass
class Trajectory:
    """Forward simulation record: samples of (t, state, input applied from t)."""

    samples: list[tuple[float, State, float]]
    violation: tuple[float, Face] | None = None
    meta: dict = field(default_factory=dict)

    @property
    def final_state(self) -> State:
        return self.samples[-1][1]

    @property
    def final_time(self) -> float:
        return self.samples[-1][0]

    def to_csv(self) -> str:
        lines = ["t,x1,x2,u,violated_face"]
        for t, x, u in self.samples:
            violated = ""
            if self.violation is not None and t >= self.violation[0]:
                violated = self.violation[1].value
            lines.append(f"{t:.17g},{x[0]:.17g},{x[1]:.17g},{u:.17g},{violated}")
        return "\n".join(lines) + "\n"


POLICY = "policy"  # u_source marker for closed-loop simulation

Schedule = list[tuple[float, float]]


class _ClosedLoop:
    """Stateful closed-loop controller with barrier proximity hysteresis."""

    def __init__(
        self,
        p: ModelParams,
        caps: ConstraintCaps,
        admissible: RegionSet,
        mrpi: RegionSet,
        cls: Classification,
        band: float,
    ) -> None:
        self.p = p
        self.caps = caps
        self.admissible = admissible
        self.mrpi = mrpi
        self.cls = cls
        self.band = band
        self.sticky_max = False
        self.relax_applied = False

    def u_for(self, x: State) -> float:
        adv = recommend(x, self.admissible, self.mrpi, self.cls, self.caps, eps=self.band)
        if adv.action is Action.RELAX_CAPS_OR_INCREASE_FUMIGATION:
            # Damage limitation: no admissible input can hold the caps, so
            # apply the strongest one.
            self.relax_applied = True
            return self.p.u_max
        base = self.p.u_min if adv.action is Action.USE_MIN else self.p.u_max
        near_boundary = adv.in_admissible.status in (
            MembershipStatus.ON_BARRIER,
            MembershipStatus.ON_CONSTRAINT_BOUNDARY,
        )
        if adv.action is Action.USE_MAX and near_boundary:
            self.sticky_max = True
        elif self.sticky_max and adv.in_admissible.distance > 2.0 * self.band:
            self.sticky_max = False
        return self.p.u_max if self.sticky_max else base

    def step_cap(self, x: State, u: float) -> float:
        """Largest step that cannot leap from outside the band across the
        admissible boundary in one go."""
        if self.sticky_max:
            return math.inf
        d = contains(self.admissible, x, eps=self.band).distance
        speed = math.hypot(*vector_field(x, u, self.p))
        if speed == 0.0:
            return math.inf
        return max(0.05, (d - 0.5 * self.band) / speed)


def _validate_schedule(schedule: Schedule, p: ModelParams, horizon: float) -> Schedule:
    if not schedule:
        raise ValueError("empty input schedule")
    if schedule[0][0] != 0.0:
        raise ValueError("schedule must start at t = 0")
    prev = -math.inf
    for t, u in schedule:
        if t <= prev:
            raise ValueError("schedule times must be strictly increasing")
        prev = t
        if not (p.u_min <= u <= p.u_max):
            raise ValueError(f"schedule value {u!r} outside [u_min, u_max]")
    return schedule


def simulate(
    p: ModelParams,
    caps: ConstraintCaps,
    x0: State,
    u_source: float | Schedule | str,
    horizon: float,
    max_step: float = 1.0,
    *,
    checkpoint: float = 1.0,
    t0: float = 0.0,
    atol: float = 1e-10,
    rtol: float = 1e-10,
    h0: float = 1e-3,
    regions: tuple[RegionSet, RegionSet] | None = None,
    classification: Classification | None = None,
    band: float = DEFAULT_BAND,
) -> Trajectory:
    """Integrate the dynamics forward and record the trajectory.

    u_source is a constant, a piecewise-constant schedule [(t_start, u), ...],
    or the POLICY marker for closed-loop control (which needs `regions` and
    `classification`).  Integration restarts at every `checkpoint` boundary,
    so chaining calls over consecutive windows reproduces a single long call
    exactly.  The first cap violation, if any, is recorded and integration
    continues to the horizon.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if not in_box(x0, caps, tol=0.0):
        raise ValueError(f"initial state {x0!r} lies outside the cap box")

    loop: _ClosedLoop | None = None
    schedule: Schedule
    if u_source == POLICY:
        if regions is None or classification is None:
            raise ValueError("closed-loop simulation needs regions and classification")
        loop = _ClosedLoop(p, caps, regions[0], regions[1], classification, band)
        schedule = []
    elif isinstance(u_source, (int, float)):
        u0 = float(u_source)
        if not (p.u_min <= u0 <= p.u_max):
            raise ValueError(f"constant input {u0!r} outside [u_min, u_max]")
        schedule = [(0.0, u0)]
    else:
        schedule = _validate_schedule(list(u_source), p, horizon)

    def scheduled_u(t: float) -> float:
        u = schedule[0][1]
        for ts, uv in schedule:
            if ts <= t + 1e-15:
                u = uv
            else:
                break
        return u

    t_end = t0 + horizon
    t = t0
    x = (float(x0[0]), float(x0[1]))
    u_cur = loop.u_for(x) if loop else scheduled_u(t - t0)
    samples: list[tuple[float, State, float]] = [(t, x, u_cur)]
    violation: tuple[float, Face] | None = None

    def next_boundary(tq: float) -> float:
        k = math.floor((tq - t0) / checkpoint + 1e-12) + 1
        b = t0 + k * checkpoint
        for ts, _ in schedule:
            tb = t0 + ts
            if tq + 1e-15 < tb < b:
                b = tb
        return min(b, t_end)

    def check_violation(seg: Segment) -> None:
        nonlocal violation
        if violation is not None:
            return
        g_end = constraint_values((seg.y1[0], seg.y1[1]), caps)
        worst: tuple[float, Face] | None = None
        for idx, face in enumerate(Face):
            if g_end[idx] > VIOLATION_TOL:
                t_cross = bisect(
                    lambda tt, i=idx: constraint_values(
                        (seg.interpolate(tt)[0], seg.interpolate(tt)[1]), caps
                    )[i],
                    seg.t0,
                    seg.t1,
                    1e-10,
                )
                if worst is None or t_cross < worst[0]:
                    worst = (t_cross, face)
        if worst is not None:
            violation = worst

    while t < t_end - 1e-12:
        seg_end = next_boundary(t)
        h_cap = max_step
        if loop is not None:
            h_cap = min(h_cap, loop.step_cap(x, u_cur))

        def rhs(_t: float, y: tuple[float, ...]) -> tuple[float, ...]:
            return vector_field((y[0], y[1]), u_cur, p)

        stepper = AdaptiveStepper(rhs, t, x, atol=atol, rtol=rtol, h0=h0, h_max=h_cap)
        while stepper.t < seg_end:
            seg = stepper.step(seg_end)
            check_violation(seg)
            t = stepper.t
            x = (stepper.y[0], stepper.y[1])
            if loop is not None:
                u_next = loop.u_for(x)
                samples.append((t, x, u_next if t < t_end else u_cur))
                if u_next != u_cur and t < t_end:
                    u_cur = u_next
                    break  # restart the stepper with the new bang
                stepper.h_max = min(max_step, loop.step_cap(x, u_cur))
            else:
                samples.append((t, x, u_cur))
        if t >= seg_end - 1e-15 and loop is None:
            u_cur = scheduled_u(t - t0)
            if samples and samples[-1][0] == t:
                samples[-1] = (t, x, u_cur)

    meta = {}
    if loop is not None and loop.relax_applied:
        meta["relax_caps_applied"] = True
    return Trajectory(samples, violation, meta)
