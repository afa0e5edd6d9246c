"""Backward tracing of candidate barrier curves from tangency points.

A barrier curve is an integral curve of the state/adjoint system run backward
from a tangent point under the bang input selected by the costate sign.  The
costate is renormalized to unit length after every accepted step (the adjoint
equation is linear, so scaling is free and prevents overflow over long
horizons); sign switches of the first costate component are located by
bisection and the trace restarts there with the other bang value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from ._rk import AdaptiveStepper, Segment, bisect
from .classifier import Case, classify
from .model import (
    ConstraintCaps,
    Costate,
    Face,
    ModelParams,
    State,
    adjoint_rhs,
    constraint_values,
    lie_derivative,
    vector_field,
)
from .tangency import SetKind, TangentPoint, entry_condition, tangent_point_g1, tangent_point_g3

S_MAX_DEFAULT = 10_000.0  # days; exceeding it signals a bug, not a result
STALL_SPEED = 1e-9
SWITCH_LOCATE_TOL = 1e-12
EXIT_LOCATE_TOL = 1e-10
ARM_TOL = 1e-9  # a face can only fire exit once the curve has been this deep inside


def switching_input(lam: Costate, kind: SetKind, p: ModelParams) -> float:
    """Bang input for costate lam: the Hamiltonian extremizer over the bounds.

    Admissible: u_max when lambda1 >= 0, else u_min.  MRPI: the opposite.
    """
    l1, l2 = lam
    if l1 == 0.0 and l2 == 0.0:
        raise ValueError("zero costate has no switching value")
    if kind is SetKind.ADMISSIBLE:
        return p.u_max if l1 >= 0.0 else p.u_min
    return p.u_min if l1 >= 0.0 else p.u_max


class TerminationKind(Enum):
    HIT_FACE = "hit_face"
    VELOCITY_STALL = "velocity_stall"
    HORIZON_EXCEEDED = "horizon_exceeded"


@dataclass(frozen=True)
class Termination:
    kind: TerminationKind
    face: Face | None = None
    point: State | None = None

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "face": self.face.value if self.face else None,
            "point": list(self.point) if self.point else None,
        }


@dataclass(frozen=True)
class BarrierSample:
    s: float  # backward time from the tangency instant
    state: State
    costate: Costate  # unit length
    u: float  # bang value applied from this sample backward


@dataclass
class BarrierCurve:
    set_kind: SetKind
    tangent: TangentPoint
    samples: list[BarrierSample]
    termination: Termination
    switches: list[float]
    dense: list[tuple[Segment, float]] = field(default_factory=list, repr=False)

    @property
    def span(self) -> float:
        return self.samples[-1].s

    def to_json_dict(self) -> dict:
        return {
            "set_kind": self.set_kind.value,
            "tangent": self.tangent.to_json_dict(),
            "samples": [
                {
                    "s": smp.s,
                    "x1": smp.state[0],
                    "x2": smp.state[1],
                    "lambda1": smp.costate[0],
                    "lambda2": smp.costate[1],
                    "u": smp.u,
                }
                for smp in self.samples
            ],
            "termination": self.termination.to_json_dict(),
            "switches": list(self.switches),
        }

    def to_csv(self) -> str:
        lines = ["s,x1,x2,lambda1,lambda2,u"]
        for smp in self.samples:
            lines.append(
                ",".join(
                    format(v, ".17g")
                    for v in (smp.s, *smp.state, *smp.costate, smp.u)
                )
            )
        return "\n".join(lines) + "\n"

    def resampled_states(self, max_seg: float = 1e-3) -> list[State]:
        """State polyline from the tangent point backward, with consecutive
        points no farther apart than max_seg, evaluated on dense output."""
        pts: list[State] = [self.samples[0].state]
        for seg, s_hi in self.dense:
            a = seg.interpolate(seg.t0)
            b = seg.interpolate(s_hi)
            chord = math.hypot(b[0] - a[0], b[1] - a[1])
            n = max(1, math.ceil(chord / (0.9 * max_seg)))
            while True:
                cand = [
                    seg.interpolate(seg.t0 + (s_hi - seg.t0) * i / n)[:2]
                    for i in range(1, n + 1)
                ]
                prev = pts[-1]
                ok = True
                for q in cand:
                    if math.hypot(q[0] - prev[0], q[1] - prev[1]) > max_seg:
                        ok = False
                        break
                    prev = q
                if ok:
                    break
                n *= 2
            pts.extend(cand)
        return pts


class BarrierHorizonError(RuntimeError):
    """Backward integration ran past the horizon without terminating."""

    def __init__(self, partial: BarrierCurve):
        super().__init__(
            f"barrier trace exceeded the backward horizon at s={partial.span!r}"
        )
        self.partial = partial


def _candidate_tangent(p: ModelParams, caps: ConstraintCaps, kind: SetKind) -> TangentPoint | None:
    """First tangent point (g1 before g3) whose entry condition holds."""
    for tp in (tangent_point_g1(p, caps, kind), tangent_point_g3(p, caps, kind)):
        if tp is None:
            continue
        holds, _ = entry_condition(p, caps, kind, tp.face)
        if holds:
            return tp
    return None


def compute_barrier(
    p: ModelParams,
    caps: ConstraintCaps,
    kind: SetKind,
    *,
    s_max: float = S_MAX_DEFAULT,
    atol: float = 1e-10,
    rtol: float = 1e-10,
    h0: float = 1e-3,
    h_max: float = 1.0,
) -> BarrierCurve | None:
    """Trace the barrier curve of the requested set, if one exists.

    Returns None when the candidate is rejected (no tangency, or the curve
    would leave the box immediately, i.e. the entry condition fails).  Raises
    ValueError in the comfortable and desperate regimes, where no set of
    either kind carries a barrier, and BarrierHorizonError when integration
    does not terminate within s_max.
    """
    cls = classify(p, caps)
    if cls.case in (Case.COMFORTABLE, Case.DESPERATE):
        raise ValueError(f"no barrier curves exist in the {cls.case.value} regime")

    tp = _candidate_tangent(p, caps, kind)
    if tp is None:
        return None

    branch_nonneg = True  # lambda1 >= 0 at and just before the tangency
    u = p.u_max if kind is SetKind.ADMISSIBLE else p.u_min

    def make_rhs(u_bang: float):
        def rhs(_s: float, y: tuple[float, ...]) -> tuple[float, ...]:
            x = (y[0], y[1])
            lam = (y[2], y[3])
            fx = vector_field(x, u_bang, p)
            fl = adjoint_rhs(x, lam, u_bang, p)
            return (-fx[0], -fx[1], -fl[0], -fl[1])

        return rhs

    y0 = (*tp.point, *tp.terminal_costate)
    stepper = AdaptiveStepper(make_rhs(u), 0.0, y0, atol=atol, rtol=rtol, h0=h0, h_max=h_max)

    samples = [BarrierSample(0.0, tp.point, tp.terminal_costate, u)]
    dense: list[tuple[Segment, float]] = []
    switches: list[float] = []
    armed = [v < -ARM_TOL for v in constraint_values(tp.point, caps)]
    first_step_done = False

    def state_at(seg: Segment, s: float) -> State:
        v = seg.interpolate(s)
        return (v[0], v[1])

    def record(s: float, y: tuple[float, ...], u_next: float) -> Costate:
        l1, l2 = y[2], y[3]
        n = math.hypot(l1, l2)
        if n == 0.0:
            raise ArithmeticError("costate vanished along the barrier trace")
        lam = (l1 / n, l2 / n)
        # a silent escape (face never armed) would surface here
        assert max(constraint_values((y[0], y[1]), caps)) <= 1e-8
        samples.append(BarrierSample(s, (y[0], y[1]), lam, u_next))
        return lam

    def build(termination: Termination) -> BarrierCurve:
        return BarrierCurve(kind, tp, samples, termination, switches, dense)

    while True:
        seg = stepper.step(s_max)
        s_end, y_end = seg.t1, seg.y1

        # Candidate events inside this step, each with its bisected time.
        events: list[tuple[float, str, Face | None]] = []
        l1_end = y_end[2]
        if (l1_end < 0.0) if branch_nonneg else (l1_end > 0.0):
            s_sw = bisect(
                lambda s: seg.interpolate(s)[2], seg.t0, s_end, SWITCH_LOCATE_TOL
            )
            events.append((s_sw, "switch", None))
        exit_candidates: list[tuple[float, Face]] = []
        g_end = constraint_values((y_end[0], y_end[1]), caps)
        for idx, face in enumerate(Face):
            if armed[idx] and g_end[idx] > 0.0:
                s_x = bisect(
                    lambda s, i=idx: constraint_values(state_at(seg, s), caps)[i],
                    seg.t0,
                    s_end,
                    EXIT_LOCATE_TOL,
                )
                exit_candidates.append((s_x, face))
        if exit_candidates:
            s_first = min(s for s, _ in exit_candidates)
            tied = [
                (s, f)
                for s, f in exit_candidates
                if s - s_first <= SWITCH_LOCATE_TOL
            ]
            if len(tied) > 1:
                # deeper violation at the step end wins; ties take the lower index
                tied.sort(
                    key=lambda sf: (-g_end[list(Face).index(sf[1])],
                                    list(Face).index(sf[1]))
                )
            events.append((tied[0][0], "exit", tied[0][1]))

        if events:
            events.sort(key=lambda e: (e[0], e[1] != "exit"))
            s_ev, kind_ev, face_ev = events[0]
            y_ev = seg.interpolate(s_ev)
            dense.append((seg, s_ev))
            if kind_ev == "exit":
                record(s_ev, y_ev, u)
                return build(
                    Termination(TerminationKind.HIT_FACE, face_ev, (y_ev[0], y_ev[1]))
                )
            # Bang switch: flip the branch and restart with the other extreme.
            branch_nonneg = not branch_nonneg
            if kind is SetKind.ADMISSIBLE:
                u = p.u_max if branch_nonneg else p.u_min
            else:
                u = p.u_min if branch_nonneg else p.u_max
            lam = record(s_ev, y_ev, u)
            switches.append(s_ev)
            stepper.rhs = make_rhs(u)
            stepper.reset(s_ev, (y_ev[0], y_ev[1], *lam), h0=h0)
            continue

        dense.append((seg, s_end))
        lam = record(s_end, y_end, u)
        stepper.y = (y_end[0], y_end[1], *lam)
        stepper.f = stepper.rhs(s_end, stepper.y)

        x_end = (y_end[0], y_end[1])
        if not first_step_done:
            first_step_done = True
            if max(constraint_values(x_end, caps)) >= 0.0:
                # Candidate does not move into the open interior: rejected.
                return None
        g_now = constraint_values(x_end, caps)
        for idx in range(4):
            if g_now[idx] < -ARM_TOL:
                armed[idx] = True

        speed = math.hypot(*vector_field(x_end, u, p))
        if speed < STALL_SPEED:
            return build(
                Termination(TerminationKind.VELOCITY_STALL, None, x_end)
            )
        if s_end >= s_max:
            raise BarrierHorizonError(
                build(Termination(TerminationKind.HORIZON_EXCEEDED))
            )


@dataclass(frozen=True)
class BarrierVerification:
    """Outcome of the consistency checks on a traced curve."""

    ok: bool
    hamiltonian_max: float
    hamiltonian_worst_index: int
    extremality_ok: bool
    extremality_worst_index: int
    graze_distance: float
    graze_max_violation: float
    tangency_residual: float
    failures: tuple[str, ...]


def verify_barrier(
    curve: BarrierCurve,
    p: ModelParams,
    caps: ConstraintCaps,
    *,
    hamiltonian_tol: float = 1e-6,
    extremality_tol: float = 1e-12,
    graze_distance_tol: float = 1e-4,
    graze_violation_tol: float = 1e-6,
    tangency_tol: float = 1e-10,
) -> BarrierVerification:
    """Check the necessary conditions along a traced curve.

    (a) the Hamiltonian residual |lam . f| stays below tolerance at every
    sample; (b) the recorded bang extremizes the Hamiltonian over both bounds
    at every sample; (c) re-integrating the state equation forward from the
    far end of the curve, under the recorded input schedule, grazes back to
    the tangent point without leaving the box; (d) the tangency residual of
    the constraint function vanishes at the tangent point.
    """
    failures: list[str] = []

    ham_max, ham_idx = 0.0, 0
    extrem_ok, extrem_idx = True, -1
    for i, smp in enumerate(curve.samples):
        f = vector_field(smp.state, smp.u, p)
        h_rec = smp.costate[0] * f[0] + smp.costate[1] * f[1]
        if abs(h_rec) > ham_max:
            ham_max, ham_idx = abs(h_rec), i
        h_lo = _hamiltonian(smp.state, smp.costate, p.u_min, p)
        h_hi = _hamiltonian(smp.state, smp.costate, p.u_max, p)
        if curve.set_kind is SetKind.ADMISSIBLE:
            bad = h_rec > min(h_lo, h_hi) + extremality_tol
        else:
            bad = h_rec < max(h_lo, h_hi) - extremality_tol
        if bad and extrem_ok:
            extrem_ok, extrem_idx = False, i
    if ham_max > hamiltonian_tol:
        failures.append(
            f"hamiltonian residual {ham_max!r} at sample {ham_idx} exceeds {hamiltonian_tol!r}"
        )
    if not extrem_ok:
        failures.append(f"bang extremality violated at sample {extrem_idx}")

    graze_dist, graze_viol = _graze_check(curve, p, caps)
    if graze_dist > graze_distance_tol:
        failures.append(
            f"graze endpoint misses the tangent point by {graze_dist!r}"
        )
    if graze_viol > graze_violation_tol:
        failures.append(f"graze re-integration violates a constraint by {graze_viol!r}")

    residual = abs(
        lie_derivative(curve.tangent.face, curve.tangent.point, curve.samples[0].u, p)
    )
    if residual > tangency_tol:
        failures.append(f"tangency residual {residual!r} exceeds {tangency_tol!r}")

    return BarrierVerification(
        ok=not failures,
        hamiltonian_max=ham_max,
        hamiltonian_worst_index=ham_idx,
        extremality_ok=extrem_ok,
        extremality_worst_index=extrem_idx,
        graze_distance=graze_dist,
        graze_max_violation=graze_viol,
        tangency_residual=residual,
        failures=tuple(failures),
    )


def _hamiltonian(x: State, lam: Costate, u: float, p: ModelParams) -> float:
    f = vector_field(x, u, p)
    return lam[0] * f[0] + lam[1] * f[1]


def _graze_check(curve: BarrierCurve, p: ModelParams, caps: ConstraintCaps) -> tuple[float, float]:
    """Forward re-integration along the recorded schedule.

    Returns (endpoint distance to the tangent point, max constraint value
    seen at accepted steps).
    """
    span = curve.span
    if span == 0.0:
        return 0.0, max(constraint_values(curve.samples[0].state, caps))

    # Input as a function of forward time t in [0, span]: the bang recorded
    # at backward time s = span - t.  Breakpoints are the switch times.
    breaks = sorted(span - s for s in curve.switches if 0.0 < s < span)
    boundaries = [0.0, *breaks, span]

    def u_of(t: float) -> float:
        s = span - t
        # samples are ordered by s; find the applicable bang
        u_val = curve.samples[0].u
        for smp in curve.samples:
            if smp.s <= s:
                u_val = smp.u
            else:
                break
        return u_val

    x = curve.samples[-1].state
    max_g = max(constraint_values(x, caps))
    for t0, t1 in zip(boundaries[:-1], boundaries[1:]):
        if t1 <= t0:
            continue
        u_seg = u_of(0.5 * (t0 + t1))

        def rhs(_t: float, y: tuple[float, ...]) -> tuple[float, ...]:
            return vector_field((y[0], y[1]), u_seg, p)

        stepper = AdaptiveStepper(rhs, t0, x, atol=1e-10, rtol=1e-10, h0=1e-3, h_max=1.0)
        while stepper.t < t1:
            seg = stepper.step(t1)
            max_g = max(max_g, *constraint_values((seg.y1[0], seg.y1[1]), caps))
        x = (stepper.y[0], stepper.y[1])

    zx, zy = curve.tangent.point
    return math.hypot(x[0] - zx, x[1] - zy), max_g
