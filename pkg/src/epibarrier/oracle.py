"""Brute-force grid verification of the admissible and invariant sets.

The dynamics are cooperative (off-diagonal Jacobian entries are nonnegative
on the unit square) and the first state equation is decreasing in u, so the
constant input u_max produces the componentwise-smallest response and u_min
the largest.  Existence and for-all quantifiers over input signals therefore
collapse to the two constant extremes: a point is admissible iff its u_max
trajectory respects the caps, robustly safe iff its u_min trajectory does.
The envelope property test guards this dominance argument empirically.

Simulation here is an independent route from the barrier pipeline: fixed-step
RK4 on the raw dynamics, no adjoint, no polygons.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .model import ConstraintCaps, ModelParams, endemic_equilibrium
from .region import RegionSet

VIOLATION_TOL = 1e-12
EQ_BALL = 1e-3  # tail test: close enough to an in-box attractor counts as settled


@njit(cache=True)
def _sweep(
    pts: np.ndarray,
    Am: float,
    Ah: float,
    gamma: float,
    u: float,
    xbar1: float,
    xbar2: float,
    horizon: float,
    dt: float,
    eq1: float,
    eq2: float,
    freeze_r2: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Fixed-step RK4 sweep at constant input.

    Returns (violation time or -1 per point, final states, first violated
    face index or -1).  Points that come within sqrt(freeze_r2) of the
    attracting equilibrium (eq1, eq2) stop stepping early; freeze_r2 < 0
    disables freezing.
    """
    n = pts.shape[0]
    t_violate = np.full(n, -1.0)
    face = np.full(n, -1, dtype=np.int8)
    final = pts.copy()
    n_steps = int(np.ceil(horizon / dt))
    for k in range(n):
        x1 = pts[k, 0]
        x2 = pts[k, 1]
        bad = -1
        t_bad = -1.0
        t = 0.0
        for i in range(n_steps):
            h = dt if t + dt <= horizon else horizon - t
            if h <= 0.0:
                break
            a1 = Am * x2 * (1.0 - x1) - u * x1
            a2 = Ah * x1 * (1.0 - x2) - gamma * x2
            b1x = x1 + 0.5 * h * a1
            b2x = x2 + 0.5 * h * a2
            b1 = Am * b2x * (1.0 - b1x) - u * b1x
            b2 = Ah * b1x * (1.0 - b2x) - gamma * b2x
            c1x = x1 + 0.5 * h * b1
            c2x = x2 + 0.5 * h * b2
            c1 = Am * c2x * (1.0 - c1x) - u * c1x
            c2 = Ah * c1x * (1.0 - c2x) - gamma * c2x
            d1x = x1 + h * c1
            d2x = x2 + h * c2
            d1 = Am * d2x * (1.0 - d1x) - u * d1x
            d2 = Ah * d1x * (1.0 - d2x) - gamma * d2x
            x1 = x1 + (h / 6.0) * (a1 + 2.0 * b1 + 2.0 * c1 + d1)
            x2 = x2 + (h / 6.0) * (a2 + 2.0 * b2 + 2.0 * c2 + d2)
            t += h
            if x1 - xbar1 > VIOLATION_TOL or x1 < -VIOLATION_TOL:
                bad = 0 if x1 > xbar1 else 1
                t_bad = t
                break
            if x2 - xbar2 > VIOLATION_TOL or x2 < -VIOLATION_TOL:
                bad = 2 if x2 > xbar2 else 3
                t_bad = t
                break
            if freeze_r2 >= 0.0:
                dx = x1 - eq1
                dy = x2 - eq2
                if dx * dx + dy * dy < freeze_r2:
                    break
        t_violate[k] = t_bad
        face[k] = bad
        final[k, 0] = x1
        final[k, 1] = x2
    return t_violate, final, face


def _attractor(p: ModelParams, u: float) -> tuple[float, float]:
    eq = endemic_equilibrium(u, p)
    return eq if eq is not None else (0.0, 0.0)


def _freeze_radius(eq: tuple[float, float], caps: ConstraintCaps) -> float:
    """Early-stop radius around an attractor, if it sits clear of the caps."""
    clearance = min(caps.xbar1 - eq[0], caps.xbar2 - eq[1])
    if clearance <= 0.0:
        return -1.0
    return min(EQ_BALL, clearance / 8.0)


def survival(
    p: ModelParams,
    caps: ConstraintCaps,
    points: np.ndarray,
    u: float,
    horizon: float,
    dt: float = 0.5,
    freeze: bool = True,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(violation times or -1, final states, violated face index or -1)."""
    eq = _attractor(p, u)
    r = _freeze_radius(eq, caps) if freeze else -1.0
    pts = np.ascontiguousarray(np.asarray(points, dtype=float))
    return _sweep(
        pts, p.A_m, p.A_h, p.gamma, u, caps.xbar1, caps.xbar2,
        float(horizon), float(dt), eq[0], eq[1], r * r if r > 0 else -1.0,
    )


def _tail_ok(
    p: ModelParams,
    caps: ConstraintCaps,
    u: float,
    final: np.ndarray,
    survived: np.ndarray,
) -> np.ndarray:
    """Horizon-end screen against slow crossings just past the horizon.

    A surviving point counts only if its end state sits below the human cap
    with nonincreasing x2, or within a small ball of an attractor that itself
    lies inside the box.
    """
    x1 = final[:, 0]
    x2 = final[:, 1]
    dx2 = p.A_h * x1 * (1.0 - x2) - p.gamma * x2
    settled_low = (x2 < caps.xbar2) & (dx2 <= 0.0)
    eq = _attractor(p, u)
    eq_inside = eq[0] <= caps.xbar1 and eq[1] <= caps.xbar2
    near_eq = np.zeros(len(final), dtype=bool)
    if eq_inside:
        near_eq = (x1 - eq[0]) ** 2 + (x2 - eq[1]) ** 2 <= EQ_BALL**2
    return survived & (settled_low | near_eq)


@dataclass
class GridVerdict:
    """Per-grid-point safety flags from brute-force simulation."""

    resolution: tuple[int, int]
    horizon: float
    x1: np.ndarray  # length n1
    x2: np.ndarray  # length n2
    admissible: np.ndarray  # (n1, n2) bool
    invariant: np.ndarray  # (n1, n2) bool

    def __post_init__(self) -> None:
        if np.any(self.invariant & ~self.admissible):
            raise AssertionError("invariant flag set on a non-admissible point")

    def points(self) -> np.ndarray:
        g1, g2 = np.meshgrid(self.x1, self.x2, indexing="ij")
        return np.column_stack([g1.ravel(), g2.ravel()])

    def to_csv(self) -> str:
        lines = ["x1,x2,admissible,invariant"]
        for i in range(len(self.x1)):
            for j in range(len(self.x2)):
                lines.append(
                    f"{self.x1[i]:.17g},{self.x2[j]:.17g},"
                    f"{int(self.admissible[i, j])},{int(self.invariant[i, j])}"
                )
        return "\n".join(lines) + "\n"

    def to_pgm(self) -> str:
        """Tiny grayscale dump (0 outside, 1 admissible, 2 invariant)."""
        n1, n2 = self.resolution
        rows = [f"P2", f"{n1} {n2}", "2"]
        for j in range(n2 - 1, -1, -1):  # top row first
            rows.append(
                " ".join(
                    "2" if self.invariant[i, j] else "1" if self.admissible[i, j] else "0"
                    for i in range(n1)
                )
            )
        return "\n".join(rows) + "\n"


def grid_membership(
    p: ModelParams,
    caps: ConstraintCaps,
    n1: int,
    n2: int,
    horizon: float = 3000.0,
    dt: float = 0.5,
) -> GridVerdict:
    """Simulate every grid point of the cap box at both input extremes."""
    if n1 < 2 or n2 < 2:
        raise ValueError("grid resolution must be at least 2x2")
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    x1 = np.linspace(0.0, caps.xbar1, n1)
    x2 = np.linspace(0.0, caps.xbar2, n2)
    g1, g2 = np.meshgrid(x1, x2, indexing="ij")
    pts = np.column_stack([g1.ravel(), g2.ravel()])

    flags = {}
    for label, u in (("admissible", p.u_max), ("invariant", p.u_min)):
        t_bad, final, _face = survival(p, caps, pts, u, horizon, dt)
        survived = t_bad < 0.0
        ok = _tail_ok(p, caps, u, final, survived)
        flags[label] = ok.reshape(n1, n2)
    return GridVerdict((n1, n2), horizon, x1, x2, flags["admissible"], flags["invariant"])


@dataclass(frozen=True)
class SetAgreement:
    total: int
    agree: int
    off_band_total: int
    off_band_agree: int
    disagreements: tuple[tuple[float, float], ...]  # off-band points only

    @property
    def fraction(self) -> float:
        return self.agree / self.total

    @property
    def off_band_fraction(self) -> float:
        return self.off_band_agree / self.off_band_total if self.off_band_total else 1.0


@dataclass(frozen=True)
class Agreement:
    admissible: SetAgreement
    mrpi: SetAgreement

    @property
    def min_off_band_fraction(self) -> float:
        return min(self.admissible.off_band_fraction, self.mrpi.off_band_fraction)


def _compare_one(
    verdict_flags: np.ndarray, region: RegionSet, pts: np.ndarray, band: float
) -> SetAgreement:
    flags = verdict_flags.ravel()
    if region.degenerate:
        in_region = np.hypot(pts[:, 0], pts[:, 1]) <= 1e-9
        dist = np.hypot(pts[:, 0], pts[:, 1])
    else:
        geo = region.geometry()
        dist = geo.batch_distance(pts)
        in_region = geo.batch_contains(pts) | (dist <= 1e-9)
    agree = in_region == flags
    off = dist > band
    bad = pts[off & ~agree]
    return SetAgreement(
        total=len(pts),
        agree=int(np.count_nonzero(agree)),
        off_band_total=int(np.count_nonzero(off)),
        off_band_agree=int(np.count_nonzero(agree & off)),
        disagreements=tuple(map(tuple, bad[:64])),
    )


def compare(
    verdict: GridVerdict,
    admissible: RegionSet,
    mrpi: RegionSet,
    band: float = 0.01,
) -> Agreement:
    """Agreement between grid flags and region membership, overall and
    restricted to points farther than `band` from the region boundary."""
    pts = verdict.points()
    return Agreement(
        _compare_one(verdict.admissible, admissible, pts, band),
        _compare_one(verdict.invariant, mrpi, pts, band),
    )


def survival_schedule(
    p: ModelParams,
    caps: ConstraintCaps,
    points: np.ndarray,
    schedule: list[tuple[float, float]],
    horizon: float,
    dt: float = 0.5,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Batched violation times under a piecewise-constant input signal.

    schedule is [(t_start, u), ...] with t_start[0] == 0.  Points that have
    violated stop evolving; returns (violation times or -1, final states,
    first violated face index or -1).
    """
    pts = np.asarray(points, dtype=float).copy()
    n = len(pts)
    t_violate = np.full(n, -1.0)
    face = np.full(n, -1, dtype=np.int8)
    alive = np.ones(n, dtype=bool)
    bounds = [t for t, _ in schedule[1:]] + [horizon]
    for (t_start, u), t_end in zip(schedule, bounds):
        if t_end <= t_start:
            continue
        idx = np.flatnonzero(alive)
        if len(idx) == 0:
            break
        tb, xf, fc = survival(p, caps, pts[idx], u, t_end - t_start, dt, freeze=False)
        pts[idx] = xf
        bad = tb >= 0
        t_violate[idx[bad]] = t_start + tb[bad]
        face[idx[bad]] = fc[bad]
        alive[idx[bad]] = False
    return t_violate, pts, face


def trace_batch(
    p: ModelParams,
    x0s: np.ndarray,
    schedule: list[tuple[float, float]],
    horizon: float,
    dt: float = 0.5,
    record_every: int = 20,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized RK4 trajectories under a piecewise-constant input.

    schedule is [(t_start, u), ...] with t_start[0] == 0.  Returns (times,
    states) with states shaped (len(times), n_points, 2).  Used by ordering
    and envelope checks; not clipped and not violation-aware.
    """
    x = np.asarray(x0s, dtype=float).copy()
    times = [0.0]
    states = [x.copy()]
    t = 0.0
    n_steps = int(round(horizon / dt))
    starts = [s for s, _ in schedule]
    values = [u for _, u in schedule]

    def u_at(tq: float) -> float:
        u = values[0]
        for s, v in zip(starts, values):
            if s <= tq:
                u = v
            else:
                break
        return u

    def f(state: np.ndarray, u: float) -> np.ndarray:
        x1, x2 = state[:, 0], state[:, 1]
        return np.column_stack(
            [p.A_m * x2 * (1 - x1) - u * x1, p.A_h * x1 * (1 - x2) - p.gamma * x2]
        )

    for i in range(n_steps):
        u = u_at(t)
        k1 = f(x, u)
        k2 = f(x + 0.5 * dt * k1, u)
        k3 = f(x + 0.5 * dt * k2, u)
        k4 = f(x + dt * k3, u)
        x = x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t += dt
        if (i + 1) % record_every == 0 or i == n_steps - 1:
            times.append(t)
            states.append(x.copy())
    return np.asarray(times), np.asarray(states)
