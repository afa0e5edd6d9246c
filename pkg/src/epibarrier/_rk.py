"""Embedded Dormand-Prince 4(5) stepping on small float tuples.

Plain-float arithmetic keeps every run bit-for-bit reproducible and is faster
than array machinery for the 2- and 4-dimensional systems integrated here.
Dense output is cubic Hermite on each accepted step; events are located by
bisection on it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

Rhs = Callable[[float, tuple[float, ...]], tuple[float, ...]]

# Dormand-Prince coefficients (5th-order propagation, 4th-order error estimate).
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40,
)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0


@dataclass(frozen=True)
class Segment:
    """One accepted step with the data needed for Hermite dense output."""

    t0: float
    y0: tuple[float, ...]
    f0: tuple[float, ...]
    t1: float
    y1: tuple[float, ...]
    f1: tuple[float, ...]

    def interpolate(self, t: float) -> tuple[float, ...]:
        return hermite(self.t0, self.y0, self.f0, self.t1, self.y1, self.f1, t)


def hermite(
    t0: float,
    y0: Sequence[float],
    f0: Sequence[float],
    t1: float,
    y1: Sequence[float],
    f1: Sequence[float],
    t: float,
) -> tuple[float, ...]:
    """Cubic Hermite interpolation of a step at time t in [t0, t1]."""
    h = t1 - t0
    if h == 0.0:
        return tuple(y0)
    s = (t - t0) / h
    s2 = s * s
    s3 = s2 * s
    h00 = 2 * s3 - 3 * s2 + 1
    h10 = s3 - 2 * s2 + s
    h01 = -2 * s3 + 3 * s2
    h11 = s3 - s2
    return tuple(
        h00 * a + h10 * h * fa + h01 * b + h11 * h * fb
        for a, fa, b, fb in zip(y0, f0, y1, f1)
    )


def _dp_stages(rhs: Rhs, t: float, y: tuple[float, ...], f0: tuple[float, ...], h: float):
    n = len(y)
    k1 = f0
    y2 = tuple(y[i] + h * _A21 * k1[i] for i in range(n))
    k2 = rhs(t + _C2 * h, y2)
    y3 = tuple(y[i] + h * (_A31 * k1[i] + _A32 * k2[i]) for i in range(n))
    k3 = rhs(t + _C3 * h, y3)
    y4 = tuple(y[i] + h * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i]) for i in range(n))
    k4 = rhs(t + _C4 * h, y4)
    y5 = tuple(
        y[i] + h * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
        for i in range(n)
    )
    k5 = rhs(t + _C5 * h, y5)
    y6 = tuple(
        y[i]
        + h * (_A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i] + _A64 * k4[i] + _A65 * k5[i])
        for i in range(n)
    )
    k6 = rhs(t + h, y6)
    y_new = tuple(
        y[i] + h * (_B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i] + _B5 * k5[i] + _B6 * k6[i])
        for i in range(n)
    )
    k7 = rhs(t + h, y_new)
    err = tuple(
        h
        * (
            _E1 * k1[i]
            + _E3 * k3[i]
            + _E4 * k4[i]
            + _E5 * k5[i]
            + _E6 * k6[i]
            + _E7 * k7[i]
        )
        for i in range(n)
    )
    return y_new, k7, err


class AdaptiveStepper:
    """Step-by-step driver; the caller owns event handling and termination.

    Restart (a fresh instance) after any event that changes the right-hand
    side so the first-same-as-last derivative stays consistent.
    """

    def __init__(
        self,
        rhs: Rhs,
        t0: float,
        y0: Sequence[float],
        *,
        atol: float = 1e-10,
        rtol: float = 1e-10,
        h0: float = 1e-3,
        h_max: float = 1.0,
    ) -> None:
        self.rhs = rhs
        self.t = float(t0)
        self.y = tuple(float(v) for v in y0)
        self.f = rhs(self.t, self.y)
        self.atol = atol
        self.rtol = rtol
        self.h = min(h0, h_max)
        self.h_max = h_max

    def _error_norm(self, err, y0, y1) -> float:
        total = 0.0
        for e, a, b in zip(err, y0, y1):
            scale = self.atol + self.rtol * max(abs(a), abs(b))
            q = e / scale
            total += q * q
        return math.sqrt(total / len(err))

    def step(self, t_limit: float) -> Segment:
        """Advance one accepted step, never past t_limit (> current t)."""
        if t_limit <= self.t:
            raise ValueError("t_limit must exceed the current time")
        while True:
            h = min(self.h, self.h_max, t_limit - self.t)
            if h <= 1e-14 * max(1.0, abs(self.t)):
                raise ArithmeticError(f"step size underflow at t={self.t!r}")
            at_limit = h >= t_limit - self.t
            y_new, f_new, err = _dp_stages(self.rhs, self.t, self.y, self.f, h)
            norm = self._error_norm(err, self.y, y_new)
            if norm <= 1.0:
                factor = MAX_FACTOR if norm == 0.0 else min(
                    MAX_FACTOR, max(MIN_FACTOR, SAFETY * norm ** -0.2)
                )
                # Land exactly on the limit so segment boundaries line up
                # bit-for-bit across chained integrations.
                t_new = t_limit if at_limit else self.t + h
                seg = Segment(self.t, self.y, self.f, t_new, y_new, f_new)
                self.t = t_new
                self.y = y_new
                self.f = f_new
                self.h = min(h * factor, self.h_max)
                return seg
            self.h = h * max(MIN_FACTOR, SAFETY * norm ** -0.2)

    def reset(self, t: float, y: Sequence[float], h0: float = 1e-3) -> None:
        """Re-anchor after an event; recomputes the derivative."""
        self.t = float(t)
        self.y = tuple(float(v) for v in y)
        self.f = self.rhs(self.t, self.y)
        self.h = min(h0, self.h_max)


def bisect(fn: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """Zero of fn on [lo, hi] with fn(lo) and fn(hi) of opposite sign.

    Runs until the bracket is narrower than tol; returns the midpoint.
    """
    flo = fn(lo)
    fhi = fn(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError("bisection bracket does not change sign")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return 0.5 * (lo + hi)
