"""Two-state vector-borne infection dynamics with a bounded fumigation input.

State x = (x1, x2): proportion of infected mosquitoes and infected humans,
both living on [0, 1].  The input u (a mosquito mortality rate, natural death
plus fumigation) is constrained to [u_min, u_max].  All rates are per day.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

State = tuple[float, float]
Costate = tuple[float, float]

_RAW_TOL = 1e-12


def _require_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"non-finite value: {v!r}")


@dataclass(frozen=True)
class ModelParams:
    """Infection rate coefficients and fumigation bounds.

    A_m and A_h are the composite mosquito/human infection rates, gamma the
    human recovery rate.  The raw epidemiological fields (biting rate a,
    transmission probabilities p_m / p_h, mosquito-to-human ratio) are
    optional provenance; when given they must reproduce A_m = a*p_m and
    A_h = a*p_h*ratio to within 1e-12.
    """

    A_m: float
    A_h: float
    gamma: float
    u_min: float
    u_max: float
    a: float | None = None
    p_m: float | None = None
    p_h: float | None = None
    mosquito_human_ratio: float | None = None

    def __post_init__(self) -> None:
        _require_finite(self.A_m, self.A_h, self.gamma, self.u_min, self.u_max)
        if self.A_m < 0 or self.A_h < 0 or self.gamma < 0:
            raise ValueError("rates A_m, A_h, gamma must be nonnegative")
        if not (0 < self.u_min < self.u_max):
            raise ValueError("fumigation bounds must satisfy 0 < u_min < u_max")
        if self.a is not None and self.a < 0:
            raise ValueError("biting rate a must be nonnegative")
        for name in ("p_m", "p_h"):
            v = getattr(self, name)
            if v is not None and not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1]")
        r = self.mosquito_human_ratio
        if r is not None and r < 0:
            raise ValueError("mosquito_human_ratio must be nonnegative")
        if self.a is not None and self.p_m is not None:
            if abs(self.A_m - self.a * self.p_m) > _RAW_TOL:
                raise ValueError("A_m does not match a * p_m")
        if self.a is not None and self.p_h is not None and r is not None:
            if abs(self.A_h - self.a * self.p_h * r) > _RAW_TOL:
                raise ValueError("A_h does not match a * p_h * ratio")

    def to_json_dict(self) -> dict:
        d = {
            "A_m": self.A_m,
            "A_h": self.A_h,
            "gamma": self.gamma,
            "u_min": self.u_min,
            "u_max": self.u_max,
        }
        for key, attr in (
            ("a", self.a),
            ("p_m", self.p_m),
            ("p_h", self.p_h),
            ("mosquito_human_ratio", self.mosquito_human_ratio),
        ):
            if attr is not None:
                d[key] = attr
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "ModelParams":
        required = {"A_m", "A_h", "gamma", "u_min", "u_max"}
        optional = {"a", "p_m", "p_h", "mosquito_human_ratio"}
        unknown = set(d) - required - optional
        if unknown:
            raise ValueError(f"unknown model keys: {sorted(unknown)}")
        missing = required - set(d)
        if missing:
            raise ValueError(f"missing model keys: {sorted(missing)}")
        return cls(**{k: float(v) for k, v in d.items()})


@dataclass(frozen=True)
class ConstraintCaps:
    """Hard caps on the infected proportions: the box G = [0, xbar1] x [0, xbar2]."""

    xbar1: float
    xbar2: float

    def __post_init__(self) -> None:
        _require_finite(self.xbar1, self.xbar2)
        if not (0 < self.xbar1 <= 1 and 0 < self.xbar2 <= 1):
            raise ValueError("caps must lie in (0, 1]")

    def to_json_dict(self) -> dict:
        return {"xbar1": self.xbar1, "xbar2": self.xbar2}

    @classmethod
    def from_json_dict(cls, d: dict) -> "ConstraintCaps":
        unknown = set(d) - {"xbar1", "xbar2"}
        if unknown:
            raise ValueError(f"unknown caps keys: {sorted(unknown)}")
        if set(d) != {"xbar1", "xbar2"}:
            raise ValueError("caps require keys xbar1 and xbar2")
        return cls(float(d["xbar1"]), float(d["xbar2"]))


class Face(Enum):
    """The four constraint faces of the box G."""

    G1 = "g1"  # x1 = xbar1
    G2 = "g2"  # x1 = 0
    G3 = "g3"  # x2 = xbar2
    G4 = "g4"  # x2 = 0


def constraint_values(x: State, caps: ConstraintCaps) -> tuple[float, float, float, float]:
    """Values (g1, g2, g3, g4); the box is where all are <= 0."""
    x1, x2 = x
    return (x1 - caps.xbar1, -x1, x2 - caps.xbar2, -x2)


def active_faces(x: State, caps: ConstraintCaps, tol: float = 1e-12) -> list[Face]:
    """Faces whose constraint value vanishes at x, within tol."""
    g = constraint_values(x, caps)
    return [f for f, v in zip(Face, g) if abs(v) <= tol]


def in_box(x: State, caps: ConstraintCaps, tol: float = 0.0) -> bool:
    g = constraint_values(x, caps)
    return max(g) <= tol


def vector_field(x: State, u: float, p: ModelParams) -> tuple[float, float]:
    """Time derivative (dx1/dt, dx2/dt) at state x under input u."""
    x1, x2 = x
    _require_finite(x1, x2, u)
    return (
        p.A_m * x2 * (1.0 - x1) - u * x1,
        p.A_h * x1 * (1.0 - x2) - p.gamma * x2,
    )


def state_jacobian(x: State, u: float, p: ModelParams) -> tuple[tuple[float, float], tuple[float, float]]:
    """Jacobian of the vector field with respect to the state."""
    x1, x2 = x
    _require_finite(x1, x2, u)
    return (
        (-p.A_m * x2 - u, p.A_m * (1.0 - x1)),
        (p.A_h * (1.0 - x2), -p.A_h * x1 - p.gamma),
    )


def adjoint_rhs(x: State, lam: Costate, u: float, p: ModelParams) -> tuple[float, float]:
    """Right-hand side of the adjoint equation, M(x, u) @ lam.

    M equals minus the transposed state Jacobian, so solutions evolve as
    normals of hyperplanes transported along trajectories.
    """
    x1, x2 = x
    l1, l2 = lam
    _require_finite(x1, x2, l1, l2, u)
    return (
        (p.A_m * x2 + u) * l1 - p.A_h * (1.0 - x2) * l2,
        -p.A_m * (1.0 - x1) * l1 + (p.A_h * x1 + p.gamma) * l2,
    )


def lie_derivative(face: Face, x: State, u: float, p: ModelParams) -> float:
    """Derivative of the face's constraint function along the flow at x.

    Evaluated anywhere, not just on the face; barrier computations need the
    value along curves approaching a face.  The g3 value is independent of u.
    """
    f1, f2 = vector_field(x, u, p)
    if face is Face.G1:
        return f1
    if face is Face.G2:
        return -f1
    if face is Face.G3:
        return f2
    if face is Face.G4:
        return -f2
    raise ValueError(f"unknown face: {face!r}")


def endemic_equilibrium(u: float, p: ModelParams) -> State | None:
    """Positive equilibrium of the flow at constant input u, if one exists.

    Returns None when A_m*A_h <= u*gamma, in which case only the disease-free
    origin equilibrium remains.
    """
    _require_finite(u)
    if u <= 0:
        raise ValueError("u must be positive")
    if p.A_m * p.A_h <= u * p.gamma:
        return None
    x1 = (p.A_m * p.A_h - u * p.gamma) / (p.A_h * (p.A_m + u))
    x2 = p.A_h * x1 / (p.A_h * x1 + p.gamma)
    return (x1, x2)
