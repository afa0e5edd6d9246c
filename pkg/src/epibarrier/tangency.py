"""Ultimate tangency points on the cap faces, and barrier entry inequalities.

Tangency points are where a barrier curve can graze a cap face; both the cap
face x1 = xbar1 (g1) and x2 = xbar2 (g3) admit closed forms.  The lower faces
g2/g4 never carry tangencies: the flow always points into the box there.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .model import ConstraintCaps, Costate, Face, ModelParams, State

#: Margins within this band of zero are knife-edge cases; classification
#: treats them conservatively and flags the result as boundary.
BOUNDARY_TOL = 1e-12


class SetKind(Enum):
    """Which set a computation targets: selects the extreme input used."""

    ADMISSIBLE = "admissible"  # exists-a-control semantics, branches on u_max
    MRPI = "mrpi"  # for-all-controls semantics, branches on u_min


def tangency_input(kind: SetKind, p: ModelParams) -> float:
    """Extreme input at which the tangency/entry formulas for `kind` branch."""
    return p.u_max if kind is SetKind.ADMISSIBLE else p.u_min


@dataclass(frozen=True)
class TangentPoint:
    """A point of ultimate tangency with its terminal costate.

    set_kind is None for the g3 point queried without a target set; the g3
    point itself is identical for both kinds.
    """

    face: Face
    point: State
    set_kind: SetKind | None
    terminal_costate: Costate

    def to_json_dict(self) -> dict:
        return {
            "face": self.face.value,
            "x1": self.point[0],
            "x2": self.point[1],
            "set_kind": self.set_kind.value if self.set_kind else None,
            "lambda": list(self.terminal_costate),
        }


def existence_margin_g1(p: ModelParams, caps: ConstraintCaps, kind: SetKind) -> tuple[float, float]:
    """(threshold, margin) for a g1 tangency: exists iff xbar1 < threshold."""
    u = tangency_input(kind, p)
    threshold = p.A_m * caps.xbar2 / (p.A_m * caps.xbar2 + u)
    return threshold, threshold - caps.xbar1


def existence_margin_g3(p: ModelParams, caps: ConstraintCaps) -> tuple[float, float]:
    """(threshold, margin) for a g3 tangency: exists iff xbar2 < threshold."""
    threshold = p.A_h * caps.xbar1 / (p.A_h * caps.xbar1 + p.gamma)
    return threshold, threshold - caps.xbar2


def _conservative(margin: float, favor_hold: bool) -> bool:
    """Strict test with the knife-edge band resolved toward the worse case."""
    if margin > BOUNDARY_TOL:
        return True
    if margin < -BOUNDARY_TOL:
        return False
    return favor_hold


def tangent_point_g1(p: ModelParams, caps: ConstraintCaps, kind: SetKind) -> TangentPoint | None:
    """Tangency on the face x1 = xbar1, or None when none exists.

    xbar1 = 1 never carries a tangency (the closed-form ordinate diverges);
    the existence inequality already excludes it since the threshold is < 1.
    """
    _, margin = existence_margin_g1(p, caps, kind)
    # A tangency on g1 makes the case worse for the admissible set, so the
    # knife edge counts as existing there; for the MRPI a tangency opens the
    # (better) comfortable-viable verdict, so the knife edge counts as absent.
    favor = kind is SetKind.ADMISSIBLE
    if caps.xbar1 >= 1.0 or not _conservative(margin, favor):
        return None
    u = tangency_input(kind, p)
    x2 = u * caps.xbar1 / (p.A_m * (1.0 - caps.xbar1))
    return TangentPoint(Face.G1, (caps.xbar1, x2), kind, (1.0, 0.0))


def tangent_point_g3(p: ModelParams, caps: ConstraintCaps, kind: SetKind | None = None) -> TangentPoint | None:
    """Tangency on the face x2 = xbar2, or None; identical for both set kinds."""
    _, margin = existence_margin_g3(p, caps)
    favor = kind is not SetKind.MRPI
    if caps.xbar2 >= 1.0 or not _conservative(margin, favor):
        return None
    x1 = p.gamma * caps.xbar2 / (p.A_h * (1.0 - caps.xbar2))
    return TangentPoint(Face.G3, (x1, caps.xbar2), kind, (0.0, 1.0))


def entry_values(p: ModelParams, caps: ConstraintCaps, kind: SetKind, face: Face) -> tuple[float, float]:
    """(LHS, RHS) of the entry inequality for `face` and `kind`.

    g1:  A_h (A_m + u) xbar1 + gamma u > A_m A_h
    g3:  A_m (A_h + gamma) xbar2 + gamma u > A_m A_h
    with u = u_max (admissible) or u_min (MRPI).
    """
    u = tangency_input(kind, p)
    rhs = p.A_m * p.A_h
    if face is Face.G1:
        lhs = p.A_h * (p.A_m + u) * caps.xbar1 + p.gamma * u
    elif face is Face.G3:
        lhs = p.A_m * (p.A_h + p.gamma) * caps.xbar2 + p.gamma * u
    else:
        raise ValueError("entry condition only applies to faces g1 and g3")
    return lhs, rhs


def entry_condition(p: ModelParams, caps: ConstraintCaps, kind: SetKind, face: Face) -> tuple[bool, float]:
    """Whether the candidate barrier from `face`'s tangent point enters the
    open box interior, with the signed margin LHS - RHS of the inequality.
    """
    lhs, rhs = entry_values(p, caps, kind, face)
    margin = lhs - rhs
    return margin > 0.0, margin
