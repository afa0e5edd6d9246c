"""Regime classification: comfortable / comfortable-viable / viable / desperate.

The decision tree audits seven inequalities (three tangency existences, four
barrier entry conditions) and walks them in a fixed order: comfortable first,
then desperate, then the invariant-set check that separates comfortable-viable
from viable.  Every inequality is recorded with its numbers so a verdict can
be audited or re-derived by hand.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .model import ConstraintCaps, Face, ModelParams
from .tangency import (
    BOUNDARY_TOL,
    SetKind,
    _conservative,
    entry_values,
    existence_margin_g1,
    existence_margin_g3,
)


class Case(Enum):
    COMFORTABLE = "comfortable"
    COMFORTABLE_VIABLE = "comfortable_viable"
    VIABLE = "viable"
    DESPERATE = "desperate"


#: Order from best to worst regime, used by monotonicity checks.
CASE_ORDER = (Case.COMFORTABLE, Case.COMFORTABLE_VIABLE, Case.VIABLE, Case.DESPERATE)


@dataclass(frozen=True)
class Audit:
    """One evaluated inequality; margin > 0 means it holds (strictly)."""

    id: str
    lhs: float
    rhs: float
    holds: bool
    margin: float

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "holds": self.holds,
            "margin": self.margin,
        }


@dataclass(frozen=True)
class Classification:
    case: Case
    audits: tuple[Audit, ...]
    active_face: Face | None
    boundary_flag: bool
    path: str = field(compare=False, default="")

    def audit(self, audit_id: str) -> Audit:
        for a in self.audits:
            if a.id == audit_id:
                return a
        raise KeyError(audit_id)

    def to_json_dict(self) -> dict:
        return {
            "case": self.case.value,
            "active_face": self.active_face.value if self.active_face else None,
            "boundary": self.boundary_flag,
            "audits": [a.to_json_dict() for a in self.audits],
        }


def _existence_audit(audit_id: str, cap: float, threshold: float) -> Audit:
    # inequality: cap < threshold
    margin = threshold - cap
    return Audit(audit_id, cap, threshold, margin > 0.0, margin)


def _entry_audit(audit_id: str, lhs: float, rhs: float) -> Audit:
    # inequality: lhs > rhs
    margin = lhs - rhs
    return Audit(audit_id, lhs, rhs, margin > 0.0, margin)


def _all_audits(p: ModelParams, caps: ConstraintCaps) -> dict[str, Audit]:
    t_adm, _ = existence_margin_g1(p, caps, SetKind.ADMISSIBLE)
    t_mrpi, _ = existence_margin_g1(p, caps, SetKind.MRPI)
    s_g3, _ = existence_margin_g3(p, caps)
    audits = {
        "exist_g1_admissible": _existence_audit("exist_g1_admissible", caps.xbar1, t_adm),
        "exist_g1_mrpi": _existence_audit("exist_g1_mrpi", caps.xbar1, t_mrpi),
        "exist_g3": _existence_audit("exist_g3", caps.xbar2, s_g3),
    }
    for kind in SetKind:
        for face in (Face.G1, Face.G3):
            audit_id = f"entry_{face.value}_{kind.value}"
            lhs, rhs = entry_values(p, caps, kind, face)
            audits[audit_id] = _entry_audit(audit_id, lhs, rhs)
    return audits


def classify(p: ModelParams, caps: ConstraintCaps) -> Classification:
    """Map parameters and caps to one of the four regimes.

    Comfortable: no tangency exists on either cap face (admissible branch),
    so the whole box is robustly invariant.  Desperate: a tangency exists but
    its admissible entry condition fails, so candidate barriers leave the box
    immediately and both sets collapse to the origin.  Comfortable-viable:
    the invariant set has a tangency whose entry condition holds.  Viable:
    everything else (nontrivial admissible set, trivial invariant set).

    Knife-edge margins (within 1e-12 of zero) are resolved toward the less
    favorable regime and flagged via boundary_flag.
    """
    audits = _all_audits(p, caps)
    boundary = any(abs(a.margin) <= BOUNDARY_TOL for a in audits.values())
    ordered = tuple(audits.values())

    def hold(audit_id: str, favor: bool) -> bool:
        return _conservative(audits[audit_id].margin, favor)

    # Tangencies relevant to the admissible set; knife edge counts as existing.
    exist_g1 = caps.xbar1 < 1.0 and hold("exist_g1_admissible", True)
    exist_g3 = caps.xbar2 < 1.0 and hold("exist_g3", True)

    if not exist_g1 and not exist_g3:
        return Classification(
            Case.COMFORTABLE, ordered, None, boundary,
            "no tangency on g1 or g3: box robustly invariant",
        )

    faces = [f for f, e in ((Face.G1, exist_g1), (Face.G3, exist_g3)) if e]
    for face in faces:
        # Knife-edge entry counts as failing (desperate over viable).
        if not hold(f"entry_{face.value}_admissible", False):
            # Both faces carrying tangencies forces both entries to fail
            # (mutual exclusion), so the verdict is order-independent.
            assert all(
                not hold(f"entry_{f.value}_admissible", False) for f in faces
            ), "entry condition held on a coexisting tangency face"
            return Classification(
                Case.DESPERATE, ordered, face, boundary,
                f"tangency on {face.value} with admissible entry failing: "
                "candidate barriers leave the box",
            )

    active = faces[0]
    assert len(faces) == 1, "coexisting tangencies must have been desperate"

    # Invariant-set route: a tangency for the MRPI whose entry holds.  The
    # knife edge counts as failing (viable over comfortable-viable).
    mrpi_g3 = (
        caps.xbar2 < 1.0
        and hold("exist_g3", False)
        and hold("entry_g3_mrpi", False)
    )
    mrpi_g1 = (
        caps.xbar1 < 1.0
        and hold("exist_g1_mrpi", False)
        and hold("entry_g1_mrpi", False)
    )
    if mrpi_g3 or mrpi_g1:
        mrpi_face = Face.G3 if mrpi_g3 else Face.G1
        assert mrpi_face is active, "invariant-set tangency on a different face"
        assert hold(f"entry_{active.value}_admissible", False), (
            "comfortable-viable verdict without the admissible entry holding"
        )
        return Classification(
            Case.COMFORTABLE_VIABLE, ordered, active, boundary,
            f"tangency on {active.value}; admissible and invariant-set entry both hold",
        )
    return Classification(
        Case.VIABLE, ordered, active, boundary,
        f"tangency on {active.value}; admissible entry holds, invariant set trivial",
    )


_REPORT_HEADER = "regime classification"


def classification_report(p: ModelParams, caps: ConstraintCaps) -> str:
    """Deterministic human-readable report; parseable by parse_report."""
    cls = classify(p, caps)
    lines = [
        _REPORT_HEADER,
        f"case: {cls.case.value}",
        f"active_face: {cls.active_face.value if cls.active_face else 'none'}",
        f"boundary: {str(cls.boundary_flag).lower()}",
        f"path: {cls.path}",
    ]
    for a in cls.audits:
        lines.append(
            f"audit {a.id}: lhs={a.lhs:.17g} rhs={a.rhs:.17g} "
            f"margin={a.margin:.17g} holds={str(a.holds).lower()}"
        )
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> Classification:
    """Recover the Classification encoded by classification_report."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != _REPORT_HEADER:
        raise ValueError("not a classification report")
    fields: dict[str, str] = {}
    audits: list[Audit] = []
    for ln in lines[1:]:
        key, _, rest = ln.partition(": ")
        if key.startswith("audit "):
            parts = dict(item.split("=", 1) for item in rest.split())
            audits.append(
                Audit(
                    key[len("audit "):].rstrip(":"),
                    float(parts["lhs"]),
                    float(parts["rhs"]),
                    parts["holds"] == "true",
                    float(parts["margin"]),
                )
            )
        else:
            fields[key] = rest
    face = None if fields["active_face"] == "none" else Face(fields["active_face"])
    return Classification(
        Case(fields["case"]),
        tuple(audits),
        face,
        fields["boundary"] == "true",
        fields.get("path", ""),
    )
