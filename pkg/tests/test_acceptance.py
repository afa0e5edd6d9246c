"""Release acceptance suite: one test per criterion, each printing a
pass/fail line with the measured quantities (run with -s to see them)."""
import math
import time

import numpy as np

from epibarrier import (
    Case,
    ConstraintCaps,
    Face,
    MembershipStatus,
    ModelParams,
    SetKind,
    classify,
    compare,
    compute_barrier,
    contains,
    endemic_equilibrium,
    grid_membership,
    lie_derivative,
    simulate,
    vector_field,
    verify_barrier,
)
from epibarrier.cli import main
from epibarrier.oracle import survival, survival_schedule

from conftest import CALI, CAPS
from test_policy import sample_inside, sample_outside


def _report(name: str, ok: bool, detail: str = "") -> None:
    tag = "PASS" if ok else "FAIL"
    print(f"[{tag}] {name}" + (f": {detail}" if detail else ""))
    assert ok, f"{name}: {detail}"


class TestAcceptance:
    def test_four_scenario_classification(self, cali):
        t0 = time.monotonic()
        got = {}
        for name, caps in CAPS.items():
            got[name] = classify(cali, ConstraintCaps(*caps))
        elapsed = time.monotonic() - t0
        ok = (
            got["comfortable"].case is Case.COMFORTABLE
            and got["comfortable_viable"].case is Case.COMFORTABLE_VIABLE
            and got["viable"].case is Case.VIABLE
            and got["viable"].active_face is Face.G1
            and got["desperate"].case is Case.DESPERATE
            and elapsed < 1.0
        )
        _report(
            "four-scenario classification",
            ok,
            f"labels {[c.case.value for c in got.values()]}, {elapsed * 1e3:.1f} ms",
        )

    def test_desperate_margin_sensitivity(self, cali):
        cls = classify(cali, ConstraintCaps(0.15, 0.04))
        margin = cls.audit("entry_g3_admissible").margin
        # exact arithmetic on the printed parameter decimals
        expected = 0.076608 * (0.0722633 + 0.1) * 0.04 + 0.1 * 0.05 - 0.076608 * 0.0722633
        margin_ok = abs(margin - expected) <= 1e-9 and abs(expected + 8.08e-6) < 5e-9
        raised = ModelParams(**{**CALI, "u_max": 0.051})
        flipped = classify(raised, ConstraintCaps(0.15, 0.04))
        ok = margin_ok and cls.case is Case.DESPERATE and flipped.case is Case.VIABLE
        _report(
            "desperate margin sensitivity",
            ok,
            f"margin {margin:.6e} (expected {expected:.6e}), "
            f"u_max=0.051 -> {flipped.case.value}",
        )

    def test_tangent_points(self, cali):
        from epibarrier import tangent_point_g1, tangent_point_g3

        z3 = tangent_point_g3(cali, ConstraintCaps(0.7, 0.2))
        z3_exact = 0.1 * 0.2 / (0.0722633 * (1.0 - 0.2))
        z1 = tangent_point_g1(cali, ConstraintCaps(0.15, 0.2), SetKind.ADMISSIBLE)
        z1_exact = 0.05 * 0.15 / (0.076608 * (1.0 - 0.15))
        residual3 = max(
            abs(lie_derivative(Face.G3, z3.point, u, cali)) for u in (0.0333, 0.05)
        )
        residual1 = abs(lie_derivative(Face.G1, z1.point, 0.05, cali))
        ok = (
            abs(z3.point[0] - z3_exact) <= 1e-12
            and z3.point[1] == 0.2
            and abs(z1.point[1] - z1_exact) <= 1e-12
            and z1.point[0] == 0.15
            and residual3 <= 1e-10
            and residual1 <= 1e-10
        )
        _report(
            "tangent points",
            ok,
            f"z3=({z3.point[0]:.6f}, {z3.point[1]}), z1=({z1.point[0]}, "
            f"{z1.point[1]:.6f}), residuals {residual3:.2e}/{residual1:.2e}",
        )

    def test_barrier_necessary_conditions(self, cali):
        jobs = [
            ((0.7, 0.2), SetKind.ADMISSIBLE),
            ((0.7, 0.2), SetKind.MRPI),
            ((0.15, 0.2), SetKind.ADMISSIBLE),
        ]
        details = []
        ok = True
        for caps_t, kind in jobs:
            caps = ConstraintCaps(*caps_t)
            t0 = time.monotonic()
            curve = compute_barrier(cali, caps, kind)
            elapsed = time.monotonic() - t0
            report = verify_barrier(curve, cali, caps)
            ok = ok and report.ok and elapsed < 5.0
            ok = ok and report.hamiltonian_max <= 1e-6
            ok = ok and report.graze_distance <= 1e-4
            ok = ok and report.graze_max_violation <= 1e-6
            details.append(
                f"{caps_t}/{kind.value}: H={report.hamiltonian_max:.1e} "
                f"graze={report.graze_distance:.1e} viol={report.graze_max_violation:.1e} "
                f"{elapsed * 1e3:.0f}ms"
            )
        _report("barrier necessary conditions", ok, "; ".join(details))

    def test_oracle_agreement(self, cali, pipelines):
        # warm the compiled kernel outside the timed window
        grid_membership(cali, ConstraintCaps(0.5, 0.5), 4, 4, horizon=10.0)
        t0 = time.monotonic()
        fractions = {}
        for name, entry in pipelines.items():
            verdict = grid_membership(cali, entry["caps"], 200, 200, horizon=3000.0)
            agreement = compare(verdict, entry["adm"], entry["mrpi"], band=0.01)
            fractions[name] = (
                agreement.admissible.off_band_fraction,
                agreement.mrpi.off_band_fraction,
            )
        elapsed = time.monotonic() - t0
        ok = elapsed < 60.0 and all(
            fa >= 0.99 and fm >= 0.99 for fa, fm in fractions.values()
        )
        _report(
            "oracle agreement",
            ok,
            f"off-band fractions {fractions}, total {elapsed:.1f}s",
        )

    def test_set_inclusion_and_definitions(self, cali, pipelines):
        rng = np.random.default_rng(2024)
        details = []

        # invariant set contained in the admissible set, all scenarios
        inclusion = True
        for entry in pipelines.values():
            for v in entry["mrpi"].vertices:
                m = contains(entry["adm"], v, eps=1e-9)
                inclusion = inclusion and (
                    m.status is not MembershipStatus.OUTSIDE or m.distance <= 1e-9
                )
        details.append(f"inclusion={inclusion}")

        # 100 invariant-set interior points survive 50 random signals each
        cv = pipelines["comfortable_viable"]
        pts = np.array(sample_inside(cv["mrpi"], cv["caps"], 100, rng))
        robust_ok = True
        for _ in range(50):
            n_pieces = int(rng.integers(1, 9))
            ts = np.sort(rng.uniform(0.0, 3000.0, size=n_pieces - 1))
            us = rng.uniform(cali.u_min, cali.u_max, size=n_pieces)
            schedule = [(0.0, float(us[0]))] + [
                (float(t), float(u)) for t, u in zip(ts, us[1:])
            ]
            t_bad, _, _ = survival_schedule(cali, cv["caps"], pts, schedule, 3000.0)
            robust_ok = robust_ok and bool((t_bad < 0).all())
        details.append(f"robust_safety={robust_ok}")

        # 100 admissible-interior points survive the maximal input
        admissible_ok = True
        for name in ("comfortable", "comfortable_viable", "viable"):
            entry = pipelines[name]
            pts = np.array(sample_inside(entry["adm"], entry["caps"], 100, rng))
            t_bad, _, _ = survival(cali, entry["caps"], pts, cali.u_max, 3000.0)
            admissible_ok = admissible_ok and bool((t_bad < 0).all())
        details.append(f"admissible_safety={admissible_ok}")

        # 100 points outside the admissible set violate under the maximal input
        escape_ok = True
        worst = 0.0
        for name in ("comfortable_viable", "viable", "desperate"):
            entry = pipelines[name]
            pts = np.array(sample_outside(entry["adm"], entry["caps"], 100, rng))
            t_bad, _, _ = survival(
                cali, entry["caps"], pts, cali.u_max, 3000.0, freeze=False
            )
            escape_ok = escape_ok and bool((t_bad > 0).all())
            worst = max(worst, float(t_bad.max()))
        details.append(f"escape={escape_ok} (latest crossing {worst:.0f}d)")

        ok = inclusion and robust_ok and admissible_ok and escape_ok
        _report("set inclusion and definitions", ok, ", ".join(details))

    def test_equilibrium_checks(self, cali, caps_comfortable):
        eq = endemic_equilibrium(0.05, cali)
        f = vector_field(eq, 0.05, cali)
        residual = max(abs(f[0]), abs(f[1]))
        traj = simulate(cali, caps_comfortable, (0.5, 0.5), 0.05, 3000.0)
        dist = math.hypot(traj.final_state[0] - eq[0], traj.final_state[1] - eq[1])
        printed = math.hypot(traj.final_state[0] - 0.058580, traj.final_state[1] - 0.040612)
        ok = residual <= 1e-12 and dist <= 1e-4 and printed <= 1e-4
        _report(
            "equilibrium checks",
            ok,
            f"residual {residual:.1e}, |x(3000)-eq| {dist:.1e}",
        )

    def test_determinism(self, tmp_path, capsys):
        blobs = []
        for tag in ("run1", "run2"):
            d = tmp_path / tag
            d.mkdir()
            main(["classify", "cali_viable", "--json"])
            cls_out = capsys.readouterr().out
            main(["barrier", "cali_viable", "--set", "admissible",
                  "--out", str(d / "barrier.csv"), "--json-out", str(d / "barrier.json")])
            main(["region", "cali_comfortable_viable", "--out-dir", str(d / "regions")])
            main(["oracle", "cali_desperate", "--grid", "60",
                  "--out", str(d / "grid.csv"), "--pgm", str(d / "grid.pgm")])
            main(["simulate", "cali_comfortable", "--x0", "0.5,0.5",
                  "--u", "const:0.04", "--horizon", "100", "--out", str(d / "traj.csv")])
            capsys.readouterr()
            blob = cls_out.encode()
            for f in sorted(d.rglob("*")):
                if f.is_file():
                    blob += f.name.encode() + f.read_bytes()
            blobs.append(blob)
        ok = blobs[0] == blobs[1]
        _report("determinism", ok, f"{len(blobs[0])} artifact bytes compared")

    def test_secondary_service_fidelity(self, cali, caps_comfortable):
        # runs against the service alone; the browser frontend is not needed
        from fastapi.testclient import TestClient

        from epibarrier import load_scenario
        from epibarrier.service import create_app

        client = TestClient(create_app(load_scenario("cali_comfortable")))
        sid = client.post("/api/session", json={"x0": [0.4, 0.3]}).json()["id"]
        states = {}
        for k in range(1, 51):
            r = client.post(f"/api/session/{sid}/step", json={"u": 0.04, "dt": 1.0})
            states[float(k)] = tuple(r.json()["state"])
        direct = simulate(cali, caps_comfortable, (0.4, 0.3), 0.04, 50.0)
        worst = 0.0
        checked = 0
        for t, x, _ in direct.samples:
            if t in states:
                checked += 1
                worst = max(
                    worst, abs(states[t][0] - x[0]), abs(states[t][1] - x[1])
                )
        ok = checked == 50 and worst <= 1e-12
        _report(
            "service fidelity (secondary)",
            ok,
            f"50 steps vs direct simulation, max deviation {worst:.1e}",
        )
