#!/usr/bin/env python3
"""Export a scripted steering walkthrough of the viable scenario.

Drives the HTTP service exactly as the web UI would (manual mode, constant
slider at the minimal rate) until the state leaves the admissible set, and
freezes each step response plus the independently computed recommendation.
The frontend unit tests replay this fixture to check banner transitions.
"""
import json
from pathlib import Path

from fastapi.testclient import TestClient

from epibarrier import in_box, load_scenario, recommend
from epibarrier.policy import DEFAULT_BAND
from epibarrier.region import compute_regions
from epibarrier.service import create_app

OUT = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"


def main() -> None:
    scenario = load_scenario("cali_viable")
    cls, _curves, adm, mrpi = compute_regions(scenario.params, scenario.caps)
    client = TestClient(create_app(scenario))

    x0 = [0.05, 0.08]
    sid = client.post("/api/session", json={"x0": x0}).json()["id"]
    steps = []
    u = scenario.params.u_min
    for _ in range(240):
        r = client.post(f"/api/session/{sid}/step", json={"u": u, "dt": 5.0})
        if r.status_code != 200:
            break
        body = r.json()
        state = tuple(body["state"])
        if in_box(state, scenario.caps):
            expected = recommend(state, adm, mrpi, cls, scenario.caps, eps=DEFAULT_BAND).action.value
        else:
            expected = "relax_caps_or_increase_fumigation"
        assert body["advice"]["action"] == expected
        steps.append(
            {
                "t": body["t"],
                "u": u,
                "state": body["state"],
                "advice": body["advice"]["action"],
                "violation": body["violation"],
            }
        )
        if body["violation"] is not None:
            break

    regions = client.get("/api/regions").json()
    fixture = {
        "scenario": "cali_viable",
        "x0": x0,
        "steps": steps,
        "regions": regions,
        "actions_seen": sorted({s["advice"] for s in steps}),
    }
    OUT.mkdir(parents=True, exist_ok=True)
    path = OUT / "viable_walkthrough.json"
    path.write_text(json.dumps(fixture, indent=1))
    print(f"wrote {path} with {len(steps)} steps; actions {fixture['actions_seen']}")


if __name__ == "__main__":
    main()
