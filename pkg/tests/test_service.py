import pytest
from fastapi.testclient import TestClient

from epibarrier import (
    Action,
    load_scenario,
    recommend,
    simulate,
)
from epibarrier.region import compute_regions
from epibarrier.service import create_app


@pytest.fixture(scope="module")
def comfortable_client():
    return TestClient(create_app(load_scenario("cali_comfortable")))


@pytest.fixture(scope="module")
def viable_client():
    return TestClient(create_app(load_scenario("cali_viable")))


@pytest.fixture(scope="module")
def desperate_client():
    return TestClient(create_app(load_scenario("cali_desperate")))


def new_session(client, x0, mode="manual"):
    r = client.post("/api/session", json={"x0": list(x0), "mode": mode})
    assert r.status_code == 200
    return r.json()["id"]


class TestStaticEndpoints:
    def test_scenario(self, comfortable_client):
        data = comfortable_client.get("/api/scenario").json()
        assert data["model"]["A_m"] == 0.076608
        assert data["caps"]["xbar1"] == 0.7

    def test_classification(self, viable_client):
        data = viable_client.get("/api/classification").json()
        assert data["case"] == "viable"
        assert data["active_face"] == "g1"

    def test_regions(self, viable_client):
        data = viable_client.get("/api/regions").json()
        assert data["case"] == "viable"
        assert data["efficiency_ratio"] == 0.0
        assert len(data["admissible"]["vertices"]) > 50
        assert data["mrpi"]["vertices"] == [[0.0, 0.0]]

    def test_barriers(self, viable_client, comfortable_client):
        data = viable_client.get("/api/barriers").json()
        assert data["admissible"]["set_kind"] == "admissible"
        assert data["mrpi"] is None
        data = comfortable_client.get("/api/barriers").json()
        assert data == {"admissible": None, "mrpi": None}

    def test_desperate_regions_flagged(self, desperate_client):
        data = desperate_client.get("/api/regions").json()
        assert data["case"] == "desperate"
        assert data["efficiency_ratio"] is None
        assert data["admissible"]["vertices"] == [[0.0, 0.0]]


class TestSessions:
    def test_step_matches_direct_simulation(self, comfortable_client):
        sc = load_scenario("cali_comfortable")
        sid = new_session(comfortable_client, (0.5, 0.5))
        state = None
        for _ in range(5):
            r = comfortable_client.post(
                f"/api/session/{sid}/step", json={"u": 0.04, "dt": 1.0}
            )
            state = r.json()["state"]
        direct = simulate(sc.params, sc.caps, (0.5, 0.5), 0.04, 5.0)
        assert tuple(state) == direct.final_state

    def test_fifty_steps_reproduce_cli_trajectory(self, comfortable_client):
        # the secondary-component fidelity bound is 1e-12; chaining is exact
        sc = load_scenario("cali_comfortable")
        sid = new_session(comfortable_client, (0.4, 0.3))
        states = {}
        for k in range(1, 51):
            r = comfortable_client.post(
                f"/api/session/{sid}/step", json={"u": 0.04, "dt": 1.0}
            )
            states[float(k)] = tuple(r.json()["state"])
        direct = simulate(sc.params, sc.caps, (0.4, 0.3), 0.04, 50.0)
        checked = 0
        for t, x, _ in direct.samples:
            if t in states:
                checked += 1
                assert abs(states[t][0] - x[0]) <= 1e-12
                assert abs(states[t][1] - x[1]) <= 1e-12
        assert checked == 50

    def test_clamping_flagged(self, comfortable_client):
        sid = new_session(comfortable_client, (0.2, 0.2))
        r = comfortable_client.post(f"/api/session/{sid}/step", json={"u": 0.9, "dt": 1.0})
        body = r.json()
        assert body["clamped"] is True
        assert body["u_applied"] == 0.05
        r = comfortable_client.post(f"/api/session/{sid}/step", json={"u": 0.001, "dt": 1.0})
        assert r.json()["u_applied"] == 0.0333

    def test_advice_matches_policy_module(self, viable_client):
        sc = load_scenario("cali_viable")
        cls, _curves, adm, mrpi = compute_regions(sc.params, sc.caps)
        sid = new_session(viable_client, (0.05, 0.08))
        for _ in range(10):
            r = viable_client.post(
                f"/api/session/{sid}/step", json={"u": 0.04, "dt": 2.0}
            )
            body = r.json()
            want = recommend(tuple(body["state"]), adm, mrpi, cls, sc.caps, eps=0.005)
            assert body["advice"]["action"] == want.action.value

    def test_sessions_isolated(self, comfortable_client):
        a = new_session(comfortable_client, (0.5, 0.5))
        b = new_session(comfortable_client, (0.3, 0.1))
        sa = sb = None
        for _ in range(4):
            sa = comfortable_client.post(
                f"/api/session/{a}/step", json={"u": 0.04, "dt": 1.0}
            ).json()["state"]
            sb = comfortable_client.post(
                f"/api/session/{b}/step", json={"u": 0.05, "dt": 1.0}
            ).json()["state"]
        c = new_session(comfortable_client, (0.5, 0.5))
        for _ in range(4):
            sc_state = comfortable_client.post(
                f"/api/session/{c}/step", json={"u": 0.04, "dt": 1.0}
            ).json()["state"]
        assert sa == sc_state
        assert sa != sb

    def test_history_grows(self, comfortable_client):
        sid = new_session(comfortable_client, (0.2, 0.2))
        for _ in range(3):
            comfortable_client.post(f"/api/session/{sid}/step", json={"u": 0.04, "dt": 1.0})
        body = comfortable_client.get(f"/api/session/{sid}").json()
        assert len(body["history"]) == 4
        assert body["history"][0]["u"] is None
        assert body["t"] == 3.0

    def test_reset(self, comfortable_client):
        sid = new_session(comfortable_client, (0.2, 0.2))
        comfortable_client.post(f"/api/session/{sid}/step", json={"u": 0.04, "dt": 1.0})
        r = comfortable_client.post(f"/api/session/{sid}/reset", json={"x0": [0.1, 0.1]})
        assert r.status_code == 200
        body = comfortable_client.get(f"/api/session/{sid}").json()
        assert body["t"] == 0.0
        assert body["state"] == [0.1, 0.1]
        assert len(body["history"]) == 1

    def test_policy_mode_steps(self, viable_client):
        sid = new_session(viable_client, (0.05, 0.08), mode="policy")
        r = viable_client.post(f"/api/session/{sid}/step", json={"dt": 5.0})
        assert r.status_code == 200
        assert r.json()["u_applied"] in (0.0333, 0.05)

    def test_violation_then_conflict(self, desperate_client):
        sid = new_session(desperate_client, (0.1, 0.035))
        r = desperate_client.post(f"/api/session/{sid}/step", json={"u": 0.05, "dt": 10.0})
        assert r.status_code == 200
        assert r.json()["violation"]["face"] == "g3"
        assert r.json()["advice"]["action"] == Action.RELAX_CAPS_OR_INCREASE_FUMIGATION.value
        r = desperate_client.post(f"/api/session/{sid}/step", json={"u": 0.05, "dt": 1.0})
        assert r.status_code == 409
        assert r.json()["violation"]["face"] == "g3"
        # reset clears the violation
        desperate_client.post(f"/api/session/{sid}/reset", json={"x0": [0.01, 0.01]})
        r = desperate_client.post(f"/api/session/{sid}/step", json={"u": 0.05, "dt": 1.0})
        assert r.status_code == 200


class TestErrors:
    def test_unknown_session(self, comfortable_client):
        assert comfortable_client.get("/api/session/zzz").status_code == 404
        r = comfortable_client.post("/api/session/zzz/step", json={"u": 0.04, "dt": 1.0})
        assert r.status_code == 404
        assert r.json()["code"] == "unknown_session"

    def test_bad_bodies(self, comfortable_client):
        sid = new_session(comfortable_client, (0.2, 0.2))
        for body in ({"u": 0.04, "dt": 0.0}, {"u": 0.04, "dt": 11.0},
                     {"u": "high", "dt": 1.0}, {"dt": 1.0}):
            r = comfortable_client.post(f"/api/session/{sid}/step", json=body)
            assert r.status_code == 400, body
        r = comfortable_client.post("/api/session", json={"x0": [2.0, 0.1]})
        assert r.status_code == 400
        r = comfortable_client.post("/api/session", json={"x0": [0.1]})
        assert r.status_code == 400
        r = comfortable_client.post("/api/session", json={"x0": [0.1, 0.1], "mode": "auto"})
        assert r.status_code == 400


class TestEviction:
    def test_oldest_session_evicted_past_capacity(self, monkeypatch):
        import epibarrier.service as service_mod

        monkeypatch.setattr(service_mod, "MAX_SESSIONS", 3)
        client = TestClient(create_app(load_scenario("cali_comfortable")))
        ids = [new_session(client, (0.2, 0.2)) for _ in range(4)]
        r = client.post(f"/api/session/{ids[0]}/step", json={"u": 0.04, "dt": 1.0})
        assert r.status_code == 404
        r = client.post(f"/api/session/{ids[-1]}/step", json={"u": 0.04, "dt": 1.0})
        assert r.status_code == 200
