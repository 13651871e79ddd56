"""FastAPI surface: schemas, routing, error mapping, determinism."""

from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from chengsym.service.app import app

client = TestClient(app)


class TestHealth:
    def test_health(self):
        response = client.get("/health")
        assert response.status_code == 200
        body = response.json()
        assert body["status"] == "ok"
        assert body["version"]


class TestVerifySymmetries:
    def test_full_suite_passes(self):
        response = client.post("/verify-symmetries", json={})
        assert response.status_code == 200
        body = response.json()
        assert body["all_passed"] is True
        labels = {row["label"] for row in body["results"]}
        assert "cheng/general-x" in labels
        assert "iib-ode/log-scaling" in labels
        assert body["warnings"]

    def test_single_system_filter(self):
        response = client.post("/verify-symmetries", json={"system": "cheng"})
        assert response.status_code == 200
        assert all(r["system"] == "cheng" for r in response.json()["results"])

    def test_instantiated_family(self):
        response = client.post("/verify-symmetries", json={"system": "cheng", "g": "x^2"})
        body = response.json()
        row = next(r for r in body["results"] if "g=x^2" in r["label"])
        assert row["ok"] is True

    def test_non_symmetry_field_reported(self):
        response = client.post(
            "/verify-symmetries", json={"system": "cheng", "field": "d/du"}
        )
        assert response.status_code == 200
        assert response.json()["all_passed"] is False

    def test_field_without_system_rejected(self):
        response = client.post("/verify-symmetries", json={"field": "d/du"})
        assert response.status_code == 422

    def test_unknown_system_rejected(self):
        response = client.post("/verify-symmetries", json={"system": "nope"})
        assert response.status_code == 404

    def test_field_syntax_error(self):
        response = client.post(
            "/verify-symmetries", json={"system": "cheng", "field": "(((d/du"}
        )
        assert response.status_code == 400


class TestReduce:
    @pytest.mark.parametrize("case", ["case1", "case2a", "case2b", "general-I", "general-II"])
    def test_cases_verify(self, case):
        response = client.post("/reduce", json={"case": case})
        assert response.status_code == 200
        body = response.json()
        assert body["ok"] is True
        assert all(v["ok"] for v in body["verifications"])

    def test_case1_chart_reduction(self):
        response = client.post(
            "/reduce", json={"case": "case1", "chart": "canonical", "generator": 1}
        )
        body = response.json()
        assert body["chart_reductions"][0]["derived"]["tag"] == "RiccatiFirstOrder"
        assert body["chart_reductions"][0]["matches_printed"] is True

    def test_case2b_invariant_chart(self):
        response = client.post(
            "/reduce", json={"case": "case2b", "chart": "invariants", "generator": 1}
        )
        body = response.json()
        assert body["chart_reductions"][0]["derived"]["tag"] == "EulerLinearFirstOrder"

    def test_space_dep_selects_exactly_one_form(self):
        response = client.post("/reduce", json={"case": "space-dep", "c": "x"})
        body = response.json()
        assert body["ok"] is True
        assert body["selected_form"] == "derived"
        names = {v["name"]: v["ok"] for v in body["verifications"]}
        assert names["space-dep/canonical->derived-form"] is True
        assert names["space-dep/canonical->printed-form"] is False

    def test_unknown_case(self):
        assert client.post("/reduce", json={"case": "case9"}).status_code == 404


class TestSolve:
    def test_riccati_check(self):
        response = client.post("/solve", json={"target": "riccati", "check": True})
        body = response.json()
        assert response.status_code == 200
        assert body["ok"] is True
        assert body["check_max_deviation"] < 1e-8

    def test_travelling_report(self):
        response = client.post("/solve", json={
            "target": "travelling", "form": "derived", "report": True,
            "grid": {"t_min": -1, "t_max": 1, "x_min": -1, "x_max": 1, "nt": 41, "nx": 41},
        })
        body = response.json()
        assert body["residual_report"]["max_residual"] < 1e-10
        assert body["closed_form"]["u"]

    def test_paper_form_with_fast_speed_warns_but_succeeds(self):
        response = client.post("/solve", json={
            "target": "travelling", "form": "printed", "report": True,
            "params": {"c": 2.0},
            "grid": {"t_min": -1, "t_max": 1, "x_min": -1, "x_max": 1, "nt": 31, "nx": 31},
        })
        body = response.json()
        assert response.status_code == 200
        assert body["ok"] is True
        assert body["warnings"]

    def test_abel_target(self):
        response = client.post("/solve", json={
            "target": "abel2", "case": "case1", "span": [1.0, 1.5], "ic": [1.0],
        })
        body = response.json()
        assert body["trajectory"]["status"] == "completed"

    def test_second_order_catalog_target_integrates_in_phase_space(self):
        response = client.post("/solve", json={
            "target": "case1.ode2", "span": [1.0, 2.0], "ic": [1.0, 0.5],
        })
        body = response.json()
        assert response.status_code == 200
        assert body["trajectory"]["status"] == "completed"
        assert len(body["trajectory"]["y_end"]) == 2

    def test_derived_catalog_targets_resolve(self):
        for target in ("case2a.riccati", "space-dep.riccati"):
            response = client.post("/solve", json={
                "target": target, "span": [1.0, 1.5], "ic": [0.5],
            })
            assert response.status_code == 200, target

    def test_unknown_target(self):
        assert client.post("/solve", json={"target": "nonsense"}).status_code == 404

    def test_check_without_closed_form_rejected(self):
        response = client.post("/solve", json={"target": "abel1", "check": True,
                                               "span": [1.0, 1.2], "ic": [0.3]})
        assert response.status_code == 422


class TestReport:
    def test_general_solution_report(self):
        response = client.post("/report", json={
            "solution": "general", "g": "1/(2*x)",
            "grid": {"nt": 31, "nx": 31},
        })
        body = response.json()
        assert response.status_code == 200
        assert body["max_residual"] < 1e-8

    def test_byte_identical_responses(self):
        payload = {"solution": "travelling", "form": "derived",
                   "params": {"seed": 42}, "grid": {"nt": 21, "nx": 21}}
        first = client.post("/report", json=payload)
        second = client.post("/report", json=payload)
        assert first.content == second.content
