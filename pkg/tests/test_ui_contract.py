"""Replay the console's recorded requests through the service and diff.

The frontend tests prove the preset buttons emit exactly the fixture
request bodies; this side proves those bodies still produce the fixture
reports, so the two ends cannot drift apart silently.  Regenerate the
fixtures with scripts/dump_ui_fixtures.py after intentional changes.
"""

import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from iudex.service import create_app

FIXTURES = Path(__file__).resolve().parent.parent / "frontend" / "fixtures"

pytestmark = pytest.mark.skipif(
    not FIXTURES.is_dir(), reason="frontend fixtures not generated"
)


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


@pytest.fixture(scope="module")
def descriptor():
    return json.loads((FIXTURES / "case_descriptor.json").read_text("utf-8"))


@pytest.fixture(scope="module")
def recorded_reports():
    return json.loads((FIXTURES / "preset_reports.json").read_text("utf-8"))


def test_descriptor_fixture_is_current(client, descriptor):
    assert client.get("/api/case").json() == descriptor


def test_recorded_requests_reproduce_recorded_reports(client, descriptor, recorded_reports):
    assert {p["id"] for p in descriptor["presets"]} == set(recorded_reports)
    for preset in descriptor["presets"]:
        live = client.post("/api/evaluate", json=preset["request"]).json()
        live["timings_ms"] = 0.0
        assert live == recorded_reports[preset["id"]], preset["id"]


def test_recorded_verdicts_match_expected_outcomes(descriptor, recorded_reports):
    for preset in descriptor["presets"]:
        assert recorded_reports[preset["id"]]["verdict"] == preset["expected"]
