#!/usr/bin/env python3
"""Regenerate the frontend contract fixtures from the real service.

Writes frontend/fixtures/case_descriptor.json (GET /api/case) and
frontend/fixtures/preset_reports.json (each stored preset request replayed
through POST /api/evaluate, timings zeroed for reproducibility).

Run from the repository root after changing the case file, the rule pack,
or the report schema:  python3 scripts/dump_ui_fixtures.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from iudex.service import create_app

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "frontend" / "fixtures"


def main() -> None:
    client = TestClient(create_app())
    descriptor = client.get("/api/case").json()
    reports = {}
    for preset in descriptor["presets"]:
        res = client.post("/api/evaluate", json=preset["request"])
        res.raise_for_status()
        doc = res.json()
        doc["timings_ms"] = 0.0
        reports[preset["id"]] = doc
    FIXTURES.mkdir(parents=True, exist_ok=True)
    (FIXTURES / "case_descriptor.json").write_text(
        json.dumps(descriptor, indent=2) + "\n", "utf-8")
    (FIXTURES / "preset_reports.json").write_text(
        json.dumps(reports, indent=2) + "\n", "utf-8")
    print(f"wrote {FIXTURES / 'case_descriptor.json'}")
    print(f"wrote {FIXTURES / 'preset_reports.json'}")


if __name__ == "__main__":
    main()
