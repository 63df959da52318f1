"""Stateless what-if evaluation service.

One immutable knowledge-base snapshot is loaded at startup; every request
derives its own snapshot, so handlers share nothing mutable and concurrent
evaluations need no locking.  Responses use the same structured schema as
the CLI's --format json, so the browser console has exactly one contract.
"""

from __future__ import annotations

import argparse
from pathlib import Path
from typing import Optional, Union

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .errors import InvalidScenario, PolicyViolation
from .scenario import Case, bundled_case_path, evaluate, load_case, report_to_dict


class EvaluateRequest(BaseModel):
    enabled_tags: Optional[list[str]] = None
    reliability_overrides: dict[str, str] = Field(default_factory=dict)
    policy_overrides: dict[str, Union[bool, int]] = Field(default_factory=dict)
    explain: bool = False


def case_descriptor(case: Case) -> dict:
    evidences = []
    for tag in case.tags:
        participants = sorted({
            name for cl in case.kb.clauses if cl.tag == tag
            for name in _participants_of(cl.head)
        })
        evidences.append({
            "tag": tag,
            "summary": case.summaries.get(tag, ""),
            "witnesses": participants,
        })
    return {
        "case_id": case.case_id,
        "suspect": case.suspect,
        "evidences": evidences,
        "witnesses": dict(sorted(case.witnesses.items())),
        "policy": case.policy.as_dict(),
        "presets": [
            {
                "id": p.id,
                "expected": p.expected,
                "request": {
                    "enabled_tags": sorted(p.enabled_tags),
                    "reliability_overrides": dict(sorted(p.reliability_overrides.items())),
                    "policy_overrides": {},
                    "explain": False,
                },
            }
            for p in case.presets
        ],
    }


def _participants_of(head) -> list[str]:
    from .terms import Atom, Compound

    found = []
    if isinstance(head, Compound):
        for arg in head.args:
            if (isinstance(arg, Compound) and arg.functor in ("witness", "source")
                    and len(arg.args) == 1 and isinstance(arg.args[0], Atom)):
                found.append(arg.args[0].symbol)
    return found


def _field_errors(exc: Union[InvalidScenario, PolicyViolation]) -> list[dict]:
    return [{"field": field, "message": message} for field, message in exc.fields.items()]


def create_app(case_path: Union[str, Path, None] = None,
               static_dir: Union[str, Path, None] = None) -> FastAPI:
    """Build the service around one case file (the bundled case by default).

    Raises CaseSyntaxError if the case file does not parse: the service
    refuses to start.
    """
    case = load_case(case_path or bundled_case_path())
    app = FastAPI(title="iudex what-if service")

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok", "case": case.case_id}

    @app.get("/api/case")
    def get_case() -> dict:
        return case_descriptor(case)

    @app.post("/api/evaluate")
    def post_evaluate(body: EvaluateRequest) -> dict:
        return _evaluate(
            enabled_tags=None if body.enabled_tags is None else frozenset(body.enabled_tags),
            reliability_overrides=body.reliability_overrides,
            policy_overrides=body.policy_overrides,
            explain=body.explain,
        )

    @app.get("/api/presets/{preset_id}/evaluate")
    def evaluate_preset(preset_id: str) -> dict:
        for preset in case.presets:
            if preset.id == preset_id.upper():
                return _evaluate(
                    enabled_tags=frozenset(preset.enabled_tags),
                    reliability_overrides=preset.reliability_overrides,
                    policy_overrides={},
                    explain=False,
                )
        raise HTTPException(status_code=404, detail=f"unknown preset {preset_id!r}")

    def _evaluate(enabled_tags, reliability_overrides, policy_overrides, explain) -> dict:
        try:
            report = evaluate(
                case,
                enabled_tags=enabled_tags,
                reliability_overrides=reliability_overrides,
                policy_overrides=policy_overrides,
                explain=explain,
            )
        except InvalidScenario as exc:
            raise HTTPException(status_code=400, detail=_field_errors(exc)) from exc
        except PolicyViolation as exc:
            raise HTTPException(status_code=422, detail=_field_errors(exc)) from exc
        return report_to_dict(report)

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="console")
    return app


def main(argv: Optional[list[str]] = None) -> None:
    parser = argparse.ArgumentParser(prog="iudex-serve",
                                     description="Serve the what-if evaluation API.")
    parser.add_argument("--case", default=None, metavar="PATH",
                        help="case file to serve (default: the bundled Valjean case)")
    parser.add_argument("--listen", default="127.0.0.1:8000", metavar="HOST:PORT")
    parser.add_argument("--static", default=None, metavar="DIR",
                        help="built console assets to mount at / (e.g. frontend/dist)")
    args = parser.parse_args(argv)
    host, _, port = args.listen.rpartition(":")
    import uvicorn

    app = create_app(args.case, args.static)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))


if __name__ == "__main__":
    main()
