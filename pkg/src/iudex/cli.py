"""Command-line front door.

Exit status: 0 when the verdict is responsible (or, with --suite, when
every preset matches its expected outcome), 1 when acquitted (or a preset
mismatched), 2 on input errors.  This lets shell scripts assert verdicts
without parsing output.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence, Union

from .errors import CaseSyntaxError, InvalidScenario, IudexError, PolicyViolation
from .legal import POLICY_FIELDS
from .scenario import (
    ScenarioSpec,
    bundled_case_path,
    load_case,
    report_to_dict,
    report_to_text,
    run_case_suite,
    run_scenario,
    verdict_word,
)

EXIT_RESPONSIBLE = 0
EXIT_ACQUITTED = 1
EXIT_INPUT_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iudex",
        description="Load a case file, apply a what-if scenario, and adjudicate it.",
    )
    parser.add_argument("--case", default=None, metavar="PATH",
                        help="case file to load (default: the bundled Valjean case)")
    parser.add_argument("--enable", default=None, metavar="TAGS",
                        help="comma-separated evidence tags to enable (default: all)")
    parser.add_argument("--reliability", action="append", default=[], metavar="NAME=hi|lo",
                        help="override a witness reliability (repeatable)")
    parser.add_argument("--policy", action="append", default=[], metavar="KEY=VALUE",
                        help="override a policy setting (repeatable)")
    parser.add_argument("--suspect", default=None, metavar="NAME",
                        help="suspect to adjudicate (default: the file's suspect)")
    parser.add_argument("--format", choices=("text", "json"), default="text",
                        help="output format (json is the stable structured schema)")
    parser.add_argument("--explain", action="store_true",
                        help="include the proof tree when the verdict is responsible")
    parser.add_argument("--suite", action="store_true",
                        help="run the preset scenarios stored in the case file")
    return parser


def _parse_reliability(pairs: Sequence[str]) -> dict[str, str]:
    out: dict[str, str] = {}
    for pair in pairs:
        name, sep, level = pair.partition("=")
        if not sep or not name:
            raise InvalidScenario({"reliability": f"expected NAME=hi|lo, got {pair!r}"})
        out[name] = level
    return out


def _parse_policy(pairs: Sequence[str]) -> dict[str, Union[int, bool]]:
    out: dict[str, Union[int, bool]] = {}
    for pair in pairs:
        key, sep, raw = pair.partition("=")
        if not sep or not key:
            raise InvalidScenario({"policy": f"expected KEY=VALUE, got {pair!r}"})
        if key not in POLICY_FIELDS:
            raise InvalidScenario({f"policy.{key}": f"unknown policy setting {key!r}"})
        if raw in ("true", "false"):
            out[key] = raw == "true"
        else:
            try:
                out[key] = int(raw)
            except ValueError:
                raise InvalidScenario(
                    {f"policy.{key}": f"expected an integer or true/false, got {raw!r}"}
                ) from None
    return out


def _print_syntax_errors(path: str, exc: CaseSyntaxError) -> None:
    for err in exc.errors:
        print(f"{path}:{err.line}:{err.column}: {err.message}", file=sys.stderr)


def _run_suite(case_path: str, fmt: str) -> int:
    results = run_case_suite(load_case(case_path))
    if fmt == "json":
        print(json.dumps([
            {"question": r.question, "expected": r.expected,
             "actual": r.actual, "pass": r.passed}
            for r in results
        ], indent=2))
    else:
        for r in results:
            word = "PASS" if r.passed else "FAIL"
            print(f"{r.question}: expected={r.expected} actual={r.actual} {word}")
        passed = sum(r.passed for r in results)
        print(f"{passed}/{len(results)} presets match")
    return 0 if all(r.passed for r in results) else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    case_path = args.case or str(bundled_case_path())
    try:
        if args.suite:
            return _run_suite(case_path, args.format)
        enabled = None
        if args.enable is not None:
            enabled = frozenset(t for t in (s.strip() for s in args.enable.split(",")) if t)
        spec = ScenarioSpec(
            case_path=case_path,
            enabled_tags=enabled,
            reliability_overrides=_parse_reliability(args.reliability),
            policy_overrides=_parse_policy(args.policy),
            suspect=args.suspect,
            explain=args.explain,
        )
        report = run_scenario(spec)
    except CaseSyntaxError as exc:
        _print_syntax_errors(case_path, exc)
        return EXIT_INPUT_ERROR
    except (InvalidScenario, PolicyViolation) as exc:
        for field, message in (exc.fields or {"input": str(exc)}).items():
            print(f"error: {field}: {message}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (FileNotFoundError, IudexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    if args.format == "json":
        print(json.dumps(report_to_dict(report), indent=2))
    else:
        print(report_to_text(report))
    return EXIT_RESPONSIBLE if verdict_word(report.verdict) == "responsible" else EXIT_ACQUITTED


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
