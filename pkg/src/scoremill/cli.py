"""Command line interface.

JSON results go to stdout, diagnostics to stderr. Exit codes: 0 success,
1 domain error, 2 usage error, 3 validation errors found.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .api import create_app
from .errors import EngineError
from .model import decode_record, encode_model, model_summary
from .numeric import json_loads_exact
from .pipeline import (
    HALT,
    SKIP_AND_REPORT,
    ScoreRequest,
    csv_to_request_lines,
    default_parallelism,
    score_batch,
    score_one,
)
from .registry import Registry, get_model, load_registry
from .scoring import explain
from .validation import validate_document

DEFAULT_ADDR = "127.0.0.1:8080"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--models-dir",
        help="directory of model files (defaults to SCORING_MODELS_DIR)",
    )

    parser = argparse.ArgumentParser(prog="scoremill", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", parents=[common], help="run the HTTP API")
    serve.add_argument("--addr", help="listen address host:port (defaults to SCORING_LISTEN_ADDR)")

    score = sub.add_parser("score", parents=[common], help="score one record")
    score.add_argument("--model", type=int, help="explicit model id (otherwise auto-selected)")
    score.add_argument("--application", required=True, help="application id")
    score.add_argument("--record", required=True, help="record JSON file")
    score.add_argument("--co-record", help="co-applicant record JSON file")
    score.add_argument("--kpis", help="comma-separated KPI list")
    score.add_argument("--explain", action="store_true", help="print explanation text instead of JSON")

    batch = sub.add_parser("batch", parents=[common], help="score a file of requests")
    batch.add_argument("--input", required=True, help="input file (NDJSON or CSV)")
    batch.add_argument("--output", required=True, help="output NDJSON file")
    batch.add_argument("--format", choices=["ndjson", "csv"], default="ndjson")
    batch.add_argument("--on-error", choices=["halt", "skip"], default="skip")
    batch.add_argument("--parallelism", type=int, help="worker count (defaults to SCORING_BATCH_PARALLELISM)")
    batch.add_argument("--application", help="application id for CSV rows")
    batch.add_argument("--model", type=int, help="model id for CSV rows")
    batch.add_argument("--record-id-column", default="record_id", help="CSV column holding the record id")

    models = sub.add_parser("models", help="inspect and validate models")
    models_sub = models.add_subparsers(dest="models_command", required=True)
    models_sub.add_parser("list", parents=[common], help="list model summaries")
    show = models_sub.add_parser("show", parents=[common], help="print one model document")
    show.add_argument("model_id", type=int)
    validate = models_sub.add_parser("validate", parents=[common], help="validate a file or the whole directory")
    validate.add_argument("file", nargs="?", help="model JSON file (defaults to every file in the models dir)")

    return parser


def _models_dir(args) -> str:
    directory = args.models_dir or os.environ.get("SCORING_MODELS_DIR")
    if not directory:
        print("error: --models-dir or SCORING_MODELS_DIR is required", file=sys.stderr)
        raise SystemExit(2)
    return directory


def _cmd_serve(args) -> int:
    import uvicorn

    addr = args.addr or os.environ.get("SCORING_LISTEN_ADDR") or DEFAULT_ADDR
    host, _, port_text = addr.rpartition(":")
    if not host or not port_text.isdigit():
        print(f"error: bad listen address {addr!r}", file=sys.stderr)
        return 2
    registry = Registry(_models_dir(args))
    app = create_app(registry, console_origin=os.environ.get("SCORING_CONSOLE_ORIGIN"))
    uvicorn.run(app, host=host, port=int(port_text), log_level="info")
    return 0


def _load_record(path: str):
    text = Path(path).read_text(encoding="utf-8")
    return decode_record(json_loads_exact(text), path)


def _cmd_score(args) -> int:
    snapshot = load_registry(_models_dir(args))
    kpis = tuple(k.strip() for k in args.kpis.split(",") if k.strip()) if args.kpis else ()
    request = ScoreRequest(
        application_id=args.application,
        record=_load_record(args.record),
        model_id=args.model,
        kpi_list=kpis,
        co_record=_load_record(args.co_record) if args.co_record else None,
    )
    result = score_one(snapshot, request)
    if args.explain:
        print(explain(result))
    else:
        print(json.dumps(result.to_doc(), indent=2, ensure_ascii=False))
    return 0


def _cmd_batch(args) -> int:
    snapshot = load_registry(_models_dir(args))
    policy = HALT if args.on_error == "halt" else SKIP_AND_REPORT
    parallelism = args.parallelism or default_parallelism()
    with open(args.input, encoding="utf-8", newline="") as infile:
        if args.format == "csv":
            if not args.application:
                print("error: --application is required for CSV input", file=sys.stderr)
                return 2
            lines = csv_to_request_lines(
                infile,
                application_id=args.application,
                model_id=args.model,
                record_id_column=args.record_id_column,
            )
        else:
            lines = (line.rstrip("\n") for line in infile)
        with open(args.output, "w", encoding="utf-8") as outfile:
            report = score_batch(snapshot, lines, outfile, policy, parallelism)
    print(json.dumps(report.to_doc(), indent=2, ensure_ascii=False))
    return 1 if policy == HALT and report.failed else 0


def _cmd_models(args) -> int:
    if args.models_command == "list":
        snapshot = load_registry(_models_dir(args))
        summaries = [model_summary(snapshot.models[mid]) for mid in sorted(snapshot.models)]
        print(json.dumps(summaries, indent=2, ensure_ascii=False))
        return 0
    if args.models_command == "show":
        snapshot = load_registry(_models_dir(args))
        model = get_model(snapshot, args.model_id)
        print(json.dumps(encode_model(model), indent=2, ensure_ascii=False))
        return 0
    return _cmd_models_validate(args)


def _validate_file(path: Path) -> list[dict]:
    try:
        doc = json_loads_exact(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        return [
            {
                "severity": "error",
                "code": "invalid_document",
                "message": f"cannot parse {path}: {exc}",
                "location": "$",
            }
        ]
    return [f.to_doc() for f in validate_document(doc)]


def _cmd_models_validate(args) -> int:
    if args.file:
        targets = [Path(args.file)]
    else:
        directory = Path(_models_dir(args))
        targets = sorted(directory.glob("model-*.json"))
    results = []
    any_errors = False
    for path in targets:
        findings = _validate_file(path)
        any_errors = any_errors or any(f["severity"] == "error" for f in findings)
        results.append({"path": str(path), "findings": findings})
    print(json.dumps(results if not args.file else results[0], indent=2, ensure_ascii=False))
    return 3 if any_errors else 0


def run_cli(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "serve":
            return _cmd_serve(args)
        if args.command == "score":
            return _cmd_score(args)
        if args.command == "batch":
            return _cmd_batch(args)
        if args.command == "models":
            return _cmd_models(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except EngineError as exc:
        print(json.dumps(exc.to_doc(), ensure_ascii=False), file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


def main():
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
