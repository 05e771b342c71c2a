"""Command-line entry point: manifest in, digestibles/report/service out.

Subcommands mirror the four analyses plus report/serve/verify. Every run is
reproducible: (manifest, argv, seed) fully determines the output bytes.
Exit codes: 0 ok, 1 runtime error, 2 usage error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .report import REPORT_EXTENSION, canonical_json, render_html, verify_report
from .session import MODEL_CMD_ENV, Session

DEFAULT_BIND = "127.0.0.1:8765"


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--manifest", required=True, help="path to the project manifest JSON")
    parser.add_argument("--seed", type=int, default=0, help="global seed echoed into provenance (default 0)")
    parser.add_argument(
        "--model-cmd",
        default=None,
        help=f"external model command (fallback: ${MODEL_CMD_ENV}, else built-in baseline)",
    )
    parser.add_argument("-o", "--output", default=None, help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="explabox",
        description="Audit black-box text models: explore, examine, explain, expose.",
    )
    parser.add_argument("--version", action="version", version=f"explabox {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_explore = sub.add_parser("explore", help="descriptive statistics for one split")
    _add_common(p_explore)
    p_explore.add_argument("--split", required=True, help="split name")
    p_explore.add_argument("--k-top", type=int, default=10, help="number of top tokens (default 10)")

    p_examine = sub.add_parser("examine", help="performance metrics for one split")
    _add_common(p_examine)
    p_examine.add_argument("--split", required=True, help="split name")

    p_explain = sub.add_parser("explain", help="local attribution or global summary")
    _add_common(p_explain)
    p_explain.add_argument(
        "--method",
        required=True,
        choices=["lime", "kernelshap", "exact-shapley", "token-frequency", "token-information", "prototypes", "criticisms"],
        help="explanation method",
    )
    p_explain.add_argument("--instance", default=None, help="instance id (local methods)")
    p_explain.add_argument("--text", default=None, help="raw what-if text (local methods)")
    p_explain.add_argument("--target-label", default=None, help="class whose probability is explained")
    p_explain.add_argument("--split", default=None, help="split name (global methods)")
    p_explain.add_argument("--k", type=int, default=None, help="top-k tokens / number of prototypes")
    p_explain.add_argument("--params", default=None, help="method params as inline JSON object")

    p_expose = sub.add_parser("expose", help="run behavioral/security/fairness tests")
    _add_common(p_expose)
    p_expose.add_argument("--suite", default=None, help="test-suite spec file (JSON list)")
    p_expose.add_argument("--fuzz", action="store_true", help="run the security fuzz corpus")
    p_expose.add_argument("--fairness-attribute", default=None, help="protected attribute for fairness metrics")
    p_expose.add_argument("--split", default=None, help="split for fairness metrics (default: eval split)")
    p_expose.add_argument("--positive-label", default=None, help="designated positive label (default: last label)")
    p_expose.add_argument("--loss", default="mae", choices=["mae", "mse"], help="regression fairness loss")

    p_report = sub.add_parser("report", help="run all four analyses and emit a full report")
    _add_common(p_report)
    p_report.add_argument("--format", default="json", choices=["json", "html"], help="output format")
    p_report.add_argument(
        "--timestamp",
        action="store_true",
        help="stamp the real creation time (default: fixed epoch for byte-reproducibility)",
    )

    p_serve = sub.add_parser("serve", help="serve the HTTP API (and UI when built)")
    _add_common(p_serve)
    p_serve.add_argument("--bind", default=DEFAULT_BIND, help=f"host:port (default {DEFAULT_BIND})")
    p_serve.add_argument("--frontend", default=None, help="directory with the built web UI")

    p_verify = sub.add_parser("verify", help="verify a report file (schema + content hash)")
    p_verify.add_argument("report_file", help=f"path to a {REPORT_EXTENSION} file")

    return parser


def _emit(data: bytes, output: str | None) -> None:
    if output is None:
        sys.stdout.buffer.write(data + b"\n")
    else:
        Path(output).write_bytes(data)


def _session(args: argparse.Namespace) -> Session:
    return Session.from_manifest(args.manifest, model_cmd=args.model_cmd, seed=args.seed)


def _cmd_explore(args: argparse.Namespace) -> int:
    session = _session(args)
    digestible = session.stats_digestible(args.split, args.k_top)
    _emit(canonical_json(digestible.to_dict()), args.output)
    return 0


def _cmd_examine(args: argparse.Namespace) -> int:
    session = _session(args)
    digestible = session.metrics_digestible(args.split)
    _emit(canonical_json(digestible.to_dict()), args.output)
    return 0


def _cmd_explain(args: argparse.Namespace) -> int:
    session = _session(args)
    params = json.loads(args.params) if args.params else {}
    if args.method in ("lime", "kernelshap", "exact-shapley"):
        digestible = session.explain_digestible(
            args.method,
            instance_id=args.instance,
            text=args.text,
            target_label=args.target_label,
            params=params,
            seed=args.seed,
        )
    else:
        split = args.split or session.eval_split()
        options = {}
        if args.k is not None:
            options["k"] = args.k
        digestible = session.global_digestible(args.method, split, **options)
    _emit(canonical_json(digestible.to_dict()), args.output)
    return 0


def _cmd_expose(args: argparse.Namespace) -> int:
    session = _session(args)
    digestibles = []
    if args.suite:
        suite = json.loads(Path(args.suite).read_text("utf-8"))
        digestibles.extend(session.suite_digestibles(suite, args.seed))
    if args.fuzz:
        digestibles.append(session.fuzz_digestible())
    if args.fairness_attribute:
        split = args.split or session.eval_split()
        digestibles.append(
            session.fairness_digestible(
                split, args.fairness_attribute, args.positive_label, args.loss
            )
        )
    if not digestibles:
        print("expose: nothing to run (pass --suite, --fuzz or --fairness-attribute)", file=sys.stderr)
        return 2
    _emit(canonical_json({"digestibles": [d.to_dict() for d in digestibles]}), args.output)
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    import datetime

    session = _session(args)
    created_at = None
    if args.timestamp:
        created_at = datetime.datetime.now(datetime.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    report = session.full_report(created_at=created_at)
    if args.format == "html":
        data = render_html(report.to_dict()).encode("utf-8")
    else:
        data = report.to_bytes()
    _emit(data, args.output)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    session = _session(args)
    host, _, port = args.bind.partition(":")
    frontend = args.frontend
    if frontend is None:
        bundled = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        frontend = str(bundled) if bundled.is_dir() else None
    app = create_app(session, frontend_dir=frontend)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8765), log_level="info")
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    path = Path(args.report_file)
    if not path.is_file():
        print(f"verify: no such file: {path}", file=sys.stderr)
        return 1
    result = verify_report(path.read_bytes())
    if result.valid:
        print(f"valid: content hash {result.recomputed_hash}")
        return 0
    for violation in result.violations:
        print(f"violation: {violation}", file=sys.stderr)
    return 3


_COMMANDS = {
    "explore": _cmd_explore,
    "examine": _cmd_examine,
    "explain": _cmd_explain,
    "expose": _cmd_expose,
    "report": _cmd_report,
    "serve": _cmd_serve,
    "verify": _cmd_verify,
}


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
