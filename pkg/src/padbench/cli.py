"""Command-line client for the benchmark service.

Every subcommand talks HTTP to the service API. By default the app is run
in-process (no server needed); pass ``--server URL`` or set
``PADBENCH_SERVER`` to target a running ``padbench-server`` instead, in
which case benchmark paths are resolved on the server machine.

Exit codes: 0 success, 2 input validation error, 3 runtime/compute error.
"""

from __future__ import annotations

import argparse
import asyncio
import csv
import json
import os
import sys
from pathlib import Path

import httpx

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_RUNTIME = 3


class ClientError(Exception):
    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


def _detail(payload) -> str:
    if isinstance(payload, dict) and "detail" in payload:
        detail = payload["detail"]
        if isinstance(detail, str):
            return detail
        return json.dumps(detail)
    return json.dumps(payload)


def _handle(status_code: int, payload) -> dict:
    if status_code < 400:
        return payload
    message = _detail(payload)
    if status_code in (400, 404, 422):
        raise ClientError(message, EXIT_INPUT)
    raise ClientError(message, EXIT_RUNTIME)


async def _asgi_call(method: str, path: str, payload) -> tuple[int, str]:
    from .service import app  # deferred: only needed for in-process mode

    transport = httpx.ASGITransport(app=app, raise_app_exceptions=False)
    async with httpx.AsyncClient(transport=transport, base_url="http://padbench.local") as client:
        response = await client.request(method, path, json=payload)
        return response.status_code, response.text


def _parse_response(status: int, text: str) -> dict:
    try:
        data = json.loads(text)
    except ValueError:
        raise ClientError(f"server error ({status}): {text[:200]}", EXIT_RUNTIME) from None
    return _handle(status, data)


def call(server: str | None, method: str, path: str, payload=None) -> dict:
    if server is None:
        status, text = asyncio.run(_asgi_call(method, path, payload))
        return _parse_response(status, text)
    try:
        response = httpx.request(method, server.rstrip("/") + path, json=payload, timeout=None)
    except httpx.HTTPError as exc:
        raise ClientError(f"cannot reach server {server}: {exc}", EXIT_RUNTIME) from None
    return _parse_response(response.status_code, response.text)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ClientError(f"cannot read {path}: {exc}", EXIT_INPUT) from None


# ---------------------------------------------------------------------------
# Subcommands


def cmd_summarize(args) -> int:
    data = call(args.server, "POST", "/manifest/summary",
                {"manifest_csv": _read_text(args.manifest)})
    if args.json:
        print(json.dumps(data, indent=2, sort_keys=True))
        return EXIT_OK
    print(f"total        {data['total']}")
    print(f"bona_fide    {data['bona_fide']}")
    print(f"attack_total {data['attack_total']}")
    for species, count in sorted(data["species"].items()):
        print(f"  {species:<12} {count}")
    return EXIT_OK


def cmd_cases(args) -> int:
    data = call(args.server, "GET", "/cases")
    if args.json:
        print(json.dumps(data, indent=2, sort_keys=True))
        return EXIT_OK
    for case in data["cases"]:
        train = ", ".join(case["train_species"])
        print(f"Case-{case['case_id']}: train {{{train}}} -> test {case['test_species']}")
    return EXIT_OK


def cmd_run(args) -> int:
    payload = {
        "manifest_path": args.manifest,
        "embeddings_dir": args.embeddings_dir,
        "svm_c": args.svm_c,
        "svm_tol": args.svm_tol,
        "svm_max_iter": args.svm_max_iter,
        "bonafide_ratio": args.bonafide_ratio,
        "seed": args.seed,
        "standardize": not args.no_standardize,
        "out_dir": args.out_dir,
        "write_outputs": True,
    }
    if args.backbones:
        payload["backbones"] = [b.strip() for b in args.backbones.split(",") if b.strip()]
    data = call(args.server, "POST", "/benchmark", payload)
    if args.json:
        print(json.dumps(data, indent=2, sort_keys=True))
        return EXIT_OK
    table = call(args.server, "POST", "/report/table", {"report": data["report"]})
    print(table["table"], end="")
    print(f"outputs written to {data['out_dir']}")
    return EXIT_OK


def _iter_score_files(args):
    if args.scores:
        yield Path(args.scores), "", ""
        return
    run_dir = Path(args.run_dir)
    if not run_dir.is_dir():
        raise ClientError(f"run directory not found: {run_dir}", EXIT_INPUT)
    files = sorted(run_dir.glob("*/case*/scores.csv"))
    if not files:
        raise ClientError(f"no */case*/scores.csv under {run_dir}", EXIT_INPUT)
    for path in files:
        backbone = path.parent.parent.name
        case = path.parent.name.removeprefix("case")
        yield path, backbone, case


def _parse_targets(raw: str) -> list[float]:
    try:
        targets = [float(t) for t in raw.split(",") if t.strip()]
    except ValueError:
        raise ClientError(f"bad --targets value {raw!r}", EXIT_INPUT) from None
    if not targets:
        raise ClientError("--targets must name at least one APCER target", EXIT_INPUT)
    return targets


def _score_entries(path: Path) -> list[dict]:
    entries = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        for row in reader:
            try:
                entries.append(
                    {
                        "sample_id": row["sample_id"],
                        "label": row["label"],
                        "species": row["species"] or None,
                        "score": float(row["score"]),
                    }
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ClientError(f"bad scores row in {path}: {exc}", EXIT_INPUT) from None
    return entries


def cmd_metrics(args) -> int:
    targets = _parse_targets(args.targets)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["backbone", "case", "d_eer"] + [f"bpcer_at_{t:g}" for t in targets])
    for path, backbone, case in _iter_score_files(args):
        data = call(
            args.server,
            "POST",
            "/metrics",
            {"entries": _score_entries(path), "apcer_targets": targets},
        )
        bpcer_by_target = {point["target"]: point["bpcer"] for point in data["bpcer_at"]}
        writer.writerow(
            [backbone, case, repr(data["d_eer"])] + [repr(bpcer_by_target[t]) for t in targets]
        )
    return EXIT_OK


def cmd_report(args) -> int:
    path = Path(args.report) if args.report else Path(args.run_dir) / "report.json"
    try:
        report = json.loads(_read_text(str(path)))
    except ValueError as exc:
        raise ClientError(f"malformed report {path}: {exc}", EXIT_INPUT) from None
    data = call(args.server, "POST", "/report/table", {"report": report})
    print(data["table"], end="")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="padbench", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--server", default=os.environ.get("PADBENCH_SERVER"),
                        help="service URL; default runs the service in-process")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("summarize", help="print label/species counts of a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("cases", help="print the four leave-one-out case definitions")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_cases)

    p = sub.add_parser("run", help="run the full benchmark")
    p.add_argument("--manifest", required=True)
    p.add_argument("--embeddings-dir", required=True)
    p.add_argument("--backbones", default=None,
                   help="comma-separated backbone keys (default: all eight)")
    p.add_argument("--svm-c", type=float, default=1.0)
    p.add_argument("--svm-tol", type=float, default=1e-4)
    p.add_argument("--svm-max-iter", type=int, default=1000)
    p.add_argument("--bonafide-ratio", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out-dir", default=None, help="default: runs/<timestamp>")
    p.add_argument("--no-standardize", action="store_true",
                   help="feed raw features to the SVM instead of standardizing")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("metrics", help="recompute metrics from stored scores.csv files")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--run-dir")
    group.add_argument("--scores")
    p.add_argument("--targets", default="5,10", help="comma-separated APCER targets")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("report", help="render the results table from a stored report")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--run-dir")
    group.add_argument("--report")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ClientError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
