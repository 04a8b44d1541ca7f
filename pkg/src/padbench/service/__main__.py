"""Serve the benchmark API: ``python -m padbench.service`` or ``padbench-server``."""

from __future__ import annotations

import argparse

import uvicorn


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="padbench-server", description=__doc__)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    args = parser.parse_args(argv)
    uvicorn.run("padbench.service:app", host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
