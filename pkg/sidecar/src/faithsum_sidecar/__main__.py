"""Service launcher: ``python -m faithsum_sidecar`` or ``scorer-sidecar``."""

from __future__ import annotations

import argparse
import dataclasses
import sys
from typing import Optional

import uvicorn

from .app import create_app
from .config import BACKENDS, DEFAULT_PORT, Settings


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="scorer-sidecar",
        description="HTTP scoring service: NLI pair probabilities and BERTScore.",
    )
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=DEFAULT_PORT)
    parser.add_argument(
        "--backend",
        choices=BACKENDS,
        default=None,
        help="override FAITHSUM_SIDECAR_BACKEND",
    )
    parser.add_argument("--log-level", default="warning")
    args = parser.parse_args(argv)

    settings = Settings.from_env()
    if args.backend is not None:
        settings = dataclasses.replace(settings, backend=args.backend)
    uvicorn.run(
        create_app(settings),
        host=args.host,
        port=args.port,
        log_level=args.log_level,
    )
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
