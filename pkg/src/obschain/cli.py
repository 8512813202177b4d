"""Command-line front end.

The CLI is a thin client of the HTTP service: every subcommand builds a
request, posts it to the service (in-process over an ASGI transport by
default, or to ``--server URL``), and writes the JSON response verbatim or
re-shapes its rows as CSV. Keeping the CLI behind the same HTTP surface
means both entry points share validation, serialization and versioning.

Exit codes: 0 success, 2 usage error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from pathlib import Path
from typing import Any

import httpx

_CSV_FLOAT_DIGITS = ".17g"

_ENCODING_ALIASES = {
    "symmetric": "symmetric-copies",
    "single": "single-copy",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="obschain",
        description="Estimation fidelities for chains of independent observers of a quantum state.",
    )
    parser.add_argument("--server", default=None, help="base URL of a running service; default runs in-process")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, default_format: str) -> None:
        p.add_argument("--output", default=argparse.SUPPRESS, help="path of the output file")
        p.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS,
                       help=f"output format (default {default_format})")
        p.add_argument("--config", default=argparse.SUPPRESS,
                       help="JSON file with default flag values; explicit flags win")

    p = sub.add_parser("closed-form", help="greedy closed-form fidelities")
    p.add_argument("--d", type=int, default=argparse.SUPPRESS)
    p.add_argument("--n", type=int, default=argparse.SUPPRESS, help="number of copies")
    p.add_argument("--k", type=int, default=argparse.SUPPRESS, help="number of observers to report")
    p.add_argument("--encoding", default=argparse.SUPPRESS,
                   choices=("single-copy", "symmetric", "symmetric-copies",
                            "optimal-qubit", "copies-then-optimal"))
    add_common(p, "json")

    p = sub.add_parser("egalitarian", help="equal-fidelity strength schedule")
    p.add_argument("--d", type=int, default=argparse.SUPPRESS)
    p.add_argument("--n", type=int, default=argparse.SUPPRESS)
    p.add_argument("--observers", type=int, default=argparse.SUPPRESS)
    add_common(p, "json")

    p = sub.add_parser("privileged", help="shared-apparatus last-observer optimum")
    p.add_argument("--d", type=int, default=argparse.SUPPRESS)
    p.add_argument("--n", type=int, default=argparse.SUPPRESS)
    p.add_argument("--observers", type=int, default=argparse.SUPPRESS)
    p.add_argument("--epsilon", type=float, default=argparse.SUPPRESS,
                   help="fixed shared strength; omit to optimize")
    add_common(p, "json")

    p = sub.add_parser("simulate", help="Monte Carlo measurement-chain simulation")
    p.add_argument("--system", choices=("qudit", "spin"), default=argparse.SUPPRESS)
    p.add_argument("--d", type=int, default=argparse.SUPPRESS)
    p.add_argument("--n", type=int, default=argparse.SUPPRESS)
    p.add_argument("--observers", type=int, default=argparse.SUPPRESS)
    p.add_argument("--trials", type=int, default=argparse.SUPPRESS)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.add_argument("--epsilon", type=float, default=argparse.SUPPRESS,
                   help="constant strength for every observer")
    p.add_argument("--strengths", default=argparse.SUPPRESS,
                   help="comma-separated per-observer strengths")
    p.add_argument("--schedule", choices=("egalitarian", "stochastic"), default=argparse.SUPPRESS)
    p.add_argument("--stochastic-realization", action="store_true", default=argparse.SUPPRESS)
    add_common(p, "json")

    p = sub.add_parser("verify", help="sampling checks of Haar moments and channel shrinks")
    p.add_argument("--check", choices=("haar-moments", "channel-r", "bloch-shrink"),
                   default=argparse.SUPPRESS)
    p.add_argument("--d", type=int, default=argparse.SUPPRESS)
    p.add_argument("--epsilon", type=float, default=argparse.SUPPRESS)
    p.add_argument("--samples", type=int, default=argparse.SUPPRESS)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    add_common(p, "json")

    p = sub.add_parser("figure1", help="shrink-versus-observers data sweep")
    p.add_argument("--n", type=int, default=argparse.SUPPRESS)
    p.add_argument("--k-grid", dest="k_grid", default=argparse.SUPPRESS,
                   help="grid spec, e.g. log:1..1e6:25 or 1,10,100")
    add_common(p, "csv")

    return parser


def _usage_error(message: str) -> int:
    print(f"obschain: error: {message}", file=sys.stderr)
    return 2


class _UsageError(Exception):
    pass


def _merge_config(args: dict[str, Any]) -> dict[str, Any]:
    """Fill unset flags from the optional JSON config file; flags win."""
    config_path = args.pop("config", None)
    if config_path is None:
        return args
    try:
        loaded = json.loads(Path(config_path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise _UsageError(f"cannot read config {config_path}: {exc}") from exc
    if not isinstance(loaded, dict):
        raise _UsageError(f"config {config_path} must hold a JSON object")
    merged = {k.replace("-", "_"): v for k, v in loaded.items()}
    merged.update(args)
    return merged


def _require(args: dict[str, Any], name: str) -> Any:
    if name not in args:
        raise _UsageError(f"missing required flag --{name.replace('_', '-')}")
    return args[name]


def _system_block(args: dict[str, Any]) -> dict[str, Any]:
    """Resolve the (d | n) pair into a system selector for schedule commands."""
    d = args.get("d")
    n = args.get("n")
    if (d is None) == (n is None):
        raise _UsageError("pass exactly one of --d (single qudit) or --n (qubit copies)")
    if d is not None:
        return {"system": "qudit", "d": d}
    return {"system": "ncopy", "n_copies": n}


def _build_request(command: str, args: dict[str, Any]) -> tuple[str, dict[str, Any]]:
    if command == "closed-form":
        payload = {
            "d": args.get("d", 2),
            "n_copies": args.get("n", 1),
            "observers": args.get("k", 1),
        }
        enc = args.get("encoding", "symmetric-copies")
        payload["encoding"] = _ENCODING_ALIASES.get(enc, enc)
        return "/api/closed-form", payload

    if command == "egalitarian":
        payload = _system_block(args)
        payload["observers"] = args.get("observers", 1)
        return "/api/egalitarian", payload

    if command == "privileged":
        payload = _system_block(args)
        payload["observers"] = args.get("observers", 1)
        if "epsilon" in args:
            payload["epsilon"] = args["epsilon"]
        return "/api/privileged", payload

    if command == "simulate":
        system = _require(args, "system")
        payload: dict[str, Any] = {
            "system": system,
            "observers": args.get("observers", 1),
            "trials": args.get("trials", 10_000),
            "seed": args.get("seed", 0),
            "stochastic_realization": bool(args.get("stochastic_realization", False)),
        }
        if system == "qudit":
            payload["d"] = _require(args, "d")
        else:
            payload["n_copies"] = _require(args, "n")
        sources = [name for name in ("epsilon", "strengths", "schedule") if name in args]
        if len(sources) != 1:
            raise _UsageError("pass exactly one of --epsilon, --strengths, or --schedule")
        if sources[0] == "strengths":
            raw = args["strengths"]
            if isinstance(raw, str):
                try:
                    payload["strengths"] = [float(part) for part in raw.split(",") if part.strip()]
                except ValueError as exc:
                    raise _UsageError(f"bad --strengths list {raw!r}") from exc
            else:
                payload["strengths"] = list(raw)
        else:
            payload[sources[0]] = args[sources[0]]
        return "/api/simulate", payload

    if command == "verify":
        payload = {
            "check": _require(args, "check"),
            "d": args.get("d", 2),
            "epsilon": args.get("epsilon", 1.0),
            "samples": args.get("samples", 100_000),
            "seed": args.get("seed", 0),
        }
        return "/api/verify", payload

    if command == "figure1":
        payload = {
            "n_copies": args.get("n", 1000),
            "k_grid": args.get("k_grid", "log:1..1e6:25"),
        }
        return "/api/figure1", payload

    raise _UsageError(f"unknown command {command!r}")


def _post_inprocess(path: str, payload: dict[str, Any]) -> httpx.Response:
    from .service.app import app

    async def go() -> httpx.Response:
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://obschain.local", timeout=None
        ) as client:
            return await client.post(path, json=payload)

    return asyncio.run(go())


def _post_remote(server: str, path: str, payload: dict[str, Any]) -> httpx.Response:
    with httpx.Client(base_url=server, timeout=None) as client:
        return client.post(path, json=payload)


def _format_csv(rows: list[dict[str, Any]]) -> str:
    if not rows:
        return "\n"
    columns = list(rows[0].keys())
    lines = [",".join(columns)]
    for row in rows:
        cells = []
        for col in columns:
            value = row.get(col)
            if value is None:
                cells.append("")
            elif isinstance(value, bool):
                cells.append(str(value).lower())
            elif isinstance(value, int):
                cells.append(str(value))
            elif isinstance(value, float):
                cells.append(format(value, _CSV_FLOAT_DIGITS))
            else:
                cells.append(str(value))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _write_output(path_str: str, fmt: str, response_bytes: bytes, document: dict[str, Any]) -> None:
    path = Path(path_str)
    if path.parent != Path("") and not path.parent.is_dir():
        raise _UsageError(f"output directory {path.parent} does not exist")
    if fmt == "json":
        path.write_bytes(response_bytes)
    else:
        path.write_text(_format_csv(document["rows"]), newline="")


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    namespace = parser.parse_args(argv)
    args = vars(namespace)
    command = args.pop("command")
    server = args.pop("server")

    try:
        args = _merge_config(args)
        output = args.pop("output", None)
        fmt = args.pop("format", "csv" if command == "figure1" else "json")
        path, payload = _build_request(command, args)
    except _UsageError as exc:
        return _usage_error(str(exc))

    try:
        if server is None:
            response = _post_inprocess(path, payload)
        else:
            response = _post_remote(server, path, payload)
    except httpx.HTTPError as exc:
        print(f"obschain: transport error: {exc}", file=sys.stderr)
        return 1

    if response.status_code == 422:
        print(f"obschain: invalid request: {response.text}", file=sys.stderr)
        return 2
    if response.status_code >= 500:
        print(f"obschain: {response.text}", file=sys.stderr)
        return 3
    if response.status_code != 200:
        print(f"obschain: unexpected status {response.status_code}: {response.text}", file=sys.stderr)
        return 1

    document = json.loads(response.text)
    try:
        if output is not None:
            _write_output(output, fmt, response.content, document)
    except _UsageError as exc:
        return _usage_error(str(exc))
    print(json.dumps(document, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
