"""Command-line client for the simulation service.

The CLI builds JSON requests and sends them over HTTP: to a remote
service when ``--server`` is given, otherwise to an in-process instance
of the same application, so offline use needs no running server.  Each
experiment writes ``<name>.csv`` and ``<name>.json`` (the result envelope)
into the output directory.

Exit codes: 0 success, 1 usage/validation error, 2 infeasible scenario.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from pathlib import Path

import httpx

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INFEASIBLE = 2

_KIND_BY_COMMAND = {
    "solve": "single",
    "pareto": "pareto",
    "sweep-pmax": "pmax-sweep",
    "sweep-gamma": "gamma-sweep",
    "sweep-k": "k-sweep",
    "trajectory": "trajectory",
    "validate": "validate",
}

_ENDPOINT_BY_COMMAND = {
    "solve": "/solve",
    "pareto": "/experiments/pareto",
    "sweep-pmax": "/experiments/pmax",
    "sweep-gamma": "/experiments/gamma",
    "sweep-k": "/experiments/k",
    "trajectory": "/experiments/trajectory",
    "validate": "/validate",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        raise UsageError(message)


def _add_common(parser: _Parser, with_preset: bool = True) -> None:
    parser.add_argument("--config", help="scenario config JSON, optionally {scenario, ga}, or a result envelope")
    parser.add_argument("--seed", type=int, help="solver seed override")
    parser.add_argument("--out", default=".", help="output directory (default: current directory)")
    parser.add_argument("--server", help="base URL of a running service; default runs in-process")
    if with_preset:
        parser.add_argument("--preset", choices=["desk", "paper"], default="desk", help="solver preset")


def build_parser() -> _Parser:
    parser = _Parser(prog="haps-isac", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("generate", help="draw concrete node placements for a scenario")
    _add_common(p, with_preset=False)

    p = sub.add_parser("solve", help="solve one instance")
    _add_common(p)
    p.add_argument("--mu", type=float, default=0.5, help="scalarization weight in [0, 1]")
    p.add_argument("--mode", choices=["sensing", "comm", "multi", "baseline"], default="multi")
    p.add_argument("--n-seeds", type=int, default=1)

    p = sub.add_parser("pareto", help="trade-off sweep over the scalarization weight")
    _add_common(p)
    p.add_argument("--mu-list", help="comma-separated weights (default 0.1..0.9)")
    p.add_argument("--n-seeds", type=int, default=3)

    p = sub.add_parser("sweep-pmax", help="worst-user rate versus power budget")
    _add_common(p)
    p.add_argument("--grid", help="comma-separated budgets in dBm (default 30..40)")
    p.add_argument("--interference", choices=["coherent", "power"], default="coherent")

    p = sub.add_parser("sweep-gamma", help="worst-user SINR versus beampattern threshold")
    _add_common(p)
    p.add_argument("--grid", help="comma-separated thresholds (default 1e-6,1e-5,1e-4)")

    p = sub.add_parser("sweep-k", help="worst-user rate versus user count, with UAV-only baseline")
    _add_common(p)
    p.add_argument("--grid", help="comma-separated user counts (default 2..6)")
    p.add_argument("--mu", type=float, default=0.0, help="scalarization weight of the proposed mode")
    p.add_argument("--interference", choices=["coherent", "power"], default="coherent")

    p = sub.add_parser("trajectory", help="sequential per-slot optimization under a speed limit")
    _add_common(p)
    p.add_argument("--mu", type=float, default=0.5)
    p.add_argument("--slots", type=int, default=4)
    p.add_argument("--slot-duration", type=float, default=1.0)
    p.add_argument("--v-max", type=float, default=30.0)
    p.add_argument("--mode", choices=["sensing", "comm", "multi", "baseline"], default="multi")

    p = sub.add_parser("validate", help="run the oracle and Monte-Carlo cross-checks")
    _add_common(p, with_preset=False)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def _load_config_file(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"{path}: config must be a JSON object")
    return data


def _split_config(data: dict) -> tuple[dict, dict]:
    """Accept either a flat scenario object or {scenario: ..., ga: ...}."""
    if "scenario" in data or "ga" in data:
        unknown = sorted(set(data) - {"scenario", "ga"})
        if unknown:
            raise UsageError(f"unknown top-level config key(s): {', '.join(unknown)}")
        return data.get("scenario", {}), data.get("ga", {})
    return data, {}


def _parse_list(raw: str | None, kind=float) -> list | None:
    if raw is None:
        return None
    try:
        return [kind(item) for item in raw.split(",") if item.strip()]
    except ValueError as exc:
        raise UsageError(f"bad list value {raw!r}: {exc}") from exc


def _post(path: str, payload: dict, server: str | None) -> tuple[int, dict]:
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            response = client.post(path, json=payload)
            return response.status_code, response.json()

    async def call() -> tuple[int, dict]:
        from .service import create_app

        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(transport=transport, base_url="http://service", timeout=None) as client:
            response = await client.post(path, json=payload)
            return response.status_code, response.json()

    return asyncio.run(call())


def _write_outputs(out_dir: str, name: str, envelope: dict) -> list[str]:
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    csv_path = directory / f"{name}.csv"
    csv_path.write_text(envelope["csv"], encoding="utf-8")
    json_payload = {key: value for key, value in envelope.items() if key != "csv"}
    json_path = directory / f"{name}.json"
    json_path.write_text(json.dumps(json_payload, indent=2) + "\n", encoding="utf-8")
    return [str(csv_path), str(json_path)]


def _handle_error(status: int, body: dict) -> int:
    detail = body.get("detail", body)
    print(f"error: {detail}", file=sys.stderr)
    return EXIT_INFEASIBLE if status == 409 else EXIT_VALIDATION


def _experiment_payload(args) -> tuple[str, dict]:
    scenario_cfg, ga_cfg = ({}, {})
    if args.config:
        data = _load_config_file(args.config)
        if "config_echo" in data:
            echo = data["config_echo"]
            expected = _KIND_BY_COMMAND.get(args.command)
            if echo.get("kind") != expected:
                raise UsageError(
                    f"envelope was produced by a {echo.get('kind')!r} experiment; rerun it with the matching command"
                )
            return "/experiments/rerun", {"config_echo": echo}
        scenario_cfg, ga_cfg = _split_config(data)

    ga = dict(ga_cfg)
    if getattr(args, "preset", None):
        ga.setdefault("preset", args.preset)
    if args.seed is not None:
        ga["seed"] = args.seed
    payload: dict = {"scenario": scenario_cfg}
    if args.command != "validate":
        payload["ga"] = ga

    if args.command == "solve":
        payload.update({"mu": args.mu, "mode": args.mode, "n_seeds": args.n_seeds})
    elif args.command == "pareto":
        mu_list = _parse_list(args.mu_list)
        if mu_list is not None:
            payload["mu_list"] = mu_list
        payload["n_seeds"] = args.n_seeds
    elif args.command == "sweep-pmax":
        grid = _parse_list(args.grid)
        if grid is not None:
            payload["pmax_list_dbm"] = grid
        payload["interference"] = args.interference
    elif args.command == "sweep-gamma":
        grid = _parse_list(args.grid)
        if grid is not None:
            payload["gamma_list"] = grid
    elif args.command == "sweep-k":
        grid = _parse_list(args.grid, int)
        if grid is not None:
            payload["k_list"] = grid
        payload.update({"proposed_mu": args.mu, "interference": args.interference})
    elif args.command == "trajectory":
        payload.update(
            {
                "mu": args.mu,
                "n_slots": args.slots,
                "slot_duration": args.slot_duration,
                "v_max": args.v_max,
                "mode": args.mode,
            }
        )
    return _ENDPOINT_BY_COMMAND[args.command], payload


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return EXIT_VALIDATION

        if args.command == "serve":
            import uvicorn

            from .service import create_app

            uvicorn.run(create_app(), host=args.host, port=args.port)
            return EXIT_OK

        if args.command == "generate":
            scenario_cfg = {}
            if args.config:
                scenario_cfg, _ = _split_config(_load_config_file(args.config))
            if args.seed is not None:
                scenario_cfg = {**scenario_cfg, "placement_seed": args.seed}
            status, body = _post("/scenario/generate", {"scenario": scenario_cfg}, args.server)
            if status != 200:
                return _handle_error(status, body)
            directory = Path(args.out)
            directory.mkdir(parents=True, exist_ok=True)
            path = directory / "scenario.json"
            path.write_text(json.dumps(body["scenario"], indent=2) + "\n", encoding="utf-8")
            print(f"wrote {path}")
            return EXIT_OK

        endpoint, payload = _experiment_payload(args)
        status, body = _post(endpoint, payload, args.server)
        if status != 200:
            return _handle_error(status, body)
        written = _write_outputs(args.out, body["kind"], body)
        for path in written:
            print(f"wrote {path}")
        if args.command == "validate":
            failed = 0
            for row in body["rows"]:
                print(f"[{row['status'].upper():4s}] {row['check']}: {row['detail']}")
                failed += row["status"] != "pass"
            return EXIT_OK if failed == 0 else EXIT_VALIDATION
        return EXIT_OK
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_VALIDATION


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
