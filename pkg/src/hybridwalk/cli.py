"""Command-line client for the experiment harness.

Subcommands map one-to-one onto the service's endpoints.  By default the
request is handled in-process; with ``--server URL`` the same payload is
POSTed to a running service and the response files are written locally.
Every invocation that produces files also writes ``manifest.json`` with
the effective request, so the output directory is self-describing and
re-runnable.

Exit codes: 0 success, 2 configuration error, 3 resource-cap failure,
4 cache error, 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Callable

import numba
import numpy
import scipy
import yaml

from . import __version__
from .errors import (
    CacheError,
    CacheMissError,
    CapError,
    ConfigError,
    HybridwalkError,
)
from .experiment import ExperimentConfig
from .pinit import default_cache_dir
from .reporting import write_text_file
from .service import models as m
from .service.handlers import (
    AppState,
    handle_fixed_sweep,
    handle_hist,
    handle_pinit,
    handle_run,
    handle_sweep,
    handle_table,
    handle_validate,
)

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_CONFIG = 2
EXIT_CAP = 3
EXIT_CACHE = 4

_EXIT_BY_STATUS = {400: EXIT_CONFIG, 422: EXIT_CAP, 404: EXIT_CACHE, 409: EXIT_CACHE}


class _CliFailure(Exception):
    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code


def exit_code_for(exc: HybridwalkError) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, CapError):
        return EXIT_CAP
    if isinstance(exc, CacheError):
        return EXIT_CACHE
    return EXIT_OTHER


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _str_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybridwalk",
        description="First-reward search experiments on walled gridworlds.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--cache-dir",
        default=None,
        help="success-curve cache directory (default: $HYBRIDWALK_CACHE_DIR or the user cache)",
    )
    common.add_argument(
        "--server",
        default=None,
        metavar="URL",
        help="dispatch to a running service instead of computing in-process",
    )
    common.add_argument(
        "--threads",
        type=int,
        default=None,
        metavar="N",
        help="worker-thread cap (default: machine parallelism)",
    )
    common.add_argument(
        "--out", default=".", metavar="DIR", help="output directory (default: current)"
    )

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pinit", parents=[common], help="build or fetch a success curve")
    p.add_argument("--base", type=int, required=True, help="inner square side length b")
    p.add_argument("--dwall", type=int, default=0, help="outer wall distance")
    p.add_argument("--max-L", type=int, default=1 << 22, dest="max_L", help="power-of-2 horizon")
    p.add_argument("--method", choices=("auto", "exact", "mc"), default="auto")
    p.add_argument("--lengths", type=_int_list, default=None, help="explicit comma-separated L grid")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rebuild", action="store_true", help="ignore any cached entry")

    p = sub.add_parser("run", parents=[common], help="run one strategy on one layout")
    p.add_argument("--strategy", required=True)
    p.add_argument("--base", type=int, required=True)
    p.add_argument("--dwall", type=int, default=0)
    p.add_argument("--n-runs", type=int, default=10_000, dest="n_runs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fixed-L", type=int, default=None, dest="fixed_L")
    p.add_argument("--curve-method", choices=("auto", "exact", "mc"), default="auto")
    p.add_argument("--round-cap", type=int, default=None)
    p.add_argument("--step-cap", type=int, default=None)
    p.add_argument("--shot-cap", type=int, default=None)

    p = sub.add_parser("sweep", parents=[common], help="full grid sweep from a config file")
    p.add_argument("--config", default=None, metavar="FILE", help="YAML experiment config")
    p.add_argument("--strategies", type=_str_list, default=None)
    p.add_argument("--bases", type=_int_list, default=None)
    p.add_argument("--dwalls", type=_int_list, default=None)
    p.add_argument("--n-runs", type=int, default=None, dest="n_runs")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--curve-method", choices=("auto", "exact", "mc"), default=None)
    p.add_argument("--round-cap", type=int, default=None)
    p.add_argument("--step-cap", type=int, default=None)
    p.add_argument("--shot-cap", type=int, default=None)
    p.add_argument(
        "--no-build",
        action="store_true",
        help="fail instead of building success curves missing from the cache",
    )

    p = sub.add_parser(
        "fixed-sweep", parents=[common], help="constant-L strategies over a log grid of L"
    )
    p.add_argument("--base", type=int, default=7)
    p.add_argument("--dwall", type=int, default=16)
    p.add_argument(
        "--strategies", type=_str_list, default=["fixed-hybrid", "fixed-classical"]
    )
    p.add_argument("--grid", type=_int_list, default=None, help="explicit comma-separated L grid")
    p.add_argument("--grid-min", type=int, default=None, help="log grid start (default: L_min)")
    p.add_argument("--grid-max", type=int, default=None, help="log grid end (default: 2^14)")
    p.add_argument("--grid-points", type=int, default=None, help="log grid size (default: 868)")
    p.add_argument("--n-runs", type=int, default=100_000, dest="n_runs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--curve-method", choices=("auto", "exact", "mc"), default="auto")
    p.add_argument("--round-cap", type=int, default=None)
    p.add_argument("--step-cap", type=int, default=None)
    p.add_argument("--shot-cap", type=int, default=None)

    p = sub.add_parser("table", parents=[common], help="summary table from a summary.json")
    p.add_argument("--summary", required=True, metavar="FILE")

    p = sub.add_parser("hist", parents=[common], help="terminal-length histogram for one cell")
    p.add_argument("--summary", required=True, metavar="FILE")
    p.add_argument("--strategy", required=True)
    p.add_argument("--base", type=int, required=True)
    p.add_argument("--dwall", type=int, default=0)

    sub.add_parser("validate", parents=[common], help="run the self-check suite")
    return parser


def _caps_model(args: argparse.Namespace) -> m.CapsModel:
    defaults = m.CapsModel()
    return m.CapsModel(
        shot_cap=args.shot_cap if args.shot_cap is not None else defaults.shot_cap,
        round_cap=args.round_cap if args.round_cap is not None else defaults.round_cap,
        step_cap=args.step_cap if args.step_cap is not None else defaults.step_cap,
    )


def _load_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file {path} does not parse: {exc}") from exc
    if doc is None:
        return {}
    if not isinstance(doc, dict):
        raise ConfigError(f"config file {path} must hold a mapping, got {type(doc).__name__}")
    return doc


def _sweep_request(args: argparse.Namespace) -> m.SweepRequest:
    # Precedence: command-line flags > config file > built-in defaults.
    mapping = _load_config_file(args.config) if args.config else {}
    overrides = {
        "strategies": args.strategies,
        "base_sizes": args.bases,
        "wall_distances": args.dwalls,
        "n_runs": args.n_runs,
        "seed_base": args.seed,
        "curve_method": args.curve_method,
    }
    for key, value in overrides.items():
        if value is not None:
            mapping[key] = value
    caps = dict(mapping.get("caps") or {})
    for key, value in (
        ("shot_cap", args.shot_cap),
        ("round_cap", args.round_cap),
        ("step_cap", args.step_cap),
    ):
        if value is not None:
            caps[key] = value
    if caps:
        mapping["caps"] = caps
    for required in ("strategies", "base_sizes", "wall_distances"):
        if required not in mapping:
            raise ConfigError(f"sweep needs {required} (config file key or flag)")
    config = ExperimentConfig.from_mapping(mapping)
    return m.SweepRequest(
        config=m.ExperimentConfigModel.from_core(config),
        no_build=args.no_build,
        max_workers=args.threads,
    )


def _fixed_grid(args: argparse.Namespace) -> list[int] | None:
    if args.grid is not None:
        return args.grid
    if args.grid_min is None and args.grid_max is None and args.grid_points is None:
        return None
    from .experiment import DEFAULT_FIXED_GRID_MAX, DEFAULT_FIXED_GRID_POINTS, log_int_grid
    from .gridworld import GridworldSpec

    lo = args.grid_min
    if lo is None:
        lo = GridworldSpec(args.base, args.dwall).min_episode_length
    hi = args.grid_max if args.grid_max is not None else DEFAULT_FIXED_GRID_MAX
    n = args.grid_points if args.grid_points is not None else DEFAULT_FIXED_GRID_POINTS
    return list(log_int_grid(lo, hi, n))


def _request_for(args: argparse.Namespace):
    """(endpoint path, request model, in-process callable)."""
    if args.command == "pinit":
        req = m.PinitRequest(
            base_size=args.base,
            wall_distance=args.dwall,
            method=args.method,
            max_length=args.max_L,
            lengths=args.lengths,
            seed_base=args.seed,
            rebuild=args.rebuild,
        )
        return "/pinit", req, handle_pinit, m.PinitResponse
    if args.command == "run":
        req = m.RunRequest(
            strategy=args.strategy,
            base_size=args.base,
            wall_distance=args.dwall,
            n_runs=args.n_runs,
            seed_base=args.seed,
            fixed_L=args.fixed_L,
            caps=_caps_model(args),
            curve_method=args.curve_method,
        )
        return "/run", req, handle_run, m.RunResponse
    if args.command == "sweep":
        return "/sweep", _sweep_request(args), handle_sweep, m.SweepResponse
    if args.command == "fixed-sweep":
        req = m.FixedSweepRequest(
            base_size=args.base,
            wall_distance=args.dwall,
            strategies=args.strategies,
            grid=_fixed_grid(args),
            n_runs=args.n_runs,
            seed_base=args.seed,
            caps=_caps_model(args),
            curve_method=args.curve_method,
        )
        return "/fixed-sweep", req, handle_fixed_sweep, m.FixedSweepResponse
    if args.command == "table":
        req = m.TableRequest(summary=_read_text(args.summary))
        return "/table", req, handle_table, m.TableResponse
    if args.command == "hist":
        req = m.HistRequest(
            summary=_read_text(args.summary),
            strategy=args.strategy,
            base_size=args.base,
            wall_distance=args.dwall,
        )
        return "/hist", req, handle_hist, m.HistResponse
    if args.command == "validate":
        return "/validate", m.ValidateRequest(), handle_validate, m.ValidateResponse
    raise ConfigError(f"unknown command {args.command!r}")


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def _dispatch_remote(server: str, path: str, request, response_type):
    import httpx

    url = server.rstrip("/") + path
    try:
        reply = httpx.post(url, json=request.model_dump(mode="json"), timeout=None)
    except httpx.HTTPError as exc:
        raise _CliFailure(EXIT_OTHER, f"cannot reach {url}: {exc}") from exc
    if reply.status_code != 200:
        try:
            doc = reply.json()
            detail = f"{doc.get('error', 'error')}: {doc.get('detail', reply.text)}"
        except ValueError:
            detail = reply.text
        raise _CliFailure(_EXIT_BY_STATUS.get(reply.status_code, EXIT_OTHER), detail)
    return response_type.model_validate(reply.json())


def _dispatch(args: argparse.Namespace):
    path, request, handler, response_type = _request_for(args)
    if args.server:
        return request, _dispatch_remote(args.server, path, request, response_type)
    state = AppState.create(cache_dir=args.cache_dir, max_workers=_threads(args))
    if handler in (handle_table, handle_hist):
        return request, handler(request)
    return request, handler(request, state)


def _threads(args: argparse.Namespace) -> int:
    if args.threads is not None:
        if args.threads < 1:
            raise ConfigError(f"--threads must be >= 1, got {args.threads}")
        return args.threads
    return os.cpu_count() or 1


def _manifest(args: argparse.Namespace, request, files: list[str]) -> str:
    doc = {
        "tool": {"name": "hybridwalk", "version": __version__},
        "command": args.command,
        "request": json.loads(request.model_dump_json()),
        "cache_dir": str(
            Path(args.cache_dir) if args.cache_dir is not None else default_cache_dir()
        ),
        "server": args.server,
        "threads": args.threads,
        "files": sorted(files),
        "versions": {
            "python": sys.version.split()[0],
            "numpy": numpy.__version__,
            "scipy": scipy.__version__,
            "numba": numba.__version__,
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _write_outputs(args: argparse.Namespace, request, files: list[m.FilePayload]) -> None:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for payload in files:
        target = out / payload.name
        write_text_file(target, payload.content)
        print(f"wrote {target}")
    manifest = out / "manifest.json"
    write_text_file(manifest, _manifest(args, request, [f.name for f in files]))
    print(f"wrote {manifest}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        request, response = _dispatch(args)
    except _CliFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except HybridwalkError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exit_code_for(exc)

    if args.command == "validate":
        for check in response.checks:
            print(f"{'PASS' if check.passed else 'FAIL'}  {check.name}: {check.detail}")
        if not response.ok:
            print("validation failed", file=sys.stderr)
            return EXIT_OTHER
        return EXIT_OK

    _write_outputs(args, request, response.files)
    if args.command == "pinit":
        note = "cache hit, reused stored curve" if response.was_cached else (
            f"built {response.n_points} point(s)"
        )
        print(f"pinit: {note}; converged_at={response.converged_at}")
        for L in response.capped_lengths:
            print(f"warning: shot cap reached before convergence at L={L}", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
