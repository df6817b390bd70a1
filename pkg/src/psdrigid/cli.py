"""Command-line front end.

Subcommands bind the classifiers to file I/O:

    psdrigid <subcommand> [--tol EPS] [--seed N] [--format json|text]
             [--out PATH] [--server URL] INPUT

Exit codes: 0 on a successful run (whatever the verdict), 2 when the input
falls outside the theorems' hypotheses, 1 on I/O or schema errors.  Reports
are deterministic: identical input and options give byte-identical output.

By default everything runs in-process; with --server the payload is POSTed
to a running service instead.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .classify import PreconditionError
from .service.handlers import HANDLERS


@dataclass(frozen=True)
class JobConfig:
    subcommand: str
    input_path: str | None = None
    output_path: str | None = None
    tolerance: float = 1e-9
    seed: int | None = None
    format: str = "json"
    server: str | None = None
    extras: dict = field(default_factory=dict)


def _load_factorization(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise IOError(f"cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise ValueError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}")


def _render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    lines = []

    def emit(prefix, value):
        if isinstance(value, dict):
            for k in sorted(value):
                emit(f"{prefix}{k}.", value[k])
        elif isinstance(value, list):
            lines.append(f"{prefix[:-1]}: {json.dumps(value)}")
        else:
            lines.append(f"{prefix[:-1]}: {value}")

    emit("", report)
    return "\n".join(lines) + "\n"


def _build_payload(config: JobConfig) -> dict:
    payload = {"tolerance": config.tolerance}
    if config.subcommand == "generate":
        payload.update({
            "p": config.extras.get("p"),
            "q": config.extras.get("q"),
            "zero_pattern": config.extras.get("zero_pattern", []),
            "count": config.extras.get("count", 1),
            "seed": config.seed,
        })
        return payload
    payload["factorization"] = _load_factorization(config.input_path)
    if config.subcommand == "oracle":
        payload["s"] = config.extras.get("s", 2)
        payload["trials"] = config.extras.get("trials", 10000)
        payload["seed"] = config.seed
    if config.subcommand in ("classify", "uniqueness"):
        payload["exact"] = config.extras.get("exact", False)
    return payload


def _dispatch(config: JobConfig, payload: dict) -> dict:
    if config.server:
        import httpx

        resp = httpx.post(f"{config.server.rstrip('/')}/{config.subcommand}",
                          json=payload, timeout=300.0)
        if resp.status_code == 422:
            detail = resp.json().get("detail", {})
            raise PreconditionError(
                detail.get("message", "precondition refused"),
                detail.get("violations", ()),
            )
        if resp.status_code >= 400:
            raise ValueError(f"server error {resp.status_code}: {resp.text}")
        return resp.json()
    return HANDLERS[config.subcommand](payload)


def emit_corpus(p: int, q: int, zero_pattern, count: int, seed: int,
                output_dir: str, tolerance: float = 1e-9) -> list:
    """Write `count` generated factorization files plus a manifest.

    Returns the list of written file paths; deterministic per seed.
    """
    out = HANDLERS["generate"]({
        "p": p, "q": q, "zero_pattern": list(zero_pattern),
        "count": count, "seed": seed, "tolerance": tolerance,
    })
    outdir = Path(output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for entry, inst in zip(out["manifest"], out["instances"]):
        path = outdir / entry["file"]
        path.write_text(json.dumps(inst, indent=2, sort_keys=True) + "\n")
        paths.append(str(path))
    manifest_path = outdir / "manifest.json"
    manifest_path.write_text(
        json.dumps(out["manifest"], indent=2, sort_keys=True) + "\n")
    paths.append(str(manifest_path))
    return paths


def run(config: JobConfig):
    """Execute one job; returns (exit_code, report_text)."""
    try:
        if config.subcommand == "generate" and config.output_path:
            files = emit_corpus(
                config.extras.get("p"), config.extras.get("q"),
                config.extras.get("zero_pattern", []),
                config.extras.get("count", 1), config.seed,
                config.output_path, config.tolerance,
            )
            return 0, _render({"files": files}, config.format)
        payload = _build_payload(config)
        report = _dispatch(config, payload)
    except PreconditionError as e:
        report = {"error": "precondition", "message": str(e),
                  "violations": list(e.violations)}
        return 2, _render(report, config.format)
    except (IOError, ValueError) as e:
        return 1, f"error: {e}\n"
    return 0, _render(report, config.format)


def _parse_zero_pattern(text: str):
    """Parse '1,1;2,2' into [(1,1), (2,2)]."""
    if not text:
        return []
    out = []
    for part in text.split(";"):
        i, j = part.split(",")
        out.append((int(i), int(j)))
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="psdrigid",
        description="Rigidity analysis of size-2 psd factorizations",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(sp, needs_input=True):
        sp.add_argument("--tol", type=float, default=1e-9,
                        help="decision tolerance (default 1e-9)")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--format", choices=("json", "text"), default="json")
        sp.add_argument("--out", default=None, help="write the report here")
        sp.add_argument("--server", default=None,
                        help="POST to a running service instead of in-process")
        if needs_input:
            sp.add_argument("input", help="factorization JSON file")

    for name in ("classify", "uniqueness"):
        sp = sub.add_parser(name)
        common(sp)
        sp.add_argument("--exact", action="store_true",
                        help="evaluate sign conditions in exact arithmetic")
    for name in ("validate", "boundary", "motions"):
        common(sub.add_parser(name))
    sp = sub.add_parser("oracle")
    common(sp)
    sp.add_argument("--s", type=int, choices=(1, 2), default=2)
    sp.add_argument("--trials", type=int, default=10000)
    sp = sub.add_parser("generate")
    common(sp, needs_input=False)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--zeros", default="",
                    help="prescribed zero pattern, e.g. '1,1;2,2'")
    sp.add_argument("--count", type=int, default=1)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.tol <= 0:
        print("error: --tol must be positive", file=sys.stderr)
        return 1
    if args.subcommand in ("generate", "oracle") and args.seed is None:
        print(f"error: {args.subcommand} requires --seed", file=sys.stderr)
        return 1
    extras = {}
    if args.subcommand == "oracle":
        extras = {"s": args.s, "trials": args.trials}
    elif args.subcommand == "generate":
        try:
            pattern = _parse_zero_pattern(args.zeros)
        except ValueError:
            print(f"error: bad --zeros value {args.zeros!r}", file=sys.stderr)
            return 1
        extras = {"p": args.p, "q": args.q, "count": args.count,
                  "zero_pattern": pattern}
    elif args.subcommand in ("classify", "uniqueness"):
        extras = {"exact": args.exact}
    config = JobConfig(
        subcommand=args.subcommand,
        input_path=getattr(args, "input", None),
        output_path=args.out,
        tolerance=args.tol,
        seed=args.seed,
        format=args.format,
        server=args.server,
        extras=extras,
    )
    code, text = run(config)
    if code == 1:
        sys.stderr.write(text)
        return code
    if config.output_path and config.subcommand != "generate":
        try:
            Path(config.output_path).write_text(text)
        except OSError as e:
            print(f"error: cannot write {config.output_path}: {e}",
                  file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
