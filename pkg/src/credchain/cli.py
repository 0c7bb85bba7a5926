"""Command-line entry points.

Machine-readable output (JSON, digests, CSV) goes to stdout;
diagnostics go to stderr.  Exit codes: 0 for success (including
"verified"), 1 for a clean negative verification, 2 for usage,
configuration, or I/O failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analytics
from .analytics import AnalyticsError
from .config import AppConfig, ConfigError, load_config
from .demo import run_demo
from .encoding import is_hex_digest, sha256
from .ledger import LedgerError
from .node import Node, NodeError
from .store import StoreError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="credchain",
        description="Desk-scale achievement ledger: issue, anchor, and verify records.",
    )
    parser.add_argument("--config", help="path to a TOML settings file")
    parser.add_argument("--data-dir", help="node data directory")
    parser.add_argument("--seed", type=int, help="seed for all randomness")
    parser.add_argument("--host", help="bind address for serve")
    parser.add_argument("--port", type=int, help="bind port for serve")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create and initialize a data directory")
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--no-mine", action="store_true", help="disable the miner thread")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("hash", help="print the SHA-256 digest of files")
    p.add_argument("files", nargs="+", help="file paths, or - for stdin")
    p.set_defaults(func=cmd_hash)

    p = sub.add_parser("verify", help="check a digest or file against the chain")
    p.add_argument("target", help="64-char hex digest, or a file to hash first")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mine", help="mine pending transactions")
    p.add_argument("--blocks", type=int, default=1)
    p.add_argument("--until-empty", action="store_true")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("report", help="fee and delay aggregates")
    p.add_argument("--txlog", help="read a transaction-log CSV instead of the chain")
    p.add_argument("--prices", help="CSV of exchange-rate quotes for dollar totals")
    p.add_argument("--json", action="store_true", dest="as_json")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("demo", help="seeded end-to-end population run")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("export", help="write chain and receipt artifacts")
    p.add_argument("--chain", help="destination for the chain NDJSON")
    p.add_argument("--receipts", help="destination for the receipts CSV")
    p.set_defaults(func=cmd_export)

    return parser


def _config_from(args: argparse.Namespace) -> AppConfig:
    overrides = {
        "data_dir": args.data_dir,
        "seed": args.seed,
        "host": args.host,
        "port": args.port,
    }
    return load_config(args.config, overrides=overrides)


def _emit(data) -> None:
    print(json.dumps(data, indent=2, sort_keys=True))


def cmd_init(args: argparse.Namespace) -> int:
    node = Node(_config_from(args), create=True)
    _emit(
        {
            "data_dir": str(node.data_dir),
            "admin": node.stats()["admin"],
            "contract": node.stats()["contract"],
            "height": node.chain.height,
        }
    )
    node.close()
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import serve

    config = _config_from(args)
    if args.no_mine:
        from dataclasses import replace

        config = replace(config, auto_mine=False)
    node = Node(config)
    print(f"serving on http://{config.host}:{config.port}", file=sys.stderr)
    serve(node)
    return 0


def cmd_hash(args: argparse.Namespace) -> int:
    for name in args.files:
        data = sys.stdin.buffer.read() if name == "-" else Path(name).read_bytes()
        print(f"{sha256(data).hex()}  {name}")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    target = args.target
    if is_hex_digest(target.lower().removeprefix("0x")):
        digest = target.lower().removeprefix("0x")
    elif Path(target).exists():
        digest = sha256(Path(target).read_bytes()).hex()
    else:
        print(f"error: {target} is neither a digest nor a readable file", file=sys.stderr)
        return 2
    node = Node(_config_from(args))
    result = node.verify_digest(digest)
    _emit(result)
    return 0 if result["found"] else 1


def cmd_mine(args: argparse.Namespace) -> int:
    node = Node(_config_from(args))
    blocks = node.mine_until_empty() if args.until_empty else node.mine(args.blocks)
    _emit(
        [
            {
                "number": b.number,
                "hash": b.block_hash.hex(),
                "tx_count": len(b.transactions),
            }
            for b in blocks
        ]
    )
    node.close()
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    quotes = analytics.read_prices_csv(args.prices) if args.prices else None
    if args.txlog:
        entries = analytics.read_txlog_csv(args.txlog)
    else:
        node = Node(_config_from(args))
        entries = analytics.entries_from_receipts(
            node.receipts(), node.university_labels()
        )
    overall = analytics.aggregate(entries, quotes)
    groups = analytics.group_by_university(entries, quotes)
    if args.as_json:
        _emit(analytics.report_json(overall, groups))
    else:
        print(analytics.render_report(overall, groups), end="")
    return 0


def cmd_demo(args: argparse.Namespace) -> int:
    summary = run_demo(_config_from(args))
    _emit(summary)
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    if not args.chain and not args.receipts:
        print("error: nothing to export; pass --chain and/or --receipts", file=sys.stderr)
        return 2
    node = Node(_config_from(args))
    written = []
    if args.chain:
        node.chain.export_ndjson(args.chain)
        written.append(args.chain)
    if args.receipts:
        node.chain.write_receipts_csv(args.receipts)
        written.append(args.receipts)
    for path in written:
        print(path, file=sys.stderr)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        ConfigError,
        NodeError,
        StoreError,
        LedgerError,
        AnalyticsError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
