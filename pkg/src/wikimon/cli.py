"""Command-line entry point.

Launches the monitor in live mode (IRC feed) or replay mode (recorded
stream at a chosen speedup), optionally serving the gateway endpoints,
and prints a run summary on exit.

Exit codes: 0 ok, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from .clock import VirtualClock, WallClock
from .edit_classifier import DiffClient
from .gateway import EventLog, Gateway, build_app
from .irc import connect_live
from .lang_graph import ClusterIndex, LangLinksClient
from .languages import ALL_LANGUAGES, DEFAULT_LANGUAGES
from .monitor_core import CriteriaConfig, Monitor
from .pipeline import Pipeline, run_replay
from .plausibility import CandidateStore, CorpusConnector
from .rc_ingest import ReplayFormatError

logger = logging.getLogger(__name__)

DEFAULT_CONNECTOR_NAMES = ["twitter", "facebook", "gplus"]


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    mode: str = "live"
    languages: list[str] = field(default_factory=lambda: list(DEFAULT_LANGUAGES))
    replay_file: Optional[Path] = None
    speedup: float = math.inf
    replay_start: float = 0.0
    criteria: CriteriaConfig = field(default_factory=CriteriaConfig)
    include_bots: bool = False
    fixture_root: Optional[Path] = None
    corpus_root: Optional[Path] = None
    connector_names: list[str] = field(default_factory=lambda: list(DEFAULT_CONNECTOR_NAMES))
    log_path: Path = Path("wikimon-run.log")
    listen: Optional[tuple[str, int]] = None
    fsync: bool = False
    stay_alive: bool = False


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_iso_utc(text: str) -> float:
    dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def parse_args(argv: list[str]) -> RunConfig:
    parser = _Parser(prog="wikimon", description="Wikipedia edit-spike breaking-news monitor")
    parser.add_argument("--mode", choices=["live", "replay"], default="live")
    parser.add_argument("--languages", default=None,
                        help="comma-separated language codes, or 'all' for every edition")
    parser.add_argument("--replay-file", default=None)
    parser.add_argument("--speedup", default="inf",
                        help="replay speedup factor; 'inf' = as fast as possible")
    parser.add_argument("--replay-start", default="1970-01-01T00:00:00Z",
                        help="virtual UTC time of replay offset 0")
    parser.add_argument("--min-occurrences", type=int, default=None)
    parser.add_argument("--max-gap-secs", type=int, default=None)
    parser.add_argument("--min-editors", type=int, default=None)
    parser.add_argument("--max-idle-secs", type=int, default=None)
    parser.add_argument("--ttl-secs", type=int, default=None)
    parser.add_argument("--include-bots", action="store_true")
    parser.add_argument("--fixture-root", default=os.environ.get("WIKIMON_FIXTURE_ROOT"))
    parser.add_argument("--corpus-root", default=None)
    parser.add_argument("--connectors", default=",".join(DEFAULT_CONNECTOR_NAMES))
    parser.add_argument("--log-path", default="wikimon-run.log")
    parser.add_argument("--listen", default=None, help="host:port for the gateway endpoints")
    parser.add_argument("--fsync", action="store_true")
    parser.add_argument("--stay-alive", action="store_true",
                        help="keep serving after a replay finishes")
    args = parser.parse_args(argv)

    if args.languages is None:
        languages = list(DEFAULT_LANGUAGES)
    elif args.languages == "all":
        languages = list(ALL_LANGUAGES)
    else:
        languages = [tok for tok in args.languages.split(",") if tok.strip()]
        if not languages:
            raise UsageError("--languages must name at least one edition")

    try:
        speedup = math.inf if args.speedup == "inf" else float(args.speedup)
    except ValueError:
        raise UsageError(f"bad --speedup value {args.speedup!r}") from None
    if not speedup > 0:
        raise UsageError("--speedup must be positive")

    defaults = CriteriaConfig()
    ttl = args.ttl_secs if args.ttl_secs is not None else defaults.ttl_secs
    try:
        criteria = CriteriaConfig(
            min_occurrences=args.min_occurrences or defaults.min_occurrences,
            max_secs_between_edits=args.max_gap_secs or defaults.max_secs_between_edits,
            min_concurrent_editors=args.min_editors or defaults.min_concurrent_editors,
            max_secs_since_last_edit=args.max_idle_secs or defaults.max_secs_since_last_edit,
            ttl_secs=ttl,
            eviction_period_secs=ttl,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    if args.mode == "replay" and not args.replay_file:
        raise UsageError("replay mode requires --replay-file")

    listen = None
    if args.listen:
        host, _, port = args.listen.rpartition(":")
        try:
            listen = (host or "127.0.0.1", int(port))
        except ValueError:
            raise UsageError(f"bad --listen value {args.listen!r}") from None

    try:
        replay_start = _parse_iso_utc(args.replay_start)
    except ValueError:
        raise UsageError(f"bad --replay-start value {args.replay_start!r}") from None

    return RunConfig(
        mode=args.mode,
        languages=languages,
        replay_file=Path(args.replay_file) if args.replay_file else None,
        speedup=speedup,
        replay_start=replay_start,
        criteria=criteria,
        include_bots=args.include_bots,
        fixture_root=Path(args.fixture_root) if args.fixture_root else None,
        corpus_root=Path(args.corpus_root) if args.corpus_root else None,
        connector_names=[c for c in args.connectors.split(",") if c.strip()],
        log_path=Path(args.log_path),
        listen=listen,
        fsync=args.fsync,
        stay_alive=args.stay_alive,
    )


def build_pipeline(config: RunConfig, clock) -> tuple[Pipeline, Gateway]:
    store = CandidateStore()
    log = EventLog(config.log_path, fsync=config.fsync)
    gateway = Gateway(store, log, clock=clock)
    monitor = Monitor(config.criteria, include_bots=config.include_bots)
    index = ClusterIndex()
    links = LangLinksClient(
        fixture_root=config.fixture_root,
        clock=clock,
        offline=config.mode == "replay" and config.fixture_root is None,
    )
    diff_client = DiffClient(fixture_root=config.fixture_root) if config.fixture_root else None
    connectors = []
    if config.corpus_root:
        connectors = [CorpusConnector(name, config.corpus_root) for name in config.connector_names]
    pipeline = Pipeline(
        monitor,
        index,
        links,
        gateway,
        connectors=connectors,
        diff_client=diff_client,
        clock=clock,
    )
    return pipeline, gateway


def _serve(gateway: Gateway, listen: tuple[str, int]) -> threading.Thread:
    import uvicorn

    app = build_app(gateway)
    server = uvicorn.Server(
        uvicorn.Config(app, host=listen[0], port=listen[1], log_level="warning")
    )
    thread = threading.Thread(target=server.run, name="gateway-http", daemon=True)
    thread.start()
    # give the server a moment to bind before replay starts emitting
    deadline = time.monotonic() + 5
    while not server.started and time.monotonic() < deadline:
        time.sleep(0.05)
    return thread


def run(config: RunConfig) -> int:
    if config.mode == "replay":
        return _run_replay(config)
    return _run_live(config)


def _run_replay(config: RunConfig) -> int:
    clock = VirtualClock(config.replay_start)
    pipeline, gateway = build_pipeline(config, clock)
    gateway.health["ingest"] = {"mode": "replay", "connected": True}
    if config.listen:
        _serve(gateway, config.listen)
    try:
        summary = run_replay(
            pipeline, config.replay_file, config.speedup, clock, start=config.replay_start
        )
    except (ReplayFormatError, OSError) as exc:
        print(f"replay failed: {exc}", file=sys.stderr)
        return 2
    gateway.health["ingest"] = {"mode": "replay", "connected": False}
    print(summary.format())
    if config.listen and config.stay_alive:
        try:
            while True:
                time.sleep(1)
        except KeyboardInterrupt:
            pass
    return 0


def _run_live(config: RunConfig) -> int:
    clock = WallClock()
    pipeline, gateway = build_pipeline(config, clock)
    lock = threading.Lock()

    def sink(change):
        with lock:
            pipeline.on_change(change)

    client = connect_live(config.languages, sink)
    gateway.health["ingest"] = client.health
    gateway.health["ingest"]["mode"] = "live"
    if config.listen:
        _serve(gateway, config.listen)

    period = config.criteria.eviction_period_secs
    try:
        while True:
            time.sleep(period)
            with lock:
                pipeline.tick(clock.now())
    except KeyboardInterrupt:
        pass
    finally:
        client.stop()
        with lock:
            print(pipeline.summary(parse_errors=client.health["parse_errors"]).format())
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    logging.basicConfig(level=os.environ.get("WIKIMON_LOG_LEVEL", "INFO"))
    try:
        config = parse_args(argv if argv is not None else sys.argv[1:])
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return run(config)
    except Exception as exc:  # runtime failure
        logger.exception("run failed")
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
