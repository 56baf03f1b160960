import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURE_ROOT = REPO_ROOT / "fixtures"
POPE_REPLAY = FIXTURE_ROOT / "replay" / "pope_resignation.tsv"
POPE_START = 1360580280.0  # 2013-02-11T10:58:00Z

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def fixture_root():
    return FIXTURE_ROOT


@pytest.fixture
def pope_replay():
    return POPE_REPLAY


def make_replay_setup(tmp_path, start=0.0, fixture_root=None, corpus_root=None,
                      criteria=None, connectors=None, log_name="run.log"):
    """An in-memory pipeline wired exactly like the CLI's replay mode."""
    from wikimon.clock import VirtualClock
    from wikimon.edit_classifier import DiffClient
    from wikimon.gateway import EventLog, Gateway
    from wikimon.lang_graph import ClusterIndex, LangLinksClient
    from wikimon.monitor_core import CriteriaConfig, Monitor
    from wikimon.pipeline import Pipeline
    from wikimon.plausibility import CandidateStore, CorpusConnector

    clock = VirtualClock(start)
    store = CandidateStore()
    log = EventLog(tmp_path / log_name)
    gateway = Gateway(store, log, clock=clock)
    monitor = Monitor(criteria or CriteriaConfig())
    index = ClusterIndex()
    links = LangLinksClient(
        fixture_root=fixture_root, clock=clock, offline=fixture_root is None
    )
    diff_client = DiffClient(fixture_root=fixture_root) if fixture_root else None
    if connectors is None and corpus_root:
        connectors = [CorpusConnector("twitter", corpus_root)]
    pipeline = Pipeline(
        monitor, index, links, gateway,
        connectors=connectors or [],
        diff_client=diff_client,
        clock=clock,
    )
    return pipeline, gateway, clock
