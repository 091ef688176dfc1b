import sys
from pathlib import Path

import pytest
import yaml

sys.path.insert(0, str(Path(__file__).parent))

import synthetic  # noqa: E402


@pytest.fixture(scope="session")
def synthetic_corpus(tmp_path_factory):
    """6+6 synthetic documents on disk; returns (input_dir, docs, gold_pairs, gold_links)."""
    root = tmp_path_factory.mktemp("synthetic")
    docs = synthetic.generate(n_docs=6, units_per_doc=40, seed=7)
    gold_pairs, gold_links = synthetic.write_corpus_dir(docs, root / "input", seed=7)
    return root / "input", docs, gold_pairs, gold_links


@pytest.fixture
def write_config(tmp_path):
    def _write(data, name="config.yaml"):
        path = tmp_path / name
        path.write_text(yaml.safe_dump(data, sort_keys=True), encoding="utf-8")
        return path
    return _write


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
