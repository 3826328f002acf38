from __future__ import annotations

import pytest

from lodlink.dataset import SourceRegistry
from lodlink.fixtures import fixture_text
from lodlink.io import FormatTag, parse
from lodlink.model import Iri
from lodlink.rules import parse_rule_spec
from lodlink.vocab import AKT_NS, SWRC_NS


@pytest.fixture(scope="session")
def texts() -> dict[str, str]:
    names = (
        "initial.ttl",
        "dblp.rdf",
        "acm.rdf",
        "swc.rdf",
        "dblp_task.json",
        "expected_links.nt",
        "enriched_links_only.ttl",
        "enriched_merged.ttl",
    )
    return {name: fixture_text(name) for name in names}


@pytest.fixture
def initial_graph(texts):
    return parse(texts["initial.ttl"], FormatTag.TURTLE)


@pytest.fixture
def dblp_graph(texts):
    return parse(texts["dblp.rdf"], FormatTag.RDFXML)


@pytest.fixture
def acm_graph(texts):
    return parse(texts["acm.rdf"], FormatTag.RDFXML)


@pytest.fixture
def swc_graph(texts):
    return parse(texts["swc.rdf"], FormatTag.RDFXML)


@pytest.fixture
def registry(initial_graph, dblp_graph, acm_graph, swc_graph):
    reg = SourceRegistry()
    reg.register(initial_graph, "bibliography", FormatTag.TURTLE)
    reg.register(dblp_graph, "dblp", FormatTag.RDFXML, Iri(AKT_NS + "Book-Section-Reference"))
    reg.register(acm_graph, "acm", FormatTag.RDFXML, Iri(AKT_NS + "Article-Reference"))
    reg.register(swc_graph, "swc", FormatTag.RDFXML, Iri(SWRC_NS + "InProceedings"))
    return reg


@pytest.fixture
def scenario(texts, registry):
    """The worked example: bibliography source, dblp target, parsed rule."""
    spec = parse_rule_spec(texts["dblp_task.json"])
    return spec, registry.get("ds1"), registry.get("ds2")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" in nodeid:
                rows.append((nodeid.split("::")[-1], outcome))
    if not rows:
        return
    terminalreporter.section("acceptance checks")
    for name, outcome in sorted(set(rows)):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")
