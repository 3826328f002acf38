"""Bundled demo datasets: a small bibliography and three library records.

The files double as documentation of the formats the toolkit reads and as
the basis of the end-to-end test suite.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

__all__ = ["fixture_path", "fixture_text", "FIXTURE_NAMES"]

FIXTURE_NAMES = (
    "initial.ttl",
    "dblp.rdf",
    "acm.rdf",
    "swc.rdf",
    "dblp_task.json",
    "expected_links.nt",
    "enriched_links_only.ttl",
    "enriched_merged.ttl",
)


def fixture_path(name: str) -> Path:
    if name not in FIXTURE_NAMES:
        raise KeyError(f"unknown fixture {name!r}")
    path = resources.files(__package__) / name
    return Path(str(path))


def fixture_text(name: str) -> str:
    return fixture_path(name).read_text(encoding="utf-8")
