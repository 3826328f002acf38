"""Candidate blocking and link generation.

Blocking is recall-lossless for the key comparison: a LEVENSHTEIN key with
maximum distance m splits each indexed value into m+1 contiguous segments,
so any probe value within distance m must contain at least one segment
unchanged (pigeonhole over the at most m edits).  Probing enumerates the
indexed lengths within m of the probe's length and every segment shift in
[-m, m].  EQUALITY keys index the whole value, DATE_EQUALITY keys the first
four-digit run.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterator

from .dataset import DataSource, Entity, extract_entities
from .model import Graph, Iri, Triple
from .rules import (
    Comparison,
    ComparatorKind,
    LinkageRule,
    _first_year,
    evaluate_rule,
    first_comparison,
    literal_values,
)

__all__ = [
    "BlockIndex",
    "Link",
    "LinkSet",
    "LinkingTask",
    "Progress",
    "RunState",
    "UnsupportedKeyComparator",
    "Verdict",
    "build_block_index",
    "candidate_pairs",
    "generate_links",
    "links_ntriples",
    "write_links",
]


class UnsupportedKeyComparator(Exception):
    """The first comparison's comparator cannot drive blocking."""


class Verdict(enum.Enum):
    UNREVIEWED = "UNREVIEWED"
    ACCEPTED = "ACCEPTED"
    REJECTED = "REJECTED"


class RunState(enum.Enum):
    IDLE = "IDLE"
    RUNNING = "RUNNING"
    DONE = "DONE"
    FAILED = "FAILED"


@dataclass(frozen=True)
class Link:
    source: Iri
    predicate: Iri
    target: Iri
    confidence: float
    verdict: Verdict = Verdict.UNREVIEWED

    def with_verdict(self, verdict: Verdict) -> "Link":
        return replace(self, verdict=verdict)


@dataclass(frozen=True)
class LinkSet:
    task_id: str
    links: tuple[Link, ...]

    def __post_init__(self):
        pairs = [(l.source, l.target) for l in self.links]
        if len(pairs) != len(set(pairs)):
            raise ValueError("duplicate source/target pair in link set")


@dataclass(frozen=True)
class Progress:
    state: RunState
    pairs_evaluated: int
    total_pairs: int
    links_found: int

    def __post_init__(self):
        if self.pairs_evaluated > self.total_pairs:
            raise ValueError("pairs_evaluated cannot exceed total_pairs")


@dataclass(frozen=True, eq=False)
class LinkingTask:
    id: str
    source: DataSource
    target: DataSource
    rule: LinkageRule


_BlockKey = tuple


class BlockIndex:
    """Bucketed index over target entities, keyed by the first comparison."""

    def __init__(self, key_comparison: Comparison, targets: list[Entity]):
        kind = key_comparison.comparator.kind
        if kind not in (ComparatorKind.EQUALITY, ComparatorKind.LEVENSHTEIN, ComparatorKind.DATE_EQUALITY):
            raise UnsupportedKeyComparator(f"cannot block on comparator kind {kind!r}")
        self.key_comparison = key_comparison
        self.targets = targets
        self.max_distance = key_comparison.comparator.max_distance or 0
        self.buckets: dict[_BlockKey, set[int]] = {}

    def bucket_count(self) -> int:
        return len(self.buckets)


def _segments(length: int, m: int) -> list[tuple[int, int]]:
    """Split a string of the given length into m+1 contiguous (start, size) runs."""
    parts = m + 1
    base, remainder = divmod(length, parts)
    out = []
    position = 0
    for i in range(parts):
        size = base + (1 if i < remainder else 0)
        out.append((position, size))
        position += size
    return out


def _index_keys(value: str, comparison: Comparison, m: int) -> Iterator[_BlockKey]:
    kind = comparison.comparator.kind
    if kind is ComparatorKind.EQUALITY:
        yield ("v", value)
    elif kind is ComparatorKind.DATE_EQUALITY:
        year = _first_year(value)
        if year is not None:
            yield ("y", year)
    else:
        for i, (start, size) in enumerate(_segments(len(value), m)):
            yield ("s", len(value), i, value[start : start + size])


def _probe_keys(value: str, comparison: Comparison, m: int) -> set[_BlockKey]:
    kind = comparison.comparator.kind
    if kind is ComparatorKind.EQUALITY:
        return {("v", value)}
    if kind is ComparatorKind.DATE_EQUALITY:
        year = _first_year(value)
        return {("y", year)} if year is not None else set()
    keys: set[_BlockKey] = set()
    for length in range(max(0, len(value) - m), len(value) + m + 1):
        for i, (start, size) in enumerate(_segments(length, m)):
            for shift in range(-m, m + 1):
                probe_start = start + shift
                if 0 <= probe_start and probe_start + size <= len(value):
                    keys.add(("s", length, i, value[probe_start : probe_start + size]))
    return keys


def build_block_index(targets: list[Entity], key_comparison: Comparison, target_graph: Graph) -> BlockIndex:
    index = BlockIndex(key_comparison, targets)
    m = index.max_distance
    for position, entity in enumerate(targets):
        values = literal_values(target_graph, entity.root, key_comparison.target_path, key_comparison.transformations)
        for value in values:
            for key in _index_keys(value, key_comparison, m):
                index.buckets.setdefault(key, set()).add(position)
    return index


def candidate_pairs(
    index: BlockIndex,
    sources: list[Entity],
    source_graph: Graph,
) -> Iterator[tuple[Entity, Entity]]:
    """Source/target pairs sharing at least one block key, in stable order."""
    comparison = index.key_comparison
    m = index.max_distance
    for source in sources:
        values = literal_values(source_graph, source.root, comparison.source_path, comparison.transformations)
        matched: set[int] = set()
        for value in values:
            for key in _probe_keys(value, comparison, m):
                positions = index.buckets.get(key)
                if positions:
                    matched |= positions
        for position in sorted(matched):
            yield source, index.targets[position]


def generate_links(
    task: LinkingTask,
    blocking: bool = True,
    progress_sink: Callable[[Progress], None] | None = None,
) -> LinkSet:
    """Evaluate the rule over (blocked or exhaustive) pairs and keep accepts.

    A pair becomes a link when the rule accepts it and its confidence clears
    the task threshold strictly.  Progress snapshots are emitted at start,
    every 1000 pairs, and on completion.
    """
    def emit(progress: Progress) -> None:
        if progress_sink is not None:
            progress_sink(progress)

    source_entities = extract_entities(task.source)
    target_entities = extract_entities(task.target)
    source_graph = task.source.graph
    target_graph = task.target.graph

    if blocking:
        key = first_comparison(task.rule)
        index = build_block_index(target_entities, key, target_graph)
        pairs = list(candidate_pairs(index, source_entities, source_graph))
    else:
        pairs = [(s, t) for s in source_entities for t in target_entities]

    total = len(pairs)
    links: list[Link] = []
    emit(Progress(RunState.RUNNING, 0, total, 0))
    for count, (source, target) in enumerate(pairs, start=1):
        decision = evaluate_rule(task.rule, source_graph, source.root, target_graph, target.root)
        if decision.accept and decision.confidence > task.rule.threshold:
            links.append(Link(source.root, task.rule.link_type, target.root, decision.confidence))
        if count % 1000 == 0:
            emit(Progress(RunState.RUNNING, count, total, len(links)))
    links.sort(key=lambda l: (l.source.value, l.target.value))
    link_set = LinkSet(task.id, tuple(links))
    emit(Progress(RunState.DONE, total, total, len(links)))
    return link_set


def links_ntriples(link_set: LinkSet, verdicts: set[Verdict] | None = None) -> str:
    """Canonical N-Triples for the links whose verdict is in the given set.

    The default keeps everything not rejected.
    """
    from .io.ntriples import serialize_ntriples

    keep = verdicts if verdicts is not None else {Verdict.UNREVIEWED, Verdict.ACCEPTED}
    graph = Graph()
    for link in link_set.links:
        if link.verdict in keep:
            graph.add(Triple(link.source, link.predicate, link.target))
    return serialize_ntriples(graph)


def write_links(link_set: LinkSet, path: str | Path) -> int:
    """Write non-rejected links as canonical N-Triples; returns the count."""
    kept = [l for l in link_set.links if l.verdict is not Verdict.REJECTED]
    Path(path).write_bytes(links_ntriples(link_set).encode("utf-8"))
    return len(kept)
