"""Dataset registration, entity extraction, path profiling, and lint checks."""

from __future__ import annotations

import enum
import itertools
import threading
from dataclasses import dataclass, field

from .model import BlankNode, Graph, Iri, Literal, PropertyPath, Term, eval_path
from .vocab import RDF_TYPE, RDFS_LABEL
from .io import FormatTag

__all__ = [
    "DataSource",
    "DuplicateLabel",
    "Entity",
    "LintWarning",
    "PathProfile",
    "SourceRegistry",
    "Terminal",
    "extract_entities",
    "enumerate_property_paths",
    "lint_source",
    "suggest_property_pairs",
]

MAX_PATH_DEPTH = 4

GENERIC_LABEL_REUSE = "GENERIC_LABEL_REUSE"
RESOURCE_VALUED_PATH = "RESOURCE_VALUED_PATH"
MISSING_TYPE = "MISSING_TYPE"
DANGLING_REFERENCE = "DANGLING_REFERENCE"


class DuplicateLabel(Exception):
    """A source label is already taken in this registry."""


class Terminal(enum.Enum):
    LITERAL = "LITERAL"
    RESOURCE = "RESOURCE"
    MIXED = "MIXED"


@dataclass(frozen=True)
class Entity:
    """A linkable record: a root IRI within one registered source."""

    root: Iri
    source_id: str


@dataclass(frozen=True, eq=False)
class DataSource:
    id: str
    label: str
    graph: Graph
    format: FormatTag
    entity_type: Iri | None = None


@dataclass(frozen=True)
class PathProfile:
    path: PropertyPath
    frequency: int
    sample_values: tuple[str, ...]
    terminal: Terminal


@dataclass(frozen=True)
class LintWarning:
    code: str
    subject: Iri | None
    message: str


class SourceRegistry:
    """Holds registered sources; ids are assigned in registration order."""

    def __init__(self):
        self._by_id: dict[str, DataSource] = {}
        self._by_label: dict[str, str] = {}
        self._counter = itertools.count(1)
        self._lock = threading.Lock()

    def register(
        self,
        graph: Graph,
        label: str,
        fmt: FormatTag,
        entity_type: Iri | None = None,
    ) -> DataSource:
        with self._lock:
            if label in self._by_label:
                raise DuplicateLabel(f"a source labelled {label!r} is already registered")
            source_id = f"ds{next(self._counter)}"
            source = DataSource(source_id, label, graph, fmt, entity_type)
            self._by_id[source_id] = source
            self._by_label[label] = source_id
            return source

    def get(self, source_id: str) -> DataSource:
        return self._by_id[source_id]

    def find_label(self, label: str) -> DataSource | None:
        source_id = self._by_label.get(label)
        return self._by_id[source_id] if source_id else None

    def list(self) -> list[DataSource]:
        return list(self._by_id.values())

    def __len__(self) -> int:
        return len(self._by_id)


def extract_entities(source: DataSource) -> list[Entity]:
    """Pick the linkable roots of a source.

    With an entity type configured: every IRI subject carrying that rdf:type.
    Without one: every IRI subject that never appears as the object of
    another subject's triple, i.e. the roots of the subject graph (self
    references do not disqualify a subject).
    """
    graph = source.graph
    roots: list[Iri] = []
    if source.entity_type is not None:
        for subject in graph.subjects():
            if isinstance(subject, Iri) and source.entity_type in graph.objects(subject, RDF_TYPE):
                roots.append(subject)
    else:
        referenced: set[Term] = set()
        for t in graph.triples():
            if isinstance(t.object, Iri) and t.object != t.subject:
                referenced.add(t.object)
        for subject in graph.subjects():
            if isinstance(subject, Iri) and subject not in referenced:
                roots.append(subject)
    roots.sort()
    return [Entity(root, source.id) for root in roots]


@dataclass
class _PathData:
    entities: set[Iri] = field(default_factory=set)
    literals: set[str] = field(default_factory=set)
    kinds: set[str] = field(default_factory=set)


def _walk_paths(source: DataSource, max_depth: int) -> dict[tuple[Iri, ...], _PathData]:
    if not 1 <= max_depth <= MAX_PATH_DEPTH:
        raise ValueError(f"max_depth must be between 1 and {MAX_PATH_DEPTH}")
    graph = source.graph
    table: dict[tuple[Iri, ...], _PathData] = {}

    def visit(node: Term, root: Iri, path: tuple[Iri, ...]) -> None:
        for predicate in graph.predicates_for(node):
            if predicate in path:
                continue  # cycle cut: a predicate appears at most once per path
            objects = graph.objects(node, predicate)
            extended = path + (predicate,)
            data = table.setdefault(extended, _PathData())
            data.entities.add(root)
            for obj in objects:
                if isinstance(obj, Literal):
                    data.literals.add(obj.lexical)
                    data.kinds.add("literal")
                else:
                    data.kinds.add("resource")
            if len(extended) < max_depth:
                for obj in objects:
                    if isinstance(obj, (Iri, BlankNode)):
                        visit(obj, root, extended)

    for entity in extract_entities(source):
        visit(entity.root, entity.root, ())
    return table


def enumerate_property_paths(source: DataSource, max_depth: int = 3) -> list[PathProfile]:
    """Profile every property path reachable from the source's entities."""
    profiles = []
    for steps, data in sorted(_walk_paths(source, max_depth).items(), key=lambda kv: [s.value for s in kv[0]]):
        terminal = (
            Terminal.MIXED
            if len(data.kinds) == 2
            else (Terminal.LITERAL if "literal" in data.kinds else Terminal.RESOURCE)
        )
        profiles.append(
            PathProfile(
                path=PropertyPath(steps),
                frequency=len(data.entities),
                sample_values=tuple(sorted(data.literals)[:5]),
                terminal=terminal,
            )
        )
    return profiles


def _iri_namespace(iri: Iri) -> str:
    value = iri.value
    hash_pos = value.rfind("#")
    if hash_pos >= 0:
        return value[: hash_pos + 1]
    slash_pos = value.rfind("/")
    return value[: slash_pos + 1] if slash_pos >= 0 else value


def lint_source(source: DataSource) -> list[LintWarning]:
    """Data-quality checks that commonly break naive linkage rules."""
    graph = source.graph
    warnings: list[LintWarning] = []

    labelled_classes: set[Iri] = set()
    for subject in graph.subjects():
        if graph.objects(subject, RDFS_LABEL):
            for t in graph.objects(subject, RDF_TYPE):
                if isinstance(t, Iri):
                    labelled_classes.add(t)
    if len(labelled_classes) >= 2:
        names = ", ".join(c.value for c in sorted(labelled_classes))
        warnings.append(
            LintWarning(
                GENERIC_LABEL_REUSE,
                None,
                f"rdfs:label is used on instances of multiple classes ({names}); "
                "label comparisons will mix unrelated things",
            )
        )

    for entity in extract_entities(source):
        if not graph.objects(entity.root, RDF_TYPE):
            warnings.append(
                LintWarning(MISSING_TYPE, entity.root, f"entity {entity.root.value} has no rdf:type")
            )

    for profile in enumerate_property_paths(source, max_depth=1):
        if profile.terminal is Terminal.RESOURCE and profile.path.steps != (RDF_TYPE,):
            rendered = profile.path.render(graph.prefixes)
            warnings.append(
                LintWarning(
                    RESOURCE_VALUED_PATH,
                    None,
                    f"path {rendered} only reaches resources; extend it to a literal before comparing",
                )
            )

    subjects = {s for s in graph.subjects() if isinstance(s, Iri)}
    subject_namespaces = {_iri_namespace(s) for s in subjects}
    dangling: set[Iri] = set()
    for t in graph.triples():
        obj = t.object
        if (
            isinstance(obj, Iri)
            and t.predicate != RDF_TYPE
            and obj not in subjects
            and _iri_namespace(obj) in subject_namespaces
        ):
            dangling.add(obj)
    for obj in sorted(dangling):
        warnings.append(
            LintWarning(
                DANGLING_REFERENCE,
                obj,
                f"{obj.value} is referenced but has no triples of its own",
            )
        )

    warnings.sort(key=lambda w: (w.code, w.subject.value if w.subject else "", w.message))
    return warnings


def _normalize_value(value: str) -> str:
    return value.strip().lower()


def suggest_property_pairs(
    source: DataSource,
    target: DataSource,
    max_depth: int = 2,
) -> list[tuple[PropertyPath, PropertyPath, float]]:
    """Rank path pairs by Jaccard overlap of their normalized literal values."""
    source_values = {
        steps: {_normalize_value(v) for v in data.literals}
        for steps, data in _walk_paths(source, max_depth).items()
        if data.literals
    }
    target_values = {
        steps: {_normalize_value(v) for v in data.literals}
        for steps, data in _walk_paths(target, max_depth).items()
        if data.literals
    }
    scored = []
    for s_steps, s_vals in source_values.items():
        for t_steps, t_vals in target_values.items():
            overlap = s_vals & t_vals
            if not overlap:
                continue
            score = len(overlap) / len(s_vals | t_vals)
            scored.append((PropertyPath(s_steps), PropertyPath(t_steps), score))
    scored.sort(key=lambda row: (-row[2], [s.value for s in row[0].steps], [s.value for s in row[1].steps]))
    return scored
