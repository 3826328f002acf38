"""Enriching a graph from discovered links.

Two modes: inject the link triples themselves, or additionally copy
metadata from the linked target records onto the source subjects under a
MergePolicy.  Both are monotone (the input graph is never shrunk) and
idempotent; every added triple carries an origin and every skipped
candidate a reason, so a provenance sidecar can be rendered.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Mapping, Sequence

from .dataset import DataSource
from .matcher import Link, LinkSet, Verdict
from .model import BlankNode, Graph, Iri, Literal, PrefixMap, Term, Triple, nt_triple
from .vocab import (
    AKT_FULL_NAME,
    AKT_HAS_AUTHOR,
    AKT_HAS_DATE,
    AKT_HAS_TITLE,
    DC_CREATOR,
    DC_DATE,
    DC_TITLE,
    DCT_CONTRIBUTOR,
    DCT_CREATOR,
    DCT_DATE,
    DCT_TITLE,
    FOAF_NAME,
    OWL_NS,
    RDF_TYPE,
    RDFS_LABEL,
    SWRC_MONTH,
    SWRC_YEAR,
)

__all__ = [
    "DEFAULT_EXCLUDED_PROPERTIES",
    "DEFAULT_LABEL_PRIORITY",
    "EnrichmentMode",
    "EnrichmentReport",
    "MergePolicy",
    "PolicyError",
    "UnresolvableLinkTarget",
    "inject_links",
    "merge_metadata",
    "parse_merge_policy",
    "render_provenance",
]

REASON_ALREADY_PRESENT = "ALREADY_PRESENT"
REASON_DUPLICATE_VALUE = "DUPLICATE_VALUE"
REASON_NO_LABEL = "NO_LABEL"
REASON_BLANK_NODE = "BLANK_NODE"


class UnresolvableLinkTarget(Exception):
    """A link target is not a subject in any of the given target sources."""

    def __init__(self, iri: Iri):
        super().__init__(f"link target {iri.value} is not described by any target source")
        self.iri = iri


class EnrichmentMode(enum.Enum):
    LINKS_ONLY = "LINKS_ONLY"
    MERGE = "MERGE"


# Descriptive fields the source record should keep sole authority over; the
# merge never copies these from a linked record.
DEFAULT_EXCLUDED_PROPERTIES: frozenset[Iri] = frozenset(
    {
        RDF_TYPE,
        RDFS_LABEL,
        DCT_TITLE,
        DCT_DATE,
        DCT_CREATOR,
        DCT_CONTRIBUTOR,
        DC_TITLE,
        DC_CREATOR,
        DC_DATE,
        AKT_HAS_TITLE,
        AKT_HAS_AUTHOR,
        AKT_HAS_DATE,
        SWRC_YEAR,
        SWRC_MONTH,
    }
)

# Order in which a resource value is searched for a human-readable label
# when flattening it into a literal.
DEFAULT_LABEL_PRIORITY: tuple[Iri, ...] = (AKT_HAS_TITLE, RDFS_LABEL, DC_TITLE, FOAF_NAME, AKT_FULL_NAME)


@dataclass(frozen=True)
class MergePolicy:
    include_properties: frozenset[Iri] | None = None
    exclude_properties: frozenset[Iri] = DEFAULT_EXCLUDED_PROPERTIES
    flatten_resources: bool = True
    label_priority: tuple[Iri, ...] = DEFAULT_LABEL_PRIORITY

    def __post_init__(self):
        if self.include_properties is not None:
            clash = self.include_properties & self.exclude_properties
            if clash:
                names = ", ".join(sorted(i.value for i in clash))
                raise ValueError(f"properties cannot be both included and excluded: {names}")


@dataclass(frozen=True)
class EnrichmentReport:
    mode: EnrichmentMode
    added: tuple[tuple[Triple, str], ...]  # (triple, origin: task or source id)
    skipped: tuple[tuple[Triple, str], ...]  # (candidate triple, reason)


def _active_links(link_set: LinkSet) -> list[Link]:
    return [l for l in link_set.links if l.verdict is not Verdict.REJECTED]


def inject_links(graph: Graph, link_set: LinkSet) -> tuple[Graph, EnrichmentReport]:
    """Add each non-rejected link triple; re-adding is reported, not an error."""
    out = graph.copy()
    if "owl" not in out.prefixes:
        out.prefixes.bind("owl", OWL_NS)
    added: list[tuple[Triple, str]] = []
    skipped: list[tuple[Triple, str]] = []
    for link in _active_links(link_set):
        triple = Triple(link.source, link.predicate, link.target)
        if out.add(triple):
            added.append((triple, link_set.task_id))
        else:
            skipped.append((triple, REASON_ALREADY_PRESENT))
    return out, EnrichmentReport(EnrichmentMode.LINKS_ONLY, tuple(added), tuple(skipped))


def _flatten_label(target_graph: Graph, resource: Term, priority: tuple[Iri, ...]) -> str | None:
    for predicate in priority:
        labels = sorted(
            o.lexical for o in target_graph.objects(resource, predicate) if isinstance(o, Literal)
        )
        if labels:
            return labels[0]
    return None


def _normalize(value: str) -> str:
    return value.strip().lower()


def merge_metadata(
    graph: Graph,
    link_set: LinkSet,
    targets: Sequence[DataSource],
    policy: MergePolicy | None = None,
) -> tuple[Graph, EnrichmentReport]:
    """Inject links, then copy target record metadata onto linked subjects.

    For each non-rejected link, the target record's outgoing triples are
    copied onto the link's source subject unless the property is excluded
    (or outside an include list).  Resource values are flattened to a label
    literal when the policy asks for it; values already present on the
    subject (case/whitespace-insensitive) are skipped as duplicates.
    """
    policy = policy or MergePolicy()
    active = _active_links(link_set)

    resolved: dict[Iri, DataSource] = {}
    for link in active:
        for candidate in targets:
            if candidate.graph.has_subject(link.target):
                resolved[link.target] = candidate
                break
        else:
            raise UnresolvableLinkTarget(link.target)

    out, inject_report = inject_links(graph, link_set)
    added = list(inject_report.added)
    skipped = list(inject_report.skipped)

    # never copy the link predicates themselves a second time
    denied = set(policy.exclude_properties) | {RDF_TYPE} | {l.predicate for l in active}

    present: dict[Iri, set[str]] = {}

    def present_values(subject: Iri) -> set[str]:
        if subject not in present:
            values = set()
            for predicate in out.predicates_for(subject):
                for obj in out.objects(subject, predicate):
                    if isinstance(obj, Literal):
                        values.add(_normalize(obj.lexical))
            present[subject] = values
        return present[subject]

    for link in active:
        origin = resolved[link.target]
        target_graph = origin.graph
        subject = link.source
        rows = sorted(
            (
                (predicate, obj)
                for predicate in target_graph.predicates_for(link.target)
                for obj in target_graph.objects(link.target, predicate)
            ),
            key=lambda row: (row[0].value, nt_triple(Triple(subject, row[0], row[1]))),
        )
        for predicate, obj in rows:
            if predicate in denied:
                continue
            if policy.include_properties is not None and predicate not in policy.include_properties:
                continue
            if isinstance(obj, Literal):
                candidate = Triple(subject, predicate, obj)
                if _normalize(obj.lexical) in present_values(subject):
                    skipped.append((candidate, REASON_DUPLICATE_VALUE))
                    continue
                out.add(candidate)
                added.append((candidate, origin.id))
                present_values(subject).add(_normalize(obj.lexical))
            elif policy.flatten_resources:
                label = _flatten_label(target_graph, obj, policy.label_priority)
                if label is None:
                    skipped.append((Triple(subject, predicate, obj), REASON_NO_LABEL))
                    continue
                candidate = Triple(subject, predicate, Literal(label))
                if _normalize(label) in present_values(subject):
                    skipped.append((candidate, REASON_DUPLICATE_VALUE))
                    continue
                out.add(candidate)
                added.append((candidate, origin.id))
                present_values(subject).add(_normalize(label))
            elif isinstance(obj, BlankNode):
                skipped.append((Triple(subject, predicate, obj), REASON_BLANK_NODE))
            else:
                candidate = Triple(subject, predicate, obj)
                if out.add(candidate):
                    added.append((candidate, origin.id))
                else:
                    skipped.append((candidate, REASON_ALREADY_PRESENT))

    return out, EnrichmentReport(EnrichmentMode.MERGE, tuple(added), tuple(skipped))


class PolicyError(Exception):
    """A merge policy document is malformed."""


def parse_merge_policy(text: str) -> MergePolicy:
    """Parse a policy from its JSON form.

    Keys (all optional): prefixes, includeProperties, excludeProperties,
    flattenResources, labelPriority.  IRIs may be compact against the
    document's prefixes.  excludeProperties replaces the default deny list.
    """
    from .vocab import WELL_KNOWN_PREFIXES

    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PolicyError(f"policy is not valid JSON: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise PolicyError("policy must be a JSON object")
    known = {"prefixes", "includeProperties", "excludeProperties", "flattenResources", "labelPriority"}
    unknown = set(raw) - known
    if unknown:
        raise PolicyError(f"unknown policy key {sorted(unknown)[0]!r}")

    prefixes = PrefixMap(WELL_KNOWN_PREFIXES)
    for label, namespace in (raw.get("prefixes") or {}).items():
        try:
            prefixes.bind(label, namespace)
        except (TypeError, ValueError) as exc:
            raise PolicyError(f"bad prefix binding {label!r}: {exc}") from None

    def resolve(value) -> Iri:
        if not isinstance(value, str):
            raise PolicyError(f"expected an IRI string, got {value!r}")
        try:
            if value.startswith("<") and value.endswith(">"):
                return Iri(value[1:-1])
            if ":" in value and value.split(":", 1)[0] in prefixes:
                return prefixes.expand(value)
            return Iri(value)
        except ValueError as exc:
            raise PolicyError(str(exc)) from None

    def iri_list(key: str) -> list[Iri] | None:
        if key not in raw:
            return None
        values = raw[key]
        if not isinstance(values, list):
            raise PolicyError(f"{key} must be a list of IRI strings")
        return [resolve(v) for v in values]

    kwargs = {}
    include = iri_list("includeProperties")
    if include is not None:
        kwargs["include_properties"] = frozenset(include)
    exclude = iri_list("excludeProperties")
    if exclude is not None:
        kwargs["exclude_properties"] = frozenset(exclude)
    if "flattenResources" in raw:
        kwargs["flatten_resources"] = bool(raw["flattenResources"])
    labels = iri_list("labelPriority")
    if labels is not None:
        kwargs["label_priority"] = tuple(labels)
    try:
        return MergePolicy(**kwargs)
    except ValueError as exc:
        raise PolicyError(str(exc)) from None


def render_provenance(report: EnrichmentReport, origin_labels: Mapping[str, str] | None = None) -> str:
    """One line per added triple: canonical rendering, a tab, the origin label."""
    labels = origin_labels or {}
    lines = []
    for triple, origin in report.added:
        lines.append(f"{nt_triple(triple)}\t{labels.get(origin, origin)}")
    return "".join(line + "\n" for line in lines)
