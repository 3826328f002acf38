"""Linkage rules: comparators, transformations, rule trees, and the JSON spec format.

A rule is a tree whose leaves compare literal values reached over one
property path per side and whose inner nodes aggregate child decisions.
Confidence is always in [0, 1]; acceptance additionally requires clearing
the task threshold, which generate_links applies on top of the rule.
"""

from __future__ import annotations

import enum
import json
import re
import string
from dataclasses import dataclass, field, replace
from typing import Iterator, Union

from .model import Graph, Iri, Literal, PrefixMap, PropertyPath, Term, UnboundPrefix, eval_path
from .vocab import OWL_SAME_AS, WELL_KNOWN_PREFIXES
from .io import FormatTag
from .dataset import PathProfile, Terminal

__all__ = [
    "Aggregation",
    "AggregationOperator",
    "Comparator",
    "ComparatorKind",
    "Comparison",
    "EndpointSpec",
    "LinkageRule",
    "MatchDecision",
    "RuleIssue",
    "RuleNode",
    "Severity",
    "SpecError",
    "TaskSpec",
    "Transformation",
    "apply_transformations",
    "compare",
    "evaluate_comparison",
    "evaluate_rule",
    "first_comparison",
    "iter_comparisons",
    "levenshtein",
    "parse_rule_payload",
    "parse_rule_spec",
    "rule_to_payload",
    "validate_rule",
]

_PUNCTUATION_TABLE = str.maketrans("", "", string.punctuation)
_YEAR_RUN = re.compile(r"\d{4}")


class Transformation(enum.Enum):
    LOWERCASE = "LOWERCASE"
    TRIM = "TRIM"
    STRIP_PUNCTUATION = "STRIP_PUNCTUATION"

    def apply(self, value: str) -> str:
        if self is Transformation.LOWERCASE:
            return value.lower()
        if self is Transformation.TRIM:
            return value.strip()
        return value.translate(_PUNCTUATION_TABLE)


def apply_transformations(values: set[str], transformations: tuple[Transformation, ...]) -> set[str]:
    """Apply each transformation to every value, in order; output is a set."""
    out = set(values)
    for t in transformations:
        out = {t.apply(v) for v in out}
    return out


class ComparatorKind(enum.Enum):
    EQUALITY = "EQUALITY"
    LEVENSHTEIN = "LEVENSHTEIN"
    DATE_EQUALITY = "DATE_EQUALITY"


@dataclass(frozen=True)
class Comparator:
    kind: ComparatorKind
    max_distance: int | None = None

    def __post_init__(self):
        if self.kind is ComparatorKind.LEVENSHTEIN:
            if self.max_distance is None or self.max_distance < 0:
                raise ValueError("LEVENSHTEIN needs maxDistance >= 0")
        elif self.max_distance is not None:
            raise ValueError(f"maxDistance is only valid for LEVENSHTEIN, not {self.kind.value}")


@dataclass(frozen=True)
class MatchDecision:
    accept: bool
    confidence: float

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must be within [0, 1], got {self.confidence}")


def levenshtein(a: str, b: str) -> int:
    """Edit distance (insert/delete/substitute, all cost 1)."""
    if a == b:
        return 0
    # shared prefixes and suffixes never change the distance
    la, lb = len(a), len(b)
    start = 0
    while start < la and start < lb and a[start] == b[start]:
        start += 1
    end = 0
    while end < la - start and end < lb - start and a[la - 1 - end] == b[lb - 1 - end]:
        end += 1
    a = a[start : la - end]
    b = b[start : lb - end]
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for row, ca in enumerate(a, start=1):
        current = [row] + [0] * len(b)
        for col, cb in enumerate(b, start=1):
            current[col] = min(
                previous[col] + 1,
                current[col - 1] + 1,
                previous[col - 1] + (ca != cb),
            )
        previous = current
    return previous[-1]


def _first_year(value: str) -> str | None:
    m = _YEAR_RUN.search(value)
    return m.group(0) if m else None


def compare(comparator: Comparator, a: str, b: str) -> MatchDecision:
    """Compare two strings; confidence grades LEVENSHTEIN, others are 0/1."""
    if comparator.kind is ComparatorKind.EQUALITY:
        equal = a == b
        return MatchDecision(equal, 1.0 if equal else 0.0)
    if comparator.kind is ComparatorKind.LEVENSHTEIN:
        distance = levenshtein(a, b)
        confidence = 1.0 - distance / max(len(a), len(b), 1)
        return MatchDecision(distance <= comparator.max_distance, max(confidence, 0.0))
    year_a, year_b = _first_year(a), _first_year(b)
    equal = year_a is not None and year_a == year_b
    return MatchDecision(equal, 1.0 if equal else 0.0)


class AggregationOperator(enum.Enum):
    MINIMUM = "MINIMUM"
    MAXIMUM = "MAXIMUM"
    AVERAGE = "AVERAGE"


@dataclass(frozen=True)
class Comparison:
    id: str
    source_path: PropertyPath
    target_path: PropertyPath
    comparator: Comparator
    transformations: tuple[Transformation, ...] = ()


@dataclass(frozen=True)
class Aggregation:
    id: str
    operator: AggregationOperator
    children: tuple["RuleNode", ...]
    weights: tuple[float, ...] | None = None


RuleNode = Union[Comparison, Aggregation]


@dataclass(frozen=True)
class LinkageRule:
    root: RuleNode
    link_type: Iri = OWL_SAME_AS
    threshold: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must be within [0, 1], got {self.threshold}")


def iter_comparisons(node: RuleNode) -> Iterator[Comparison]:
    """Comparisons in document order (depth first, children left to right)."""
    if isinstance(node, Comparison):
        yield node
        return
    for child in node.children:
        yield from iter_comparisons(child)


def first_comparison(rule: LinkageRule) -> Comparison:
    try:
        return next(iter_comparisons(rule.root))
    except StopIteration:
        raise ValueError("rule has no comparisons") from None


def literal_values(
    graph: Graph,
    root: Term,
    path: PropertyPath,
    transformations: tuple[Transformation, ...] = (),
) -> set[str]:
    """Literal lexical forms at the end of a path, transformed."""
    values = {t.lexical for t in eval_path(graph, root, path) if isinstance(t, Literal)}
    return apply_transformations(values, transformations)


def evaluate_comparison(
    comparison: Comparison,
    source_graph: Graph,
    source_root: Term,
    target_graph: Graph,
    target_root: Term,
) -> MatchDecision:
    """Best pairing over the value cross product; missing values reject at 0."""
    source_values = literal_values(source_graph, source_root, comparison.source_path, comparison.transformations)
    target_values = literal_values(target_graph, target_root, comparison.target_path, comparison.transformations)
    if not source_values or not target_values:
        return MatchDecision(False, 0.0)
    best_accepted: float | None = None
    best_overall = 0.0
    for a in source_values:
        for b in target_values:
            decision = compare(comparison.comparator, a, b)
            best_overall = max(best_overall, decision.confidence)
            if decision.accept and (best_accepted is None or decision.confidence > best_accepted):
                best_accepted = decision.confidence
    if best_accepted is not None:
        return MatchDecision(True, best_accepted)
    return MatchDecision(False, best_overall)


def _evaluate_node(
    node: RuleNode,
    source_graph: Graph,
    source_root: Term,
    target_graph: Graph,
    target_root: Term,
) -> MatchDecision:
    if isinstance(node, Comparison):
        return evaluate_comparison(node, source_graph, source_root, target_graph, target_root)
    decisions = [
        _evaluate_node(child, source_graph, source_root, target_graph, target_root)
        for child in node.children
    ]
    if not decisions:
        raise ValueError(f"aggregation {node.id!r} has no children")
    confidences = [d.confidence for d in decisions]
    if node.operator is AggregationOperator.MINIMUM:
        return MatchDecision(all(d.accept for d in decisions), min(confidences))
    if node.operator is AggregationOperator.MAXIMUM:
        return MatchDecision(any(d.accept for d in decisions), max(confidences))
    weights = node.weights if node.weights is not None else tuple(1.0 for _ in decisions)
    total = sum(weights)
    weighted = sum(w * c for w, c in zip(weights, confidences)) / total
    return MatchDecision(all(d.accept for d in decisions), weighted)


def evaluate_rule(
    rule: LinkageRule,
    source_graph: Graph,
    source_root: Term,
    target_graph: Graph,
    target_root: Term,
) -> MatchDecision:
    return _evaluate_node(rule.root, source_graph, source_root, target_graph, target_root)


# --- validation -------------------------------------------------------------


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class RuleIssue:
    severity: Severity
    node_id: str | None
    message: str


def _error(node_id: str | None, message: str) -> RuleIssue:
    return RuleIssue(Severity.ERROR, node_id, message)


def _warning(node_id: str | None, message: str) -> RuleIssue:
    return RuleIssue(Severity.WARNING, node_id, message)


# Predicates that hold literal values in the datasets this tool targets;
# producing links with one of these would assert a literal object.
_LITERAL_PREDICATES = {
    "http://www.w3.org/2000/01/rdf-schema#label",
    "http://purl.org/dc/terms/title",
    "http://purl.org/dc/elements/1.1/title",
    "http://xmlns.com/foaf/0.1/name",
}


def validate_rule(
    rule: LinkageRule,
    source_paths: list[PathProfile] | None = None,
    target_paths: list[PathProfile] | None = None,
) -> list[RuleIssue]:
    """Structural errors plus advisory warnings against profiled paths.

    Errors make the rule unrunnable; warnings (unknown custom paths,
    resource-valued endpoints) do not.
    """
    issues: list[RuleIssue] = []
    seen_ids: set[str] = set()

    def check_path(node_id: str, path: PropertyPath, profiles: list[PathProfile] | None, side: str) -> None:
        if profiles is None:
            return
        by_steps = {p.path.steps: p for p in profiles}
        profile = by_steps.get(path.steps)
        if profile is None:
            issues.append(_warning(node_id, f"{side} path {path} was not found in the dataset (custom path)"))
        elif profile.terminal is Terminal.RESOURCE:
            issues.append(
                _warning(node_id, f"{side} path {path} only reaches resources; extend it to a literal")
            )

    def walk(node: RuleNode) -> None:
        if node.id in seen_ids:
            issues.append(_error(node.id, f"duplicate node id {node.id!r}"))
        seen_ids.add(node.id)
        if isinstance(node, Aggregation):
            if not node.children:
                issues.append(_error(node.id, "aggregation has no children"))
            if node.weights is not None:
                if node.operator is not AggregationOperator.AVERAGE:
                    issues.append(_error(node.id, "weights are only valid on AVERAGE aggregations"))
                elif len(node.weights) != len(node.children):
                    issues.append(
                        _error(
                            node.id,
                            f"{len(node.weights)} weights for {len(node.children)} children",
                        )
                    )
                elif any(w <= 0 for w in node.weights):
                    issues.append(_error(node.id, "weights must be positive"))
            for child in node.children:
                walk(child)
        else:
            check_path(node.id, node.source_path, source_paths, "source")
            check_path(node.id, node.target_path, target_paths, "target")

    walk(rule.root)
    if rule.link_type.value in _LITERAL_PREDICATES:
        issues.append(_error(None, f"link type {rule.link_type.value} is a literal-valued property"))
    return issues


def rule_errors(issues: list[RuleIssue]) -> list[RuleIssue]:
    return [i for i in issues if i.severity is Severity.ERROR]


def rule_warnings(issues: list[RuleIssue]) -> list[RuleIssue]:
    return [i for i in issues if i.severity is Severity.WARNING]


# --- JSON task specs --------------------------------------------------------


class SpecError(Exception):
    """A structural problem in a task spec, with a JSON-path-ish location."""

    def __init__(self, location: str, message: str):
        self.location = location
        self.message = message
        super().__init__(f"{location}: {message}")


@dataclass(frozen=True)
class EndpointSpec:
    label: str
    file: str | None = None
    format: FormatTag | None = None
    entity_type: Iri | None = None


@dataclass(frozen=True)
class TaskSpec:
    source: EndpointSpec
    target: EndpointSpec
    rule: LinkageRule
    prefixes: PrefixMap = field(default_factory=PrefixMap)


def _require(obj: dict, key: str, kind: type, location: str):
    if key not in obj:
        raise SpecError(location, f"missing required key {key!r}")
    value = obj[key]
    if not isinstance(value, kind) or (kind is not bool and isinstance(value, bool)):
        raise SpecError(f"{location}.{key}", f"expected {kind.__name__}")
    return value


def _parse_path(raw, prefixes: PrefixMap, location: str) -> PropertyPath:
    try:
        if isinstance(raw, str):
            return PropertyPath.parse(raw, prefixes)
        if isinstance(raw, list) and raw and all(isinstance(s, str) for s in raw):
            return PropertyPath(tuple(Iri(s) for s in raw))
    except (UnboundPrefix, ValueError) as exc:
        raise SpecError(location, str(exc)) from None
    raise SpecError(location, "expected a path string or a list of IRI strings")


def _parse_iri(raw, prefixes: PrefixMap, location: str) -> Iri:
    if not isinstance(raw, str):
        raise SpecError(location, "expected an IRI string")
    try:
        if raw.startswith("<") and raw.endswith(">"):
            return Iri(raw[1:-1])
        label = raw.split(":", 1)[0] if ":" in raw else None
        if label is not None and label in prefixes:
            return prefixes.expand(raw)
        return Iri(raw)
    except (UnboundPrefix, ValueError) as exc:
        raise SpecError(location, str(exc)) from None


def parse_rule_payload(obj, prefixes: PrefixMap, location: str = "rule") -> RuleNode:
    """Parse one rule tree node from its JSON object form."""
    if not isinstance(obj, dict) or len(obj) != 1 or next(iter(obj)) not in ("compare", "aggregate"):
        raise SpecError(location, "expected an object with a single 'compare' or 'aggregate' key")

    if "compare" in obj:
        body = obj["compare"]
        if not isinstance(body, dict):
            raise SpecError(f"{location}.compare", "expected an object")
        loc = f"{location}.compare"
        node_id = _require(body, "id", str, loc)
        source_path = _parse_path(body.get("sourcePath"), prefixes, f"{loc}.sourcePath")
        target_path = _parse_path(body.get("targetPath"), prefixes, f"{loc}.targetPath")
        transformations = []
        for i, name in enumerate(body.get("transformations", [])):
            try:
                transformations.append(Transformation(name))
            except ValueError:
                raise SpecError(f"{loc}.transformations[{i}]", f"unknown transformation {name!r}") from None
        comp = _require(body, "comparator", dict, loc)
        kind_name = _require(comp, "kind", str, f"{loc}.comparator")
        try:
            kind = ComparatorKind(kind_name)
        except ValueError:
            raise SpecError(f"{loc}.comparator.kind", f"unknown comparator kind {kind_name!r}") from None
        max_distance = comp.get("maxDistance")
        if max_distance is not None and (not isinstance(max_distance, int) or isinstance(max_distance, bool)):
            raise SpecError(f"{loc}.comparator.maxDistance", "expected an integer")
        unknown = set(comp) - {"kind", "maxDistance"}
        if unknown:
            raise SpecError(f"{loc}.comparator", f"unknown key {sorted(unknown)[0]!r}")
        try:
            comparator = Comparator(kind, max_distance)
        except ValueError as exc:
            raise SpecError(f"{loc}.comparator", str(exc)) from None
        unknown = set(body) - {"id", "sourcePath", "targetPath", "transformations", "comparator"}
        if unknown:
            raise SpecError(loc, f"unknown key {sorted(unknown)[0]!r}")
        return Comparison(node_id, source_path, target_path, comparator, tuple(transformations))

    body = obj["aggregate"]
    if not isinstance(body, dict):
        raise SpecError(f"{location}.aggregate", "expected an object")
    loc = f"{location}.aggregate"
    node_id = _require(body, "id", str, loc)
    op_name = _require(body, "operator", str, loc)
    try:
        operator = AggregationOperator(op_name)
    except ValueError:
        raise SpecError(f"{loc}.operator", f"unknown aggregation operator {op_name!r}") from None
    children_raw = _require(body, "children", list, loc)
    children = tuple(
        parse_rule_payload(child, prefixes, f"{loc}.children[{i}]") for i, child in enumerate(children_raw)
    )
    weights = None
    if "weights" in body:
        raw_weights = body["weights"]
        if not isinstance(raw_weights, list) or not all(
            isinstance(w, (int, float)) and not isinstance(w, bool) for w in raw_weights
        ):
            raise SpecError(f"{loc}.weights", "expected a list of numbers")
        weights = tuple(float(w) for w in raw_weights)
    unknown = set(body) - {"id", "operator", "children", "weights"}
    if unknown:
        raise SpecError(loc, f"unknown key {sorted(unknown)[0]!r}")
    return Aggregation(node_id, operator, children, weights)


_FORMAT_NAMES = {
    "ntriples": FormatTag.NTRIPLES,
    "nt": FormatTag.NTRIPLES,
    "turtle": FormatTag.TURTLE,
    "ttl": FormatTag.TURTLE,
    "rdfxml": FormatTag.RDFXML,
    "rdf/xml": FormatTag.RDFXML,
}


def _parse_endpoint(obj, location: str, prefixes: PrefixMap) -> EndpointSpec:
    if not isinstance(obj, dict):
        raise SpecError(location, "expected an object")
    label = _require(obj, "label", str, location)
    file = obj.get("file")
    if file is not None and not isinstance(file, str):
        raise SpecError(f"{location}.file", "expected a string")
    fmt = None
    if "format" in obj:
        raw = obj["format"]
        if not isinstance(raw, str) or raw.lower() not in _FORMAT_NAMES:
            raise SpecError(f"{location}.format", f"unknown format {raw!r}")
        fmt = _FORMAT_NAMES[raw.lower()]
    entity_type = None
    if "entityType" in obj:
        entity_type = _parse_iri(obj["entityType"], prefixes, f"{location}.entityType")
    unknown = set(obj) - {"label", "file", "format", "entityType"}
    if unknown:
        raise SpecError(location, f"unknown key {sorted(unknown)[0]!r}")
    return EndpointSpec(label, file, fmt, entity_type)


def parse_rule_spec(text: str) -> TaskSpec:
    """Parse a JSON task spec document into endpoints plus a linkage rule."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    if not isinstance(obj, dict):
        raise SpecError("$", "expected a JSON object")

    prefixes = PrefixMap(WELL_KNOWN_PREFIXES)
    raw_prefixes = obj.get("prefixes", {})
    if not isinstance(raw_prefixes, dict):
        raise SpecError("prefixes", "expected an object mapping labels to namespaces")
    for label, namespace in raw_prefixes.items():
        if not isinstance(namespace, str):
            raise SpecError(f"prefixes.{label}", "expected a namespace string")
        try:
            prefixes.bind(label, namespace)
        except ValueError as exc:
            raise SpecError(f"prefixes.{label}", str(exc)) from None

    source = _parse_endpoint(_require(obj, "source", dict, "$"), "source", prefixes)
    target = _parse_endpoint(_require(obj, "target", dict, "$"), "target", prefixes)

    link_type = OWL_SAME_AS
    if "linkType" in obj:
        link_type = _parse_iri(obj["linkType"], prefixes, "linkType")

    threshold = 0.0
    if "threshold" in obj:
        raw = obj["threshold"]
        if not isinstance(raw, (int, float)) or isinstance(raw, bool):
            raise SpecError("threshold", "expected a number")
        if not 0.0 <= raw <= 1.0:
            raise SpecError("threshold", f"threshold must be within [0, 1], got {raw}")
        threshold = float(raw)

    root = parse_rule_payload(_require(obj, "rule", dict, "$"), prefixes, "rule")

    unknown = set(obj) - {"prefixes", "source", "target", "linkType", "threshold", "rule"}
    if unknown:
        raise SpecError("$", f"unknown key {sorted(unknown)[0]!r}")

    rule = LinkageRule(root, link_type, threshold)
    return TaskSpec(source, target, rule, prefixes)


def node_to_payload(node: RuleNode) -> dict:
    if isinstance(node, Comparison):
        body: dict = {
            "id": node.id,
            "sourcePath": [s.value for s in node.source_path.steps],
            "targetPath": [s.value for s in node.target_path.steps],
            "comparator": {"kind": node.comparator.kind.value},
        }
        if node.comparator.max_distance is not None:
            body["comparator"]["maxDistance"] = node.comparator.max_distance
        if node.transformations:
            body["transformations"] = [t.value for t in node.transformations]
        return {"compare": body}
    body = {
        "id": node.id,
        "operator": node.operator.value,
        "children": [node_to_payload(c) for c in node.children],
    }
    if node.weights is not None:
        body["weights"] = list(node.weights)
    return {"aggregate": body}


def rule_to_payload(rule: LinkageRule) -> dict:
    """Serialize a rule to the JSON form parse_rule_payload accepts back."""
    return {
        "linkType": rule.link_type.value,
        "threshold": rule.threshold,
        "rule": node_to_payload(rule.root),
    }


def with_threshold(rule: LinkageRule, threshold: float) -> LinkageRule:
    return replace(rule, threshold=threshold)
