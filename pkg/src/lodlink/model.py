"""RDF data model: terms, triples, graphs, prefix maps, and property paths.

Everything downstream (parsers, linkage rules, enrichment) is built on the
types in this module.  Graphs are plain in-memory triple sets with a
subject/predicate index; that is deliberate, the toolkit targets datasets
that fit comfortably in memory.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

__all__ = [
    "BlankNode",
    "Graph",
    "Iri",
    "Literal",
    "PrefixMap",
    "PropertyPath",
    "Term",
    "Triple",
    "UnboundPrefix",
    "eval_path",
    "isomorphic",
    "nt_term",
    "nt_triple",
]

_IRI_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
_IRI_FORBIDDEN = re.compile(r'[\x00-\x20<>"{}|^`\\]')
_BNODE_LABEL = re.compile(r"^[A-Za-z0-9_]+$")
_LANG_TAG = re.compile(r"^[A-Za-z]{1,8}(-[A-Za-z0-9]{1,8})*$")


class UnboundPrefix(Exception):
    """A compact name used a prefix label with no namespace binding."""

    def __init__(self, label: str):
        super().__init__(f"unbound prefix: {label!r}")
        self.label = label


@dataclass(frozen=True, slots=True, order=True)
class Iri:
    """An absolute IRI."""

    value: str

    def __post_init__(self):
        if not _IRI_SCHEME.match(self.value):
            raise ValueError(f"not an absolute IRI: {self.value!r}")
        if _IRI_FORBIDDEN.search(self.value):
            raise ValueError(f"IRI contains forbidden characters: {self.value!r}")

    def __repr__(self):
        return f"Iri({self.value!r})"


@dataclass(frozen=True, slots=True)
class Literal:
    """A literal value: lexical form plus at most one of datatype or language."""

    lexical: str
    datatype: Iri | None = None
    language: str | None = None

    def __post_init__(self):
        if self.datatype is not None and self.language is not None:
            raise ValueError("a literal cannot carry both a datatype and a language tag")
        if self.language is not None:
            if not _LANG_TAG.match(self.language):
                raise ValueError(f"malformed language tag: {self.language!r}")
            object.__setattr__(self, "language", self.language.lower())

    def __repr__(self):
        if self.datatype is not None:
            return f"Literal({self.lexical!r}, datatype={self.datatype.value!r})"
        if self.language is not None:
            return f"Literal({self.lexical!r}, language={self.language!r})"
        return f"Literal({self.lexical!r})"


@dataclass(frozen=True, slots=True, order=True)
class BlankNode:
    """A graph-scoped node with no global identity."""

    label: str

    def __post_init__(self):
        if not _BNODE_LABEL.match(self.label):
            raise ValueError(f"invalid blank node label: {self.label!r}")

    def __repr__(self):
        return f"BlankNode({self.label!r})"


Term = Union[Iri, Literal, BlankNode]


@dataclass(frozen=True, slots=True)
class Triple:
    subject: Iri | BlankNode
    predicate: Iri
    object: Term

    def __post_init__(self):
        if not isinstance(self.subject, (Iri, BlankNode)):
            raise TypeError(f"triple subject must be an IRI or blank node, got {self.subject!r}")
        if not isinstance(self.predicate, Iri):
            raise TypeError(f"triple predicate must be an IRI, got {self.predicate!r}")
        if not isinstance(self.object, (Iri, Literal, BlankNode)):
            raise TypeError(f"triple object must be an RDF term, got {self.object!r}")

    def terms(self) -> tuple[Term, Term, Term]:
        return (self.subject, self.predicate, self.object)


_NT_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def escape_string(text: str) -> str:
    """Escape a literal lexical form for N-Triples/Turtle double-quoted strings."""
    out = []
    for ch in text:
        if ch in _NT_ESCAPES:
            out.append(_NT_ESCAPES[ch])
        elif ord(ch) < 0x20:
            out.append("\\u%04X" % ord(ch))
        else:
            out.append(ch)
    return "".join(out)


def nt_term(term: Term) -> str:
    """Render a term in N-Triples syntax."""
    if isinstance(term, Iri):
        return f"<{term.value}>"
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    if isinstance(term, Literal):
        body = f'"{escape_string(term.lexical)}"'
        if term.datatype is not None:
            return f"{body}^^<{term.datatype.value}>"
        if term.language is not None:
            return f"{body}@{term.language}"
        return body
    raise TypeError(f"not an RDF term: {term!r}")


def nt_triple(triple: Triple) -> str:
    return f"{nt_term(triple.subject)} {nt_term(triple.predicate)} {nt_term(triple.object)} ."


class PrefixMap:
    """Mutable mapping from prefix labels to namespace IRIs."""

    __slots__ = ("_bindings",)

    def __init__(self, bindings: dict[str, str] | None = None):
        self._bindings: dict[str, str] = {}
        if bindings:
            for label, namespace in bindings.items():
                self.bind(label, namespace)

    def bind(self, label: str, namespace: str) -> None:
        """Bind a label; rebinding an existing label replaces it."""
        if label != "" and not re.match(r"^[A-Za-z][A-Za-z0-9_.\-]*$", label):
            raise ValueError(f"invalid prefix label: {label!r}")
        Iri(namespace)  # namespaces must themselves be absolute IRIs
        self._bindings[label] = namespace

    def namespace(self, label: str) -> str | None:
        return self._bindings.get(label)

    def expand(self, compact: str) -> Iri:
        """Expand a compact name of the form label:local to a full IRI."""
        if ":" not in compact:
            raise ValueError(f"not a compact name (missing ':'): {compact!r}")
        label, local = compact.split(":", 1)
        namespace = self._bindings.get(label)
        if namespace is None:
            raise UnboundPrefix(label)
        return Iri(namespace + local)

    def compact(self, iri: Iri) -> str | None:
        """Compact an IRI against the longest matching namespace, or None."""
        best: tuple[int, str] | None = None
        for label, namespace in self._bindings.items():
            if iri.value.startswith(namespace) and len(namespace) < len(iri.value):
                key = (-len(namespace), label)
                if best is None or key < best:
                    best = key
        if best is None:
            return None
        label = best[1]
        return f"{label}:{iri.value[len(self._bindings[label]):]}"

    def items(self) -> list[tuple[str, str]]:
        return sorted(self._bindings.items())

    def copy(self) -> "PrefixMap":
        fresh = PrefixMap()
        fresh._bindings = dict(self._bindings)
        return fresh

    def update(self, other: "PrefixMap") -> None:
        self._bindings.update(other._bindings)

    def __contains__(self, label: str) -> bool:
        return label in self._bindings

    def __len__(self) -> int:
        return len(self._bindings)


@dataclass(frozen=True)
class PropertyPath:
    """A forward chain of predicates, evaluated left to right."""

    steps: tuple[Iri, ...]

    def __post_init__(self):
        if not self.steps:
            raise ValueError("a property path needs at least one step")
        if not all(isinstance(s, Iri) for s in self.steps):
            raise TypeError("property path steps must be IRIs")

    @classmethod
    def of(cls, *steps: Iri) -> "PropertyPath":
        return cls(tuple(steps))

    @classmethod
    def parse(cls, text: str, prefixes: PrefixMap) -> "PropertyPath":
        """Parse a '/'-separated path of compact names, <iri> references, or bare IRIs."""
        segments = _split_path(text)
        steps = []
        for seg in segments:
            seg = seg.strip()
            if not seg:
                raise ValueError(f"empty segment in property path: {text!r}")
            if seg.startswith("<") and seg.endswith(">"):
                steps.append(Iri(seg[1:-1]))
                continue
            label = seg.split(":", 1)[0] if ":" in seg else None
            if label is not None and label in prefixes:
                steps.append(prefixes.expand(seg))
            elif "://" in seg:
                steps.append(Iri(seg))
            elif label is not None:
                raise UnboundPrefix(label)
            else:
                raise ValueError(f"not a compact name or IRI: {seg!r}")
        return cls(tuple(steps))

    def render(self, prefixes: PrefixMap) -> str:
        """Render compactly where possible, falling back to <iri> segments."""
        parts = []
        for step in self.steps:
            short = prefixes.compact(step)
            parts.append(short if short is not None else f"<{step.value}>")
        return "/".join(parts)

    def __str__(self):
        return "/".join(f"<{s.value}>" for s in self.steps)


def _split_path(text: str) -> list[str]:
    """Split on '/' outside angle brackets so full IRIs survive intact."""
    parts: list[str] = []
    buf: list[str] = []
    depth = 0
    for ch in text:
        if ch == "<":
            depth += 1
        elif ch == ">":
            depth -= 1
            if depth < 0:
                raise ValueError(f"unbalanced '>' in property path: {text!r}")
        if ch == "/" and depth == 0:
            parts.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
    if depth != 0:
        raise ValueError(f"unclosed '<' in property path: {text!r}")
    parts.append("".join(buf))
    return parts


class Graph:
    """A set of triples plus the prefix bindings seen when it was parsed."""

    __slots__ = ("prefixes", "_triples", "_spo")

    def __init__(self, triples: Iterable[Triple] = (), prefixes: PrefixMap | None = None):
        self.prefixes = prefixes.copy() if prefixes is not None else PrefixMap()
        self._triples: set[Triple] = set()
        self._spo: dict[Term, dict[Iri, set[Term]]] = {}
        for t in triples:
            self.add(t)

    def add(self, triple: Triple) -> bool:
        """Insert a triple; returns False if it was already present."""
        if triple in self._triples:
            return False
        self._triples.add(triple)
        self._spo.setdefault(triple.subject, {}).setdefault(triple.predicate, set()).add(triple.object)
        return True

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, triple: Triple) -> bool:
        return triple in self._triples

    def __iter__(self) -> Iterator[Triple]:
        """Iterate in canonical order: N-Triples rendering of (s, p, o)."""
        return iter(sorted(self._triples, key=_triple_sort_key))

    def triples(self) -> set[Triple]:
        """The underlying triple set (do not mutate)."""
        return self._triples

    def subjects(self) -> list[Term]:
        return sorted(self._spo.keys(), key=nt_term)

    def has_subject(self, term: Term) -> bool:
        return term in self._spo

    def predicates_for(self, subject: Term) -> list[Iri]:
        index = self._spo.get(subject)
        if not index:
            return []
        return sorted(index.keys())

    def objects(self, subject: Term, predicate: Iri) -> set[Term]:
        index = self._spo.get(subject)
        if not index:
            return set()
        return set(index.get(predicate, ()))

    def copy(self) -> "Graph":
        fresh = Graph(prefixes=self.prefixes)
        fresh._triples = set(self._triples)
        fresh._spo = {s: {p: set(objs) for p, objs in pmap.items()} for s, pmap in self._spo.items()}
        return fresh


def _triple_sort_key(t: Triple) -> tuple[str, str, str]:
    return (nt_term(t.subject), nt_term(t.predicate), nt_term(t.object))


def eval_path(graph: Graph, root: Term, path: PropertyPath) -> set[Term]:
    """Follow a property path from a root node; empty set on any dead end."""
    if not isinstance(root, (Iri, BlankNode)):
        raise TypeError(f"path roots must be IRIs or blank nodes, got {root!r}")
    frontier: set[Term] = {root}
    for step in path.steps:
        reached: set[Term] = set()
        for node in frontier:
            if isinstance(node, (Iri, BlankNode)):
                reached |= graph.objects(node, step)
        if not reached:
            return set()
        frontier = reached
    return frontier


# --- graph isomorphism ----------------------------------------------------
#
# Checks equality up to a bijection of blank node labels.  Ground triples
# must match exactly; blank nodes are grouped by a structural signature and
# candidate bijections are tried within groups.  Exponential in the worst
# case, fine at the scale this toolkit targets.


def _has_bnode(t: Triple) -> bool:
    return isinstance(t.subject, BlankNode) or isinstance(t.object, BlankNode)


def _skeleton(t: Triple, anchor: BlankNode) -> str:
    """Render a triple with the anchor as '~self~' and other blank nodes as '~bn~'."""

    def show(term: Term) -> str:
        if isinstance(term, BlankNode):
            return "~self~" if term == anchor else "~bn~"
        return nt_term(term)

    return f"{show(t.subject)} {show(t.predicate)} {show(t.object)}"


def _bnode_signatures(triples: set[Triple]) -> dict[BlankNode, tuple[str, ...]]:
    nodes: set[BlankNode] = set()
    for t in triples:
        if isinstance(t.subject, BlankNode):
            nodes.add(t.subject)
        if isinstance(t.object, BlankNode):
            nodes.add(t.object)
    sigs: dict[BlankNode, tuple[str, ...]] = {}
    for n in nodes:
        rows = sorted(_skeleton(t, n) for t in triples if t.subject == n or t.object == n)
        sigs[n] = tuple(rows)
    return sigs


def _remap(t: Triple, mapping: dict[BlankNode, BlankNode]) -> Triple:
    s = mapping.get(t.subject, t.subject) if isinstance(t.subject, BlankNode) else t.subject
    o = mapping.get(t.object, t.object) if isinstance(t.object, BlankNode) else t.object
    return Triple(s, t.predicate, o)


def isomorphic(a: Graph, b: Graph) -> bool:
    """True when the graphs differ only in blank node labels."""
    ta, tb = a.triples(), b.triples()
    if len(ta) != len(tb):
        return False
    ground_a = {t for t in ta if not _has_bnode(t)}
    ground_b = {t for t in tb if not _has_bnode(t)}
    if ground_a != ground_b:
        return False
    rest_a = ta - ground_a
    rest_b = tb - ground_b
    sig_a = _bnode_signatures(rest_a)
    sig_b = _bnode_signatures(rest_b)
    if len(sig_a) != len(sig_b):
        return False
    if not sig_a:
        return rest_a == rest_b

    by_sig_b: dict[tuple[str, ...], list[BlankNode]] = {}
    for n, sig in sig_b.items():
        by_sig_b.setdefault(sig, []).append(n)
    candidates = {n: sorted(by_sig_b.get(sig, [])) for n, sig in sig_a.items()}
    if any(not c for c in candidates.values()):
        return False

    order = sorted(candidates, key=lambda n: (len(candidates[n]), n.label))
    used: set[BlankNode] = set()
    mapping: dict[BlankNode, BlankNode] = {}

    def assign(i: int) -> bool:
        if i == len(order):
            return {_remap(t, mapping) for t in rest_a} == rest_b
        n = order[i]
        for m in candidates[n]:
            if m in used:
                continue
            mapping[n] = m
            used.add(m)
            if assign(i + 1):
                return True
            used.discard(m)
            del mapping[n]
        return False

    return assign(0)


def content_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
