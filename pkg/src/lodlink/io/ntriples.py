"""Line-oriented N-Triples reader and canonical writer.

The writer is the toolkit's canonical output: one triple per line, sorted
lexicographically, LF endings, and blank node labels derived from a content
hash so equal graphs serialize to identical bytes regardless of input labels.
"""

from __future__ import annotations

import hashlib

from ..model import BlankNode, Graph, Iri, Literal, Term, Triple, nt_term
from . import ParseError

__all__ = ["parse_ntriples", "serialize_ntriples"]

_ESCAPE_CODES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


class _LineScanner:
    """Cursor over a single line; positions are reported 1-based."""

    def __init__(self, line: str, lineno: int):
        self.text = line
        self.pos = 0
        self.lineno = lineno

    def error(self, message: str) -> ParseError:
        return ParseError(self.lineno, self.pos + 1, message)

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def expect(self, ch: str, what: str) -> None:
        if self.peek() != ch:
            raise self.error(f"expected {what}")
        self.pos += 1

    def read_iri(self) -> Iri:
        start = self.pos
        self.expect("<", "'<'")
        end = self.text.find(">", self.pos)
        if end < 0:
            raise ParseError(self.lineno, start + 1, "unterminated IRI")
        raw = self.text[self.pos:end]
        self.pos = end + 1
        try:
            return Iri(raw)
        except ValueError as exc:
            raise ParseError(self.lineno, start + 1, str(exc)) from None

    def read_bnode(self) -> BlankNode:
        start = self.pos
        self.pos += 1  # '_'
        self.expect(":", "':' after '_'")
        begin = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self.pos += 1
        label = self.text[begin:self.pos]
        if not label:
            raise ParseError(self.lineno, start + 1, "empty blank node label")
        return BlankNode(label)

    def read_string(self) -> str:
        start = self.pos
        self.expect('"', "'\"'")
        out: list[str] = []
        while True:
            if self.at_end():
                raise ParseError(self.lineno, start + 1, "unterminated string literal")
            ch = self.text[self.pos]
            self.pos += 1
            if ch == '"':
                return "".join(out)
            if ch != "\\":
                out.append(ch)
                continue
            if self.at_end():
                raise self.error("dangling escape at end of line")
            code = self.text[self.pos]
            self.pos += 1
            if code in _ESCAPE_CODES:
                out.append(_ESCAPE_CODES[code])
            elif code in ("u", "U"):
                width = 4 if code == "u" else 8
                hexpart = self.text[self.pos:self.pos + width]
                if len(hexpart) < width or any(c not in "0123456789abcdefABCDEF" for c in hexpart):
                    raise self.error(f"malformed \\{code} escape")
                out.append(chr(int(hexpart, 16)))
                self.pos += width
            else:
                raise ParseError(self.lineno, self.pos, f"unknown escape: \\{code}")

    def read_literal(self) -> Literal:
        lexical = self.read_string()
        if self.peek() == "^":
            self.pos += 1
            self.expect("^", "'^^' before datatype")
            dtype = self.read_iri()
            return Literal(lexical, datatype=dtype)
        if self.peek() == "@":
            self.pos += 1
            begin = self.pos
            while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "-"):
                self.pos += 1
            tag = self.text[begin:self.pos]
            try:
                return Literal(lexical, language=tag)
            except ValueError as exc:
                raise ParseError(self.lineno, begin + 1, str(exc)) from None
        return Literal(lexical)

    def read_term(self, position: str) -> Term:
        ch = self.peek()
        if ch == "<":
            return self.read_iri()
        if ch == "_":
            return self.read_bnode()
        if ch == '"':
            if position != "object":
                raise self.error(f"a literal cannot appear as triple {position}")
            return self.read_literal()
        raise self.error(f"expected triple {position}")


def parse_ntriples(text: str) -> Graph:
    graph = Graph()
    for lineno, line in enumerate(text.split("\n"), start=1):
        sc = _LineScanner(line.rstrip("\r"), lineno)
        sc.skip_ws()
        if sc.at_end() or sc.peek() == "#":
            continue
        subject = sc.read_term("subject")
        sc.skip_ws()
        predicate = sc.read_term("predicate")
        if not isinstance(predicate, Iri):
            raise ParseError(lineno, sc.pos, "triple predicate must be an IRI")
        sc.skip_ws()
        obj = sc.read_term("object")
        sc.skip_ws()
        sc.expect(".", "'.' terminating the triple")
        sc.skip_ws()
        if not sc.at_end() and sc.peek() != "#":
            raise sc.error("unexpected trailing content after '.'")
        graph.add(Triple(subject, predicate, obj))  # type: ignore[arg-type]
    return graph


def _canonical_labels(graph: Graph) -> dict[BlankNode, str]:
    """Assign deterministic content-derived labels to blank nodes.

    Two hashing rounds: first over each node's adjacent triples with blank
    nodes erased, then over the node's own hash joined with its neighbors'.
    Automorphic nodes (identical second-round hashes) are disambiguated by a
    counter suffix in original-label order, which keeps output stable for a
    given input graph.
    """
    nodes: set[BlankNode] = set()
    adjacency: dict[BlankNode, list[Triple]] = {}
    for t in graph.triples():
        for term in (t.subject, t.object):
            if isinstance(term, BlankNode):
                nodes.add(term)
                adjacency.setdefault(term, []).append(t)
    if not nodes:
        return {}

    def blanked(term: Term, anchor: BlankNode) -> str:
        if isinstance(term, BlankNode):
            return "~self~" if term == anchor else "~bn~"
        return nt_term(term)

    def digest(payload: str) -> str:
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    round1: dict[BlankNode, str] = {}
    for n in nodes:
        rows = sorted(
            f"{blanked(t.subject, n)} {nt_term(t.predicate)} {blanked(t.object, n)}"
            for t in adjacency[n]
        )
        round1[n] = digest("\n".join(rows))

    round2: dict[BlankNode, str] = {}
    for n in nodes:
        neighbor_hashes = []
        for t in adjacency[n]:
            for term in (t.subject, t.object):
                if isinstance(term, BlankNode) and term != n:
                    neighbor_hashes.append(round1[term])
        round2[n] = digest(round1[n] + "|" + "".join(sorted(neighbor_hashes)))

    by_hash: dict[str, list[BlankNode]] = {}
    for n in nodes:
        by_hash.setdefault(round2[n], []).append(n)
    labels: dict[BlankNode, str] = {}
    for h, group in by_hash.items():
        group.sort(key=lambda n: n.label)
        for i, n in enumerate(group):
            suffix = "" if i == 0 else f"x{i}"
            labels[n] = f"b{h[:16]}{suffix}"
    return labels


def serialize_ntriples(graph: Graph) -> str:
    labels = _canonical_labels(graph)

    def show(term: Term) -> str:
        if isinstance(term, BlankNode):
            return f"_:{labels[term]}"
        return nt_term(term)

    lines = sorted(
        f"{show(t.subject)} {nt_term(t.predicate)} {show(t.object)} ."
        for t in graph.triples()
    )
    return "".join(line + "\n" for line in lines)
