"""Turtle reader and writer for the subset the toolkit emits and consumes.

Supported syntax: @prefix directives, IRIs in angle brackets or compact
form, blank node labels, the 'a' keyword, double-quoted single-line strings
with optional language tag or datatype, and ';'/',' predicate-object lists.
Collections, anonymous blank nodes, multiline strings, and bare
numeric/boolean literals are rejected with a positioned error.
"""

from __future__ import annotations

import re

from ..model import (
    BlankNode,
    Graph,
    Iri,
    Literal,
    PrefixMap,
    Term,
    Triple,
    UnboundPrefix,
    escape_string,
    nt_term,
)
from ..vocab import RDF_TYPE
from . import ParseError
from .ntriples import _canonical_labels

__all__ = ["parse_turtle", "serialize_turtle"]

_ESCAPE_CODES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
_LABEL_CHARS = re.compile(r"[A-Za-z0-9_\-]")
_LOCAL_SAFE = re.compile(r"^[A-Za-z0-9_\-](?:[A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?$")


class _Token:
    __slots__ = ("kind", "value", "line", "column")

    def __init__(self, kind: str, value, line: int, column: int):
        self.kind = kind
        self.value = value
        self.line = line
        self.column = column


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.column = 1
        self._pending: _Token | None = None

    def error(self, message: str, line: int | None = None, column: int | None = None) -> ParseError:
        return ParseError(line or self.line, column or self.column, message)

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.pos >= len(self.text):
                return
            if self.text[self.pos] == "\n":
                self.line += 1
                self.column = 1
            else:
                self.column += 1
            self.pos += 1

    def _peek_char(self, offset: int = 0) -> str:
        i = self.pos + offset
        return self.text[i] if i < len(self.text) else ""

    def peek(self) -> _Token:
        if self._pending is None:
            self._pending = self._scan()
        return self._pending

    def next(self) -> _Token:
        tok = self.peek()
        self._pending = None
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(tok.line, tok.column, f"expected {what}")
        return tok

    def _skip_trivia(self) -> None:
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch in " \t\r\n":
                self._advance()
            elif ch == "#":
                while self.pos < len(self.text) and self.text[self.pos] != "\n":
                    self._advance()
            else:
                return

    def _scan(self) -> _Token:
        self._skip_trivia()
        line, column = self.line, self.column
        if self.pos >= len(self.text):
            return _Token("eof", None, line, column)
        ch = self.text[self.pos]

        if ch == "<":
            end = self.text.find(">", self.pos + 1)
            if end < 0:
                raise self.error("unterminated IRI", line, column)
            raw = self.text[self.pos + 1:end]
            self._advance(end + 1 - self.pos)
            try:
                return _Token("iriref", Iri(raw), line, column)
            except ValueError as exc:
                raise ParseError(line, column, str(exc)) from None

        if ch == '"':
            return self._scan_string(line, column)

        if ch == "@":
            self._advance()
            word = self._take_while(lambda c: c.isalnum() or c == "-")
            if word == "prefix":
                return _Token("prefix_kw", None, line, column)
            if word == "base":
                raise self.error("unsupported Turtle construct: @base", line, column)
            return _Token("langtag", word, line, column)

        if ch == "^" and self._peek_char(1) == "^":
            self._advance(2)
            return _Token("dtsep", None, line, column)

        if ch in ".;,":
            self._advance()
            return _Token({".": "dot", ";": "semi", ",": "comma"}[ch], None, line, column)

        if ch == "_" and self._peek_char(1) == ":":
            self._advance(2)
            label = self._take_while(lambda c: c.isalnum() or c == "_")
            if not label:
                raise self.error("empty blank node label", line, column)
            return _Token("blank", label, line, column)

        if ch in "[]()":
            raise self.error(f"unsupported Turtle construct: {ch!r}", line, column)

        if ch.isdigit() or (ch in "+-" and self._peek_char(1).isdigit()):
            raise self.error("unsupported Turtle construct: bare numeric literal", line, column)

        word = self._take_while(lambda c: bool(_LABEL_CHARS.match(c)))
        if self._peek_char() == ":":
            self._advance()
            local = self._scan_local()
            return _Token("pname", (word, local), line, column)
        if word == "a":
            return _Token("a", None, line, column)
        if word in ("true", "false"):
            raise self.error("unsupported Turtle construct: bare boolean literal", line, column)
        raise self.error(f"unexpected token {word or ch!r}", line, column)

    def _take_while(self, pred) -> str:
        start = self.pos
        while self.pos < len(self.text) and pred(self.text[self.pos]):
            self._advance()
        return self.text[start:self.pos]

    def _scan_local(self) -> str:
        out: list[str] = []
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c.isalnum() or c in "_-":
                out.append(c)
                self._advance()
            elif c == ".":
                # a dot is part of the name only when more name follows
                nxt = self._peek_char(1)
                if nxt.isalnum() or nxt in "_-.":
                    out.append(c)
                    self._advance()
                else:
                    break
            else:
                break
        return "".join(out)

    def _scan_string(self, line: int, column: int) -> _Token:
        if self.text[self.pos:self.pos + 3] == '"""':
            raise self.error("unsupported Turtle construct: multiline string", line, column)
        self._advance()  # opening quote
        out: list[str] = []
        while True:
            if self.pos >= len(self.text) or self.text[self.pos] == "\n":
                raise self.error("unterminated string literal", line, column)
            c = self.text[self.pos]
            self._advance()
            if c == '"':
                return _Token("string", "".join(out), line, column)
            if c != "\\":
                out.append(c)
                continue
            if self.pos >= len(self.text):
                raise self.error("dangling escape", line, column)
            code = self.text[self.pos]
            self._advance()
            if code in _ESCAPE_CODES:
                out.append(_ESCAPE_CODES[code])
            elif code in ("u", "U"):
                width = 4 if code == "u" else 8
                hexpart = self.text[self.pos:self.pos + width]
                if len(hexpart) < width or any(h not in "0123456789abcdefABCDEF" for h in hexpart):
                    raise self.error(f"malformed \\{code} escape")
                out.append(chr(int(hexpart, 16)))
                self._advance(width)
            else:
                raise self.error(f"unknown escape: \\{code}")


def parse_turtle(text: str) -> Graph:
    graph = Graph()
    toks = _Tokenizer(text)

    def resolve_pname(tok: _Token) -> Iri:
        label, local = tok.value
        try:
            return graph.prefixes.expand(f"{label}:{local}")
        except UnboundPrefix:
            raise ParseError(tok.line, tok.column, f"unknown prefix {label!r}") from None
        except ValueError as exc:
            raise ParseError(tok.line, tok.column, str(exc)) from None

    def parse_resource(what: str) -> Iri | BlankNode:
        tok = toks.next()
        if tok.kind == "iriref":
            return tok.value
        if tok.kind == "pname":
            return resolve_pname(tok)
        if tok.kind == "blank":
            return BlankNode(tok.value)
        raise ParseError(tok.line, tok.column, f"expected {what}")

    def parse_verb() -> Iri:
        tok = toks.peek()
        if tok.kind == "a":
            toks.next()
            return RDF_TYPE
        term = parse_resource("a predicate")
        if not isinstance(term, Iri):
            raise ParseError(tok.line, tok.column, "predicates must be IRIs")
        return term

    def parse_object() -> Term:
        tok = toks.peek()
        if tok.kind == "string":
            toks.next()
            lexical = tok.value
            after = toks.peek()
            if after.kind == "langtag":
                toks.next()
                try:
                    return Literal(lexical, language=after.value)
                except ValueError as exc:
                    raise ParseError(after.line, after.column, str(exc)) from None
            if after.kind == "dtsep":
                toks.next()
                dtok = toks.next()
                if dtok.kind == "iriref":
                    return Literal(lexical, datatype=dtok.value)
                if dtok.kind == "pname":
                    return Literal(lexical, datatype=resolve_pname(dtok))
                raise ParseError(dtok.line, dtok.column, "expected a datatype IRI after '^^'")
            return Literal(lexical)
        return parse_resource("an object")

    while toks.peek().kind != "eof":
        if toks.peek().kind == "prefix_kw":
            toks.next()
            ptok = toks.expect("pname", "a prefix label ending in ':'")
            label, local = ptok.value
            if local:
                raise ParseError(ptok.line, ptok.column, "prefix labels must end with ':'")
            nstok = toks.expect("iriref", "a namespace IRI")
            toks.expect("dot", "'.' after @prefix directive")
            graph.prefixes.bind(label, nstok.value.value)
            continue

        subject = parse_resource("a subject")
        while True:
            predicate = parse_verb()
            while True:
                graph.add(Triple(subject, predicate, parse_object()))
                if toks.peek().kind == "comma":
                    toks.next()
                    continue
                break
            if toks.peek().kind == "semi":
                toks.next()
                while toks.peek().kind == "semi":
                    toks.next()
                if toks.peek().kind == "dot":
                    break
                continue
            break
        toks.expect("dot", "'.' terminating the statement")
    return graph


def _turtle_term(term: Term, prefixes: PrefixMap, bnode_labels: dict[BlankNode, str]) -> str:
    if isinstance(term, Iri):
        short = prefixes.compact(term)
        if short is not None:
            local = short.split(":", 1)[1]
            if local and _LOCAL_SAFE.match(local):
                return short
        return f"<{term.value}>"
    if isinstance(term, BlankNode):
        return f"_:{bnode_labels[term]}"
    body = f'"{escape_string(term.lexical)}"'
    if term.datatype is not None:
        return f"{body}^^{_turtle_term(term.datatype, prefixes, bnode_labels)}"
    if term.language is not None:
        return f"{body}@{term.language}"
    return body


def serialize_turtle(graph: Graph) -> str:
    """Group triples by subject with ';'/',' shorthands; rdf:type prints first as 'a'."""
    labels = _canonical_labels(graph)
    prefixes = graph.prefixes
    out: list[str] = []
    for label, namespace in prefixes.items():
        out.append(f"@prefix {label}: <{namespace}> .")
    if out:
        out.append("")

    def term(t: Term) -> str:
        return _turtle_term(t, prefixes, labels)

    by_subject: dict[Term, list[Triple]] = {}
    for t in graph.triples():
        by_subject.setdefault(t.subject, []).append(t)

    def subject_key(s: Term) -> str:
        return f"_:{labels[s]}" if isinstance(s, BlankNode) else nt_term(s)

    for subject in sorted(by_subject, key=subject_key):
        rows = by_subject[subject]
        by_pred: dict[Iri, list[Term]] = {}
        for t in rows:
            by_pred.setdefault(t.predicate, []).append(t.object)
        preds = sorted(by_pred, key=lambda p: (p != RDF_TYPE, p.value))
        lines: list[str] = []
        for i, pred in enumerate(preds):
            objects = ", ".join(sorted(term(o) for o in by_pred[pred]))
            verb = "a" if pred == RDF_TYPE else term(pred)
            head = term(subject) if i == 0 else "    "
            tail = " ." if i == len(preds) - 1 else " ;"
            lines.append(f"{head} {verb} {objects}{tail}")
        out.extend(lines)
        out.append("")
    return "\n".join(out)
