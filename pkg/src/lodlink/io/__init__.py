"""Reading and writing RDF graphs in N-Triples, Turtle, and RDF/XML."""

from __future__ import annotations

import enum
from pathlib import Path

from ..model import Graph

__all__ = [
    "FormatTag",
    "ParseError",
    "UnknownFormat",
    "UnsupportedConstruct",
    "detect_format",
    "load_path",
    "parse",
    "serialize",
]


class FormatTag(enum.Enum):
    NTRIPLES = "ntriples"
    TURTLE = "turtle"
    RDFXML = "rdfxml"


class UnknownFormat(Exception):
    """No serialization format could be determined for the input."""


class ParseError(Exception):
    """A syntax or model error at a 1-based line/column position."""

    def __init__(self, line: int, column: int, message: str):
        self.line = max(1, line)
        self.column = max(1, column)
        self.message = message
        super().__init__(f"line {self.line}, column {self.column}: {message}")


class UnsupportedConstruct(ParseError):
    """Well-formed input using a construct outside the supported subset."""

    def __init__(self, line: int, column: int, construct: str):
        self.construct = construct
        super().__init__(line, column, f"unsupported construct: {construct}")


_EXTENSIONS = {
    ".nt": FormatTag.NTRIPLES,
    ".ttl": FormatTag.TURTLE,
    ".turtle": FormatTag.TURTLE,
    ".rdf": FormatTag.RDFXML,
    ".xml": FormatTag.RDFXML,
    ".owl": FormatTag.RDFXML,
}


def detect_format(filename: str, content: str | bytes = "") -> FormatTag:
    """Pick a format from the file extension, else sniff the content head."""
    suffix = Path(filename).suffix.lower()
    if suffix in _EXTENSIONS:
        return _EXTENSIONS[suffix]
    if isinstance(content, bytes):
        content = content.decode("utf-8", errors="replace")
    head = content.lstrip("﻿ \t\r\n")
    if head.startswith("<?xml") or head.startswith("<rdf:RDF"):
        return FormatTag.RDFXML
    if head.startswith("@prefix"):
        return FormatTag.TURTLE
    if head:
        return FormatTag.NTRIPLES
    raise UnknownFormat(f"cannot determine RDF format of {filename!r}")


def parse(text: str, fmt: FormatTag) -> Graph:
    from . import ntriples, rdfxml, turtle

    if fmt is FormatTag.NTRIPLES:
        return ntriples.parse_ntriples(text)
    if fmt is FormatTag.TURTLE:
        return turtle.parse_turtle(text)
    if fmt is FormatTag.RDFXML:
        return rdfxml.parse_rdfxml(text)
    raise UnknownFormat(f"no parser for {fmt!r}")


def serialize(graph: Graph, fmt: FormatTag) -> str:
    from . import ntriples, turtle

    if fmt is FormatTag.NTRIPLES:
        return ntriples.serialize_ntriples(graph)
    if fmt is FormatTag.TURTLE:
        return turtle.serialize_turtle(graph)
    if fmt is FormatTag.RDFXML:
        raise UnknownFormat("RDF/XML output is not supported; use turtle or ntriples")
    raise UnknownFormat(f"no serializer for {fmt!r}")


def load_path(path: str | Path, fmt: FormatTag | None = None) -> tuple[Graph, FormatTag]:
    """Read a file, detect its format unless given, and parse it."""
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    tag = fmt if fmt is not None else detect_format(p.name, text[:512])
    return parse(text, tag), tag
