"""RDF/XML reader for the node-element subset (input only).

Handles rdf:RDF documents whose children are node elements: typed elements
or rdf:Description with rdf:about, property elements holding either a text
literal (optionally rdf:datatype or inherited xml:lang), an rdf:resource
reference, or exactly one nested node element.  Reification (rdf:ID),
rdf:parseType, rdf:nodeID, rdf:li, property attributes, and undeclared
entities raise UnsupportedConstruct with the element's position.
"""

from __future__ import annotations

import re
from xml.parsers import expat

from ..model import BlankNode, Graph, Iri, Literal, Term, Triple
from ..vocab import RDF_NS, RDF_TYPE
from . import ParseError, UnsupportedConstruct

__all__ = ["parse_rdfxml"]

XML_NS = "http://www.w3.org/XML/1998/namespace"

_UNSUPPORTED_RDF_ATTRS = {
    "ID": "rdf:ID (statement reification)",
    "parseType": "rdf:parseType",
    "nodeID": "rdf:nodeID",
    "bagID": "rdf:bagID",
    "aboutEach": "rdf:aboutEach",
    "aboutEachPrefix": "rdf:aboutEachPrefix",
}


class _Element:
    __slots__ = ("name", "attrs", "children", "text", "line", "column", "lang")

    def __init__(self, name: tuple[str | None, str], attrs: dict, line: int, column: int, lang: str | None):
        self.name = name
        self.attrs = attrs
        self.children: list[_Element] = []
        self.text: list[str] = []
        self.line = line
        self.column = column
        self.lang = lang


def _split_name(raw: str) -> tuple[str | None, str]:
    if " " in raw:
        ns, local = raw.split(" ", 1)
        return ns, local
    return None, raw


def _build_tree(text: str) -> tuple[_Element | None, list[tuple[str, str]]]:
    parser = expat.ParserCreate(namespace_separator=" ")
    root: list[_Element] = []
    stack: list[_Element] = []
    namespaces: list[tuple[str, str]] = []

    def start_ns(prefix, uri):
        if prefix and uri:
            namespaces.append((prefix, uri))
        elif uri:
            namespaces.append(("", uri))

    def start(raw_name, attrs):
        name = _split_name(raw_name)
        parsed_attrs = {_split_name(k): v for k, v in attrs.items()}
        inherited = stack[-1].lang if stack else None
        lang = parsed_attrs.get((XML_NS, "lang"), inherited)
        el = _Element(name, parsed_attrs, parser.CurrentLineNumber, parser.CurrentColumnNumber + 1, lang)
        if stack:
            stack[-1].children.append(el)
        else:
            root.append(el)
        stack.append(el)

    def end(raw_name):
        stack.pop()

    def chars(data):
        if stack:
            stack[-1].text.append(data)

    parser.StartNamespaceDeclHandler = start_ns
    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars

    try:
        parser.Parse(text, True)
    except expat.ExpatError as exc:
        line = getattr(exc, "lineno", 1)
        column = getattr(exc, "offset", 0) + 1
        message = expat.errors.messages.get(exc.code, str(exc))
        if exc.code == expat.errors.codes[expat.errors.XML_ERROR_UNDEFINED_ENTITY]:
            entity = _entity_at(text, line, column)
            raise UnsupportedConstruct(line, column, f"undeclared XML entity {entity}") from None
        raise ParseError(line, column, message) from None
    return (root[0] if root else None), namespaces


def _entity_at(text: str, line: int, column: int) -> str:
    try:
        row = text.split("\n")[line - 1]
    except IndexError:
        return "&...;"
    m = re.search(r"&[A-Za-z_][A-Za-z0-9_.\-]*;", row[max(0, column - 1):]) or re.search(
        r"&[A-Za-z_][A-Za-z0-9_.\-]*;", row
    )
    return m.group(0) if m else "&...;"


class _Builder:
    def __init__(self):
        self.graph = Graph()
        self._counter = 0

    def fresh_bnode(self) -> BlankNode:
        self._counter += 1
        return BlankNode(f"genid{self._counter}")

    def _check_attrs(self, el: _Element, allowed_rdf: set[str], allow_lang: bool) -> None:
        for (ns, local) in el.attrs:
            if ns == RDF_NS:
                if local in _UNSUPPORTED_RDF_ATTRS:
                    raise UnsupportedConstruct(el.line, el.column, _UNSUPPORTED_RDF_ATTRS[local])
                if local not in allowed_rdf:
                    raise UnsupportedConstruct(el.line, el.column, f"rdf:{local} attribute")
            elif ns == XML_NS:
                if local != "lang" or not allow_lang:
                    raise UnsupportedConstruct(el.line, el.column, f"xml:{local} attribute")
            else:
                shown = f"{{{ns}}}{local}" if ns else local
                raise UnsupportedConstruct(el.line, el.column, f"property attribute {shown}")

    def _element_iri(self, el: _Element) -> Iri:
        ns, local = el.name
        if ns is None:
            raise ParseError(el.line, el.column, f"element {local!r} is not in any namespace")
        try:
            return Iri(ns + local)
        except ValueError as exc:
            raise ParseError(el.line, el.column, str(exc)) from None

    def node_element(self, el: _Element) -> Term:
        self._check_attrs(el, allowed_rdf={"about"}, allow_lang=True)
        about = el.attrs.get((RDF_NS, "about"))
        if about is not None:
            try:
                subject: Term = Iri(about)
            except ValueError as exc:
                raise ParseError(el.line, el.column, str(exc)) from None
        else:
            subject = self.fresh_bnode()
        if el.name != (RDF_NS, "Description"):
            self.graph.add(Triple(subject, RDF_TYPE, self._element_iri(el)))
        if "".join(el.text).strip():
            raise ParseError(el.line, el.column, "unexpected text content in a node element")
        for child in el.children:
            self.property_element(child, subject)
        return subject

    def property_element(self, el: _Element, subject: Term) -> None:
        ns, local = el.name
        if (ns, local) == (RDF_NS, "li"):
            raise UnsupportedConstruct(el.line, el.column, "rdf:li container membership")
        predicate = self._element_iri(el)
        self._check_attrs(el, allowed_rdf={"resource", "datatype"}, allow_lang=True)
        resource = el.attrs.get((RDF_NS, "resource"))
        datatype = el.attrs.get((RDF_NS, "datatype"))
        text = "".join(el.text)

        if resource is not None:
            if el.children or text.strip():
                raise ParseError(el.line, el.column, "rdf:resource property must be empty")
            if datatype is not None:
                raise ParseError(el.line, el.column, "rdf:resource and rdf:datatype cannot be combined")
            try:
                obj: Term = Iri(resource)
            except ValueError as exc:
                raise ParseError(el.line, el.column, str(exc)) from None
            self.graph.add(Triple(subject, predicate, obj))
            return

        if el.children:
            if text.strip():
                raise ParseError(el.line, el.column, "mixed text and element content is not supported")
            if len(el.children) != 1:
                raise ParseError(el.line, el.column, "property elements may hold exactly one node element")
            obj = self.node_element(el.children[0])
            self.graph.add(Triple(subject, predicate, obj))
            return

        if datatype is not None:
            try:
                obj = Literal(text, datatype=Iri(datatype))
            except ValueError as exc:
                raise ParseError(el.line, el.column, str(exc)) from None
        elif el.lang:
            obj = Literal(text, language=el.lang)
        else:
            obj = Literal(text)
        self.graph.add(Triple(subject, predicate, obj))


def parse_rdfxml(text: str) -> Graph:
    root, namespaces = _build_tree(text)
    builder = _Builder()
    for prefix, uri in namespaces:
        try:
            builder.graph.prefixes.bind(prefix, uri)
        except ValueError:
            pass  # xmlns decls that are not absolute IRIs are unusable as prefixes
    if root is None:
        return builder.graph
    if root.name == (RDF_NS, "RDF"):
        if "".join(root.text).strip():
            raise ParseError(root.line, root.column, "unexpected text directly under rdf:RDF")
        for (ns, local) in root.attrs:
            if ns == RDF_NS:
                raise UnsupportedConstruct(root.line, root.column, f"rdf:{local} attribute")
        for child in root.children:
            builder.node_element(child)
    else:
        builder.node_element(root)
    return builder.graph
