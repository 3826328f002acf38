"""Link discovery and metadata enrichment for RDF bibliographic data."""

from .model import BlankNode, Graph, Iri, Literal, PrefixMap, PropertyPath, Triple

__version__ = "0.1.0"

__all__ = [
    "BlankNode",
    "Graph",
    "Iri",
    "Literal",
    "PrefixMap",
    "PropertyPath",
    "Triple",
    "__version__",
]
