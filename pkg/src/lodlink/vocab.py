"""Well-known namespaces and the handful of terms the toolkit treats specially."""

from __future__ import annotations

from .model import Iri

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
OWL_NS = "http://www.w3.org/2002/07/owl#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"

DCT_NS = "http://purl.org/dc/terms/"
DC_NS = "http://purl.org/dc/elements/1.1/"
FOAF_NS = "http://xmlns.com/foaf/0.1/"
AKT_NS = "http://www.aktors.org/ontology/portal#"
AKTS_NS = "http://www.aktors.org/ontology/support#"
SWRC_NS = "http://swrc.ontoware.org/ontology#"

RDF_TYPE = Iri(RDF_NS + "type")
RDFS_LABEL = Iri(RDFS_NS + "label")
OWL_SAME_AS = Iri(OWL_NS + "sameAs")

DCT_TITLE = Iri(DCT_NS + "title")
DCT_DATE = Iri(DCT_NS + "date")
DCT_CREATOR = Iri(DCT_NS + "creator")
DCT_CONTRIBUTOR = Iri(DCT_NS + "contributor")

DC_TITLE = Iri(DC_NS + "title")
DC_CREATOR = Iri(DC_NS + "creator")
DC_DATE = Iri(DC_NS + "date")

FOAF_NAME = Iri(FOAF_NS + "name")

AKT_HAS_TITLE = Iri(AKT_NS + "has-title")
AKT_HAS_AUTHOR = Iri(AKT_NS + "has-author")
AKT_FULL_NAME = Iri(AKT_NS + "full-name")
AKT_HAS_DATE = Iri(AKT_NS + "has-date")
AKTS_YEAR_OF = Iri(AKTS_NS + "year-of")

SWRC_YEAR = Iri(SWRC_NS + "year")
SWRC_MONTH = Iri(SWRC_NS + "month")

# Seeded into every parsed rule spec so compact names like owl:sameAs always
# resolve; user-supplied bindings take precedence.
WELL_KNOWN_PREFIXES = {
    "rdf": RDF_NS,
    "rdfs": RDFS_NS,
    "owl": OWL_NS,
    "xsd": XSD_NS,
}
