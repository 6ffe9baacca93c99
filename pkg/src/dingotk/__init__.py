"""dingotk: a linked-data toolkit for the DINGO research-funding ontology."""

from .terms import BlankNode, DingoError, Graph, IRI, Literal, Term, Triple
from .turtle import TurtleParseError, parse_turtle, serialize_turtle
from .isomorphism import BlankNodeLimitError, graph_isomorphic
from .ontology import (
    DINGO_BASE,
    DingoTerms,
    Mapping,
    OntologySchema,
    SubclassCycleError,
    load_ontology,
)
from .queries import (
    Conventions,
    FundingLink,
    Participation,
    SchemeCycleError,
    TemporalViolation,
    UntypedNodeWarning,
    beneficiaries_of,
    check_temporal,
    criteria_for_scheme,
    funding_links,
    grants_funding_project,
    non_beneficiary_participants,
    participants_with_roles,
    projects_funded_by,
    scheme_ancestry,
)
from .shapes import (
    Shape,
    ShapeSchema,
    TripleConstraint,
    ValidationReport,
    ValueCheck,
    default_dingo_shapes,
    parse_shapes,
    validate,
)
from .ingest import MappingSpec, ingest_table, mint_iri, parse_mapping
from .docgen import DocModel, extract_doc_model, render_html

__version__ = "0.1.0"

__all__ = [
    "BlankNode",
    "BlankNodeLimitError",
    "Conventions",
    "DINGO_BASE",
    "DingoError",
    "DingoTerms",
    "DocModel",
    "FundingLink",
    "Graph",
    "IRI",
    "Literal",
    "Mapping",
    "MappingSpec",
    "OntologySchema",
    "Participation",
    "SchemeCycleError",
    "Shape",
    "ShapeSchema",
    "SubclassCycleError",
    "TemporalViolation",
    "Term",
    "Triple",
    "TripleConstraint",
    "TurtleParseError",
    "UntypedNodeWarning",
    "ValidationReport",
    "ValueCheck",
    "beneficiaries_of",
    "check_temporal",
    "criteria_for_scheme",
    "default_dingo_shapes",
    "extract_doc_model",
    "funding_links",
    "graph_isomorphic",
    "grants_funding_project",
    "ingest_table",
    "load_ontology",
    "mint_iri",
    "non_beneficiary_participants",
    "parse_mapping",
    "parse_shapes",
    "parse_turtle",
    "participants_with_roles",
    "projects_funded_by",
    "render_html",
    "scheme_ancestry",
    "serialize_turtle",
    "validate",
]
