"""Ontology schema registry: classes, properties, hierarchy and mappings.

load_ontology digests an OWL/RDFS graph into an OntologySchema that the
validator, query and documentation layers share. Schemas are read-only after
loading; concurrent readers are safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .terms import (
    BlankNode,
    DingoError,
    Graph,
    IRI,
    Literal,
    OWL_NS,
    RDFS_NS,
    RDF_TYPE,
    SKOS_NS,
    term_sort_key,
    triple_sort_key,
)

DINGO_BASE = "https://w3id.org/dingo#"

OWL_ONTOLOGY = IRI(OWL_NS + "Ontology")
OWL_CLASS = IRI(OWL_NS + "Class")
OWL_OBJECT_PROPERTY = IRI(OWL_NS + "ObjectProperty")
OWL_DATATYPE_PROPERTY = IRI(OWL_NS + "DatatypeProperty")
OWL_ANNOTATION_PROPERTY = IRI(OWL_NS + "AnnotationProperty")
OWL_EQUIVALENT_CLASS = IRI(OWL_NS + "equivalentClass")
OWL_EQUIVALENT_PROPERTY = IRI(OWL_NS + "equivalentProperty")
RDFS_SUBCLASS_OF = IRI(RDFS_NS + "subClassOf")
RDFS_SUBPROPERTY_OF = IRI(RDFS_NS + "subPropertyOf")
RDFS_DOMAIN = IRI(RDFS_NS + "domain")
RDFS_RANGE = IRI(RDFS_NS + "range")
RDFS_LABEL = IRI(RDFS_NS + "label")
RDFS_COMMENT = IRI(RDFS_NS + "comment")

MAPPING_PREDICATES = {
    IRI(SKOS_NS + "exactMatch"): "skos-exact",
    IRI(SKOS_NS + "closeMatch"): "skos-close",
    IRI(SKOS_NS + "broadMatch"): "skos-broad",
    IRI(SKOS_NS + "narrowMatch"): "skos-narrow",
    IRI(SKOS_NS + "relatedMatch"): "skos-related",
    OWL_EQUIVALENT_CLASS: "owl-equivalent-class",
    OWL_EQUIVALENT_PROPERTY: "owl-equivalent-property",
}

PROPERTY_KINDS = {
    OWL_OBJECT_PROPERTY: "object-property",
    OWL_DATATYPE_PROPERTY: "datatype-property",
    OWL_ANNOTATION_PROPERTY: "annotation-property",
}


class UnknownClassError(DingoError):
    pass


class UnknownTermError(DingoError):
    pass


class SubclassCycleError(DingoError):
    def __init__(self, members: Iterable[IRI]) -> None:
        self.members = tuple(sorted(members, key=term_sort_key))
        names = ", ".join(m.value for m in self.members)
        super().__init__(f"strict subclass cycle among: {names}")


class PropertyKindConflictError(DingoError):
    pass


@dataclass(frozen=True)
class Mapping:
    kind: str
    target: IRI


@dataclass
class ClassInfo:
    iri: IRI
    labels: list = field(default_factory=list)  # (text, language) pairs
    comments: list = field(default_factory=list)
    direct_superclasses: set = field(default_factory=set)
    anonymous_superclasses: list = field(default_factory=list)  # opaque blank markers
    mappings: list = field(default_factory=list)
    declared: bool = False


@dataclass
class PropertyInfo:
    iri: IRI
    kind: Optional[str] = None  # object- / datatype- / annotation-property
    labels: list = field(default_factory=list)
    comments: list = field(default_factory=list)
    domains: set = field(default_factory=set)
    ranges: set = field(default_factory=set)
    direct_superproperties: set = field(default_factory=set)
    anonymous_superproperties: list = field(default_factory=list)
    mappings: list = field(default_factory=list)
    declared: bool = False


@dataclass(frozen=True)
class OntologyStats:
    class_count: int
    property_count: int
    namespace_count: int
    own_namespace: Optional[str]
    counting_rule: str


COUNTING_RULE = (
    "named IRIs declared owl:Class (classes) or owl:ObjectProperty/"
    "owl:DatatypeProperty/owl:AnnotationProperty (properties) whose IRI "
    "starts with the ontology IRI; blank nodes and external terms excluded"
)


class OntologySchema:
    """Registry of an ontology's classes and properties."""

    def __init__(
        self,
        classes: dict,
        properties: dict,
        namespaces: dict,
        ontology_iri: Optional[IRI] = None,
    ) -> None:
        self.classes = classes
        self.properties = properties
        self.namespaces = namespaces
        self.ontology_iri = ontology_iri

    def superclass_closure(self, class_iri: IRI) -> set:
        """All classes transitively reachable via direct superclass edges."""
        if class_iri not in self.classes:
            raise UnknownClassError(f"unknown class: {class_iri.value}")
        seen: set = set()
        stack = [class_iri]
        while stack:
            current = stack.pop()
            for parent in self.classes[current].direct_superclasses:
                if parent not in seen:
                    seen.add(parent)
                    if parent in self.classes:
                        stack.append(parent)
        seen.discard(class_iri)
        return seen

    def subclasses_of(self, class_iri: IRI) -> set:
        """All registered classes whose closure contains class_iri."""
        if class_iri not in self.classes:
            raise UnknownClassError(f"unknown class: {class_iri.value}")
        return {c for c in self.classes if class_iri in self.superclass_closure(c)}

    def instances_of(self, data: Graph, class_iri: IRI) -> set:
        """Subjects typed as class_iri or any of its registered subclasses."""
        if class_iri not in self.classes:
            raise UnknownClassError(f"unknown class: {class_iri.value}")
        found = set()
        for t in data.match(None, RDF_TYPE, None):
            declared_type = t.object
            if declared_type == class_iri:
                found.add(t.subject)
            elif (
                isinstance(declared_type, IRI)
                and declared_type in self.classes
                and class_iri in self.superclass_closure(declared_type)
            ):
                found.add(t.subject)
        return found

    def mappings_of(self, iri: IRI) -> list:
        """Cross-ontology mappings of a registered class or property.

        Order follows the canonical triple order of the source graph; the
        parsed Graph is a set, so document order is not recoverable.
        """
        if iri in self.classes:
            return list(self.classes[iri].mappings)
        if iri in self.properties:
            return list(self.properties[iri].mappings)
        raise UnknownTermError(f"not a registered class or property: {iri.value}")

    def stats(self) -> OntologyStats:
        own = self.ontology_iri.value if self.ontology_iri else None

        def in_own(iri: IRI) -> bool:
            if own is None:
                return True
            return iri.value.startswith(own) and len(iri.value) > len(own)

        class_count = sum(1 for c in self.classes.values() if c.declared and in_own(c.iri))
        property_count = sum(1 for p in self.properties.values() if p.declared and in_own(p.iri))
        return OntologyStats(
            class_count=class_count,
            property_count=property_count,
            namespace_count=len(self.namespaces),
            own_namespace=own,
            counting_rule=COUNTING_RULE,
        )


def _check_class_cycles(classes: dict, equivalences: list) -> None:
    # union-find over declared equivalences; mutually equivalent classes may
    # legitimately subclass each other
    parent: dict = {c: c for c in classes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in equivalences:
        if a in parent and b in parent:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb

    edges: dict = {}
    for iri, info in classes.items():
        source = find(iri)
        for sup in info.direct_superclasses:
            if sup not in parent:
                continue
            target = find(sup)
            if source != target:
                edges.setdefault(source, set()).add(target)

    # iterative three-color DFS; a back edge is a strict cycle
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {node: WHITE for node in parent.values()}
    for root in sorted({find(c) for c in classes}, key=term_sort_key):
        if color[root] != WHITE:
            continue
        stack = [(root, iter(sorted(edges.get(root, ()), key=term_sort_key)))]
        color[root] = GRAY
        path = [root]
        while stack:
            node, children = stack[-1]
            advanced = False
            for child in children:
                if color[child] == GRAY:
                    cycle_reps = set(path[path.index(child) :])
                    members = [c for c in classes if find(c) in cycle_reps]
                    raise SubclassCycleError(members)
                if color[child] == WHITE:
                    color[child] = GRAY
                    path.append(child)
                    stack.append((child, iter(sorted(edges.get(child, ()), key=term_sort_key))))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                path.pop()
                stack.pop()


def load_ontology(g: Graph) -> OntologySchema:
    """Build an OntologySchema from OWL/RDFS declaration triples.

    Subclass/superclass edges pointing at anonymous class expressions are
    kept as opaque markers and excluded from hierarchy traversal. Raises
    SubclassCycleError for strict subclass cycles (equivalence-collapsed)
    and PropertyKindConflictError for contradictory property declarations.
    """
    classes: dict = {}
    properties: dict = {}

    def class_entry(iri: IRI) -> ClassInfo:
        if iri not in classes:
            classes[iri] = ClassInfo(iri=iri)
        return classes[iri]

    def property_entry(iri: IRI) -> PropertyInfo:
        if iri not in properties:
            properties[iri] = PropertyInfo(iri=iri)
        return properties[iri]

    ontology_iri: Optional[IRI] = None
    for t in g.match(None, RDF_TYPE, OWL_ONTOLOGY):
        if isinstance(t.subject, IRI):
            ontology_iri = t.subject
            break

    for t in g.match(None, RDF_TYPE, OWL_CLASS):
        if isinstance(t.subject, IRI):
            class_entry(t.subject).declared = True

    for type_iri, kind in PROPERTY_KINDS.items():
        for t in g.match(None, RDF_TYPE, type_iri):
            if not isinstance(t.subject, IRI):
                continue
            entry = property_entry(t.subject)
            if entry.kind is not None and entry.kind != kind:
                raise PropertyKindConflictError(
                    f"{t.subject.value} declared both {entry.kind} and {kind}"
                )
            entry.kind = kind
            entry.declared = True

    for t in g.match(None, RDFS_SUBCLASS_OF, None):
        if not isinstance(t.subject, IRI):
            continue
        entry = class_entry(t.subject)
        if isinstance(t.object, IRI):
            if t.object == t.subject:
                raise SubclassCycleError([t.subject])
            entry.direct_superclasses.add(t.object)
            class_entry(t.object)
        elif isinstance(t.object, BlankNode):
            entry.anonymous_superclasses.append(t.object)

    for t in g.match(None, RDFS_SUBPROPERTY_OF, None):
        if not isinstance(t.subject, IRI):
            continue
        entry = property_entry(t.subject)
        if isinstance(t.object, IRI):
            entry.direct_superproperties.add(t.object)
            property_entry(t.object)
        elif isinstance(t.object, BlankNode):
            entry.anonymous_superproperties.append(t.object)

    for t in g.match(None, RDFS_DOMAIN, None):
        if isinstance(t.subject, IRI) and t.subject in properties and isinstance(t.object, IRI):
            properties[t.subject].domains.add(t.object)
    for t in g.match(None, RDFS_RANGE, None):
        if isinstance(t.subject, IRI) and t.subject in properties and isinstance(t.object, IRI):
            properties[t.subject].ranges.add(t.object)

    for predicate, bucket in ((RDFS_LABEL, "labels"), (RDFS_COMMENT, "comments")):
        for t in g.match(None, predicate, None):
            if not isinstance(t.subject, IRI) or not isinstance(t.object, Literal):
                continue
            pair = (t.object.lexical, t.object.language)
            if t.subject in classes:
                getattr(classes[t.subject], bucket).append(pair)
            if t.subject in properties:
                getattr(properties[t.subject], bucket).append(pair)

    equivalences = []
    mapping_triples = [
        t for t in sorted(g.triples, key=triple_sort_key) if t.predicate in MAPPING_PREDICATES
    ]
    for t in mapping_triples:
        if not isinstance(t.subject, IRI) or not isinstance(t.object, IRI):
            continue
        kind = MAPPING_PREDICATES[t.predicate]
        if kind == "owl-equivalent-class":
            equivalences.append((t.subject, t.object))
            if t.subject in classes:
                classes[t.subject].mappings.append(Mapping(kind, t.object))
        elif kind == "owl-equivalent-property":
            if t.subject in properties:
                properties[t.subject].mappings.append(Mapping(kind, t.object))
        else:
            if t.subject in classes:
                classes[t.subject].mappings.append(Mapping(kind, t.object))
            if t.subject in properties:
                properties[t.subject].mappings.append(Mapping(kind, t.object))

    for info in classes.values():
        info.labels.sort()
        info.comments.sort()
    for info in properties.values():
        info.labels.sort()
        info.comments.sort()

    _check_class_cycles(classes, equivalences)

    return OntologySchema(
        classes=classes,
        properties=properties,
        namespaces=dict(g.prefixes),
        ontology_iri=ontology_iri,
    )


class DingoTerms:
    """Well-known DINGO terms minted against a configurable base IRI."""

    def __init__(self, base: str = DINGO_BASE) -> None:
        self.base = base
        mint = lambda local: IRI(base + local)  # noqa: E731
        # principal classes
        self.Project = mint("Project")
        self.Grant = mint("Grant")
        self.FundingAgency = mint("FundingAgency")
        self.FundingScheme = mint("FundingScheme")
        self.Role = mint("Role")
        self.Person = mint("Person")
        self.Organisation = mint("Organisation")
        self.Criterion = mint("Criterion")
        self.Participation = mint("Participation")
        self.UniversityOrganisation = mint("UniversityOrganisation")
        # funding relations (both orientations are recognized by queries)
        self.funds = mint("funds")
        self.funded_by = mint("funded_by")
        self.has_beneficiary = mint("has_beneficiary")
        self.beneficiary_of = mint("beneficiary_of")
        self.has_participant = mint("has_participant")
        self.participates_in = mint("participates_in")
        self.has_participation = mint("has_participation")
        self.participant = mint("participant")
        self.in_role = mint("in_role")
        self.has_role = mint("has_role")
        self.has_criterion = mint("has_criterion")
        self.criterion_of = mint("criterion_of")
        self.subscheme_of = mint("subscheme_of")
        self.has_subscheme = mint("has_subscheme")
        self.administered_by = mint("administered_by")
        self.administers = mint("administers")
        self.awarded_under = mint("awarded_under")
        self.product_or_material_produced = mint("product_or_material_produced")
        # temporal and descriptive properties
        self.start_time = mint("start_time")
        self.end_time = mint("end_time")
        self.inception = mint("inception")
        self.title = mint("title")
        self.funded_amount = mint("funded_amount")
        self.country_code = mint("country_code")
        self.criterion_text = mint("criterion_text")
        self.family_name = mint("family_name")
        self.given_name = mint("given_name")
        self.decision_date = mint("decision_date")
        # well-known role individuals
        self.principal_investigator = mint("principal_investigator")
        self.co_investigator = mint("co_investigator")
        self.host_institution_role = mint("host_institution_role")
        self.grant_signatory = mint("grant_signatory")
