"""RDF data model: terms, triples and an immutable, pattern-indexed graph.

Terms come in three variants (IRI, blank node, literal). Graphs are sets of
triples with an ordered prefix map; they never change after construction, so
they are safe to share between threads.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Optional, Union

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
OWL_NS = "http://www.w3.org/2002/07/owl#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"
SKOS_NS = "http://www.w3.org/2004/02/skos/core#"
DCT_NS = "http://purl.org/dc/terms/"

XSD_STRING = XSD_NS + "string"
XSD_INTEGER = XSD_NS + "integer"
XSD_DECIMAL = XSD_NS + "decimal"
XSD_DOUBLE = XSD_NS + "double"
XSD_BOOLEAN = XSD_NS + "boolean"
XSD_DATE = XSD_NS + "date"
XSD_GYEAR = XSD_NS + "gYear"
XSD_GYEARMONTH = XSD_NS + "gYearMonth"
XSD_ANYURI = XSD_NS + "anyURI"
RDF_LANG_STRING = RDF_NS + "langString"


class DingoError(Exception):
    """Base class for all toolkit errors."""


# scheme ":" — RFC 3986 scheme production
_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.-]*:")
# characters that cannot appear inside an IRIREF and would break round-tripping
_IRI_FORBIDDEN = re.compile(r'[\x00-\x20<>"{}|^`\\]')
_BLANK_LABEL_RE = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_-]*$")
_LANG_TAG_RE = re.compile(r"^[A-Za-z]+(-[A-Za-z0-9]+)*$")
# empty string is the default prefix; dots allowed inside but not at the edges
_PREFIX_RE = re.compile(r"^$|^[A-Za-z_][A-Za-z0-9_-]*(\.[A-Za-z0-9_-]+)*$")


def is_absolute_iri(value: str) -> bool:
    return bool(_SCHEME_RE.match(value))


@dataclass(frozen=True)
class IRI:
    value: str

    def __post_init__(self) -> None:
        if not is_absolute_iri(self.value):
            raise ValueError(f"IRI is not absolute (missing scheme): {self.value!r}")
        bad = _IRI_FORBIDDEN.search(self.value)
        if bad:
            raise ValueError(f"IRI contains forbidden character {bad.group()!r}: {self.value!r}")

    def __repr__(self) -> str:
        return f"<{self.value}>"


@dataclass(frozen=True)
class BlankNode:
    label: str

    def __post_init__(self) -> None:
        if not _BLANK_LABEL_RE.match(self.label):
            raise ValueError(f"invalid blank node label: {self.label!r}")

    def __repr__(self) -> str:
        return f"_:{self.label}"


@dataclass(frozen=True)
class Literal:
    lexical: str
    datatype: str = XSD_STRING
    language: Optional[str] = None

    def __post_init__(self) -> None:
        if self.language is not None:
            if not _LANG_TAG_RE.match(self.language):
                raise ValueError(f"invalid language tag: {self.language!r}")
            if self.datatype != RDF_LANG_STRING:
                raise ValueError("language-tagged literal must have the rdf:langString datatype")
        elif self.datatype == RDF_LANG_STRING:
            raise ValueError("rdf:langString literal requires a language tag")
        if not is_absolute_iri(self.datatype) or _IRI_FORBIDDEN.search(self.datatype):
            raise ValueError(f"literal datatype must be a valid absolute IRI: {self.datatype!r}")

    def __repr__(self) -> str:
        if self.language:
            return f'"{self.lexical}"@{self.language}'
        if self.datatype == XSD_STRING:
            return f'"{self.lexical}"'
        return f'"{self.lexical}"^^<{self.datatype}>'


Term = Union[IRI, BlankNode, Literal]

RDF_TYPE = IRI(RDF_NS + "type")
RDF_FIRST = IRI(RDF_NS + "first")
RDF_REST = IRI(RDF_NS + "rest")
RDF_NIL = IRI(RDF_NS + "nil")


def term_sort_key(term: Term) -> tuple:
    """Total order over terms: IRIs, then blank nodes, then literals."""
    if isinstance(term, IRI):
        return (0, term.value, "", "")
    if isinstance(term, BlankNode):
        return (1, term.label, "", "")
    return (2, term.lexical, term.datatype, term.language or "")


def predicate_sort_key(predicate: IRI) -> tuple:
    # rdf:type leads every predicate group; it serializes as "a"
    if predicate == RDF_TYPE:
        return (0, "")
    return (1, predicate.value)


@dataclass(frozen=True)
class Triple:
    subject: Term
    predicate: IRI
    object: Term

    def __post_init__(self) -> None:
        if isinstance(self.subject, Literal):
            raise ValueError("triple subject cannot be a literal")
        if not isinstance(self.predicate, IRI):
            raise ValueError("triple predicate must be an IRI")

    def __iter__(self) -> Iterator[Term]:
        return iter((self.subject, self.predicate, self.object))


def triple_sort_key(triple: Triple) -> tuple:
    return (
        term_sort_key(triple.subject),
        predicate_sort_key(triple.predicate),
        term_sort_key(triple.object),
    )


class Graph:
    """Immutable set of triples plus an ordered prefix map.

    Duplicate triples collapse (RDF set semantics). Pattern lookups go through
    per-position indexes; iteration and `match` results follow the canonical
    serialization order, so everything downstream is deterministic.
    """

    __slots__ = ("_triples", "_prefixes", "_by_subject", "_by_predicate", "_by_object")

    def __init__(
        self,
        triples: Iterable[Triple] = (),
        prefixes: Optional[Mapping[str, str]] = None,
    ) -> None:
        self._triples = frozenset(triples)
        self._prefixes = dict(prefixes) if prefixes else {}
        for prefix, namespace in self._prefixes.items():
            if not _PREFIX_RE.match(prefix):
                raise ValueError(f"invalid prefix name: {prefix!r}")
            if not is_absolute_iri(namespace) or _IRI_FORBIDDEN.search(namespace):
                raise ValueError(f"prefix {prefix!r} maps to an invalid namespace: {namespace!r}")
        by_s: dict = defaultdict(set)
        by_p: dict = defaultdict(set)
        by_o: dict = defaultdict(set)
        for t in self._triples:
            by_s[t.subject].add(t)
            by_p[t.predicate].add(t)
            by_o[t.object].add(t)
        self._by_subject = dict(by_s)
        self._by_predicate = dict(by_p)
        self._by_object = dict(by_o)

    @property
    def triples(self) -> frozenset:
        return self._triples

    @property
    def prefixes(self) -> Mapping[str, str]:
        return MappingProxyType(self._prefixes)

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, triple: Triple) -> bool:
        return triple in self._triples

    def __iter__(self) -> Iterator[Triple]:
        return iter(sorted(self._triples, key=triple_sort_key))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples == other._triples and self._prefixes == other._prefixes

    def __hash__(self) -> int:
        return hash(self._triples)

    def __repr__(self) -> str:
        return f"Graph({len(self._triples)} triples, {len(self._prefixes)} prefixes)"

    def match(
        self,
        subject: Optional[Term] = None,
        predicate: Optional[Term] = None,
        object: Optional[Term] = None,
    ) -> list[Triple]:
        """All triples matching the pattern; None positions are wildcards."""
        candidate_sets = []
        if subject is not None:
            candidate_sets.append(self._by_subject.get(subject, frozenset()))
        if predicate is not None:
            candidate_sets.append(self._by_predicate.get(predicate, frozenset()))
        if object is not None:
            candidate_sets.append(self._by_object.get(object, frozenset()))
        if not candidate_sets:
            found = self._triples
        else:
            candidate_sets.sort(key=len)
            found = candidate_sets[0]
            for other in candidate_sets[1:]:
                found = found & other
                if not found:
                    break
        return sorted(found, key=triple_sort_key)

    def subjects(self, predicate: Optional[Term] = None, object: Optional[Term] = None) -> list[Term]:
        """Distinct subjects of matching triples, canonically ordered."""
        seen = {t.subject for t in self.match(None, predicate, object)}
        return sorted(seen, key=term_sort_key)

    def objects(self, subject: Optional[Term] = None, predicate: Optional[Term] = None) -> list[Term]:
        """Distinct objects of matching triples, canonically ordered."""
        seen = {t.object for t in self.match(subject, predicate, None)}
        return sorted(seen, key=term_sort_key)

    def value(self, subject: Term, predicate: IRI) -> Optional[Term]:
        """First object (canonical order) for (subject, predicate), if any."""
        found = self.objects(subject, predicate)
        return found[0] if found else None

    def nodes(self) -> set:
        """Every term appearing in subject or object position."""
        out = set()
        for t in self._triples:
            out.add(t.subject)
            out.add(t.object)
        return out

    def blank_nodes(self) -> set:
        return {n for n in self.nodes() if isinstance(n, BlankNode)}

    def with_prefixes(self, prefixes: Mapping[str, str]) -> "Graph":
        """Copy of this graph with extra prefix declarations merged in."""
        merged = dict(self._prefixes)
        merged.update(prefixes)
        return Graph(self._triples, merged)
