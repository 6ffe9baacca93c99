import random

import pytest

from dingotk.terms import (
    BlankNode,
    Graph,
    IRI,
    Literal,
    RDF_FIRST,
    RDF_LANG_STRING,
    RDF_NIL,
    RDF_REST,
    RDF_TYPE,
    Triple,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
)
from dingotk.turtle import (
    RelativeIriError,
    TurtleParseError,
    UndefinedPrefixError,
    parse_turtle,
    serialize_turtle,
)
from dingotk.isomorphism import graph_isomorphic

from support import random_graph

DINGO = "https://w3id.org/dingo#"


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def test_parse_single_triple_document():
    g = parse_turtle(f'@prefix d: <{DINGO}> . <http://x/p1> a d:Project .')
    assert len(g) == 1
    assert Triple(IRI("http://x/p1"), RDF_TYPE, IRI(DINGO + "Project")) in g
    assert g.prefixes == {"d": DINGO}


def test_parse_empty_document():
    g = parse_turtle("")
    assert len(g) == 0
    assert dict(g.prefixes) == {}


def test_parse_comments_and_whitespace_only():
    assert len(parse_turtle("# nothing here\n   \n# more\n")) == 0


def test_leading_bom_and_crlf_are_tolerated():
    doc = '﻿@prefix d: <https://w3id.org/dingo#> .\r\n<http://x/p> a d:Project .\r\n'
    assert len(parse_turtle(doc)) == 1


def test_sparql_style_directives():
    g = parse_turtle(f'PREFIX d: <{DINGO}>\nBASE <http://x/>\n<p1> a d:Project .')
    assert Triple(IRI("http://x/p1"), RDF_TYPE, IRI(DINGO + "Project")) in g


def test_predicate_and_object_lists():
    g = parse_turtle(
        "@prefix ex: <http://ex.org/> ."
        "ex:s ex:p ex:a, ex:b ; ex:q ex:c ."
    )
    assert len(g) == 3


def test_literal_shorthands():
    g = parse_turtle(
        '@prefix ex: <http://ex.org/> .'
        'ex:s ex:p 42, -7, 3.14, .5, 1.0e3, true, false, "plain", "tagged"@en-GB .'
    )
    objects = {t.object for t in g.triples}
    assert Literal("42", XSD_INTEGER) in objects
    assert Literal("-7", XSD_INTEGER) in objects
    assert Literal("3.14", XSD_DECIMAL) in objects
    assert Literal(".5", XSD_DECIMAL) in objects
    assert Literal("1.0e3", XSD_DOUBLE) in objects
    assert Literal("true", XSD_BOOLEAN) in objects
    assert Literal("false", XSD_BOOLEAN) in objects
    assert Literal("plain", XSD_STRING) in objects
    assert Literal("tagged", RDF_LANG_STRING, "en-GB") in objects


def test_datatyped_literal_and_escapes():
    g = parse_turtle(
        '@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .'
        '<http://x/s> <http://x/p> "2019-01-01"^^xsd:date, "tab\\there\\nnl", "\\u00e9" .'
    )
    objects = {t.object for t in g.triples}
    assert Literal("2019-01-01", "http://www.w3.org/2001/XMLSchema#date") in objects
    assert Literal("tab\there\nnl", XSD_STRING) in objects
    assert Literal("é", XSD_STRING) in objects


def test_triple_quoted_strings():
    g = parse_turtle('<http://x/s> <http://x/p> """line one\nline "two"""" .')
    (t,) = g.triples
    assert t.object == Literal('line one\nline "two"', XSD_STRING)


def test_blank_node_labels_are_canonicalized_in_first_appearance_order():
    g = parse_turtle(
        "<http://x/a> <http://x/p> _:zebra . "
        "_:alpha <http://x/p> _:zebra . "
    )
    labels = {b.label for b in g.blank_nodes()}
    assert labels == {"b0", "b1"}
    # zebra was seen first, so it becomes b0
    assert Triple(IRI("http://x/a"), IRI("http://x/p"), BlankNode("b0")) in g
    assert Triple(BlankNode("b1"), IRI("http://x/p"), BlankNode("b0")) in g


def test_anonymous_blank_nodes_and_property_lists():
    g = parse_turtle(
        "<http://x/s> <http://x/p> [] . "
        "[ <http://x/q> 1 ] <http://x/p> 2 . "
        "<http://x/t> <http://x/p> [ <http://x/q> 3 ; <http://x/r> 4 ] ."
    )
    assert len(g.blank_nodes()) == 3
    assert len(g) == 6


def test_collections():
    g = parse_turtle("<http://x/s> <http://x/p> (1 2) , () .")
    assert Triple(IRI("http://x/s"), IRI("http://x/p"), RDF_NIL) in g
    firsts = [t for t in g.triples if t.predicate == RDF_FIRST]
    rests = [t for t in g.triples if t.predicate == RDF_REST]
    assert len(firsts) == 2 and len(rests) == 2


def test_duplicate_triples_deduplicate():
    g = parse_turtle("<http://x/s> <http://x/p> 1 . <http://x/s> <http://x/p> 1 .")
    assert len(g) == 1


def test_base_resolution():
    g = parse_turtle("@base <http://x/dir/> . <leaf> <http://x/p> <../up> .")
    subjects = {t.subject for t in g.triples}
    assert IRI("http://x/dir/leaf") in subjects
    (t,) = g.triples
    assert t.object == IRI("http://x/up")


def test_parse_with_external_base_argument():
    g = parse_turtle("<leaf> <http://x/p> 1 .", base="http://x/dir/")
    (t,) = g.triples
    assert t.subject == IRI("http://x/dir/leaf")


def test_undefined_prefix_error_position():
    with pytest.raises(UndefinedPrefixError) as err:
        parse_turtle("<http://x/s> <http://x/p> nope:thing .")
    assert err.value.line == 1
    assert err.value.column == 27
    assert "nope:" in str(err.value)


def test_relative_iri_without_base_error():
    with pytest.raises(RelativeIriError):
        parse_turtle("<rel> <http://x/p> 1 .")


def test_syntax_errors_carry_position_and_token():
    with pytest.raises(TurtleParseError) as err:
        parse_turtle("<http://x/s> <http://x/p>\n  %% .")
    assert err.value.line == 2
    doc = '<http://x/s> <http://x/p> "unterminated'
    with pytest.raises(TurtleParseError):
        parse_turtle(doc)
    with pytest.raises(TurtleParseError) as err2:
        parse_turtle("<http://x/s> <http://x/p> 1 ")  # missing final dot
    assert "expected" in str(err2.value)


def test_parser_totality_fuzz():
    # every input must yield a Graph or a positioned TurtleParseError
    rng = random.Random(99)
    alphabet = '<>"\'@#.;,()[]^\\ \n\t_:aZ09%+-{}|`~é漢'
    for _ in range(400):
        document = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 60)))
        try:
            parse_turtle(document)
        except TurtleParseError as exc:
            assert exc.line >= 1 and exc.column >= 1


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def test_serialize_empty_graph_with_prefix():
    text = serialize_turtle(Graph([], {"d": DINGO}))
    assert text == f"@prefix d: <{DINGO}> .\n"


def test_serialize_empty_graph_is_empty_text():
    assert serialize_turtle(Graph()) == ""


def test_serialize_prefixes_sorted_and_type_as_a():
    g = parse_turtle(
        f"@prefix z: <http://z.example/> . @prefix a: <http://a.example/> ."
        f"<http://x/s> a z:T ; z:p a:v ."
    )
    text = serialize_turtle(g)
    lines = text.splitlines()
    assert lines[0] == "@prefix a: <http://a.example/> ."
    assert lines[1] == "@prefix z: <http://z.example/> ."
    assert " a z:T" in text
    assert "rdf-syntax-ns#type" not in text


def test_serialize_is_deterministic_for_equal_graphs():
    triples = [
        Triple(IRI("http://x/s"), IRI("http://x/p"), Literal("v")),
        Triple(IRI("http://x/s"), RDF_TYPE, IRI(DINGO + "Project")),
        Triple(BlankNode("q"), IRI("http://x/p"), Literal("w", XSD_INTEGER)),
    ]
    g1 = Graph(triples, {"d": DINGO})
    g2 = Graph(list(reversed(triples)), {"d": DINGO})
    assert g1 == g2
    assert serialize_turtle(g1) == serialize_turtle(g2)


def test_serializer_escapes_strings():
    g = Graph([Triple(IRI("http://x/s"), IRI("http://x/p"), Literal('a "b"\n\tc\\d'))])
    text = serialize_turtle(g)
    assert '\\"b\\"' in text and "\\n" in text and "\\t" in text and "\\\\d" in text
    reparsed = parse_turtle(text)
    assert reparsed.triples == g.triples


def test_literal_lexical_forms_survive_round_trip():
    # "01" is not normalized to "1"; lexical comparison is exact
    g = Graph(
        [
            Triple(IRI("http://x/s"), IRI("http://x/p"), Literal("01", XSD_INTEGER)),
            Triple(IRI("http://x/s"), IRI("http://x/q"), Literal("1", XSD_INTEGER)),
        ]
    )
    reparsed = parse_turtle(serialize_turtle(g))
    assert reparsed.triples == g.triples
    assert Literal("01", XSD_INTEGER) != Literal("1", XSD_INTEGER)


def test_round_trip_preserves_prefix_map():
    g = Graph(
        [Triple(IRI(DINGO + "Project"), RDF_TYPE, IRI("http://www.w3.org/2002/07/owl#Class"))],
        {"d": DINGO, "owl": "http://www.w3.org/2002/07/owl#"},
    )
    reparsed = parse_turtle(serialize_turtle(g))
    assert dict(reparsed.prefixes) == dict(g.prefixes)


def test_round_trip_random_sample():
    rng = random.Random(5150)
    for _ in range(40):
        g = random_graph(rng)
        text = serialize_turtle(g)
        reparsed = parse_turtle(text)
        assert graph_isomorphic(reparsed, g), text
        # parsing the same bytes twice gives the same graph, labels included
        assert parse_turtle(text) == reparsed
