"""Turtle parser and canonical serializer.

The supported subset: @prefix/@base and SPARQL-style PREFIX/BASE, "a",
predicate lists (;), object lists (,), anonymous blank nodes [], blank node
property lists, collections ( ), numeric/boolean/string shorthands,
triple-quoted strings, language tags and datatyped literals. IRIs pass
through without Unicode normalization.

Parsing renames every blank node to b0, b1, ... in first-appearance order;
serialization is a pure function of the triple set and prefix map, so equal
graphs always produce byte-identical Turtle.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional
from urllib.parse import urljoin

from .terms import (
    BlankNode,
    DingoError,
    Graph,
    IRI,
    Literal,
    RDF_FIRST,
    RDF_LANG_STRING,
    RDF_NIL,
    RDF_REST,
    RDF_TYPE,
    Term,
    Triple,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    is_absolute_iri,
    predicate_sort_key,
    term_sort_key,
)


class TurtleParseError(DingoError):
    """Syntax error with a 1-based position and the offending token text."""

    def __init__(self, message: str, line: int, column: int, token: str = "") -> None:
        self.line = line
        self.column = column
        self.token = token
        suffix = f" (at {token!r})" if token else ""
        super().__init__(f"line {line}, column {column}: {message}{suffix}")


class UndefinedPrefixError(TurtleParseError):
    pass


class RelativeIriError(TurtleParseError):
    pass


@dataclass(frozen=True)
class _Token:
    kind: str
    value: object
    line: int
    column: int

    @property
    def text(self) -> str:
        if self.kind == "pname":
            prefix, local = self.value  # type: ignore[misc]
            return f"{prefix}:{local}"
        return str(self.value) if self.value is not None else self.kind


_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
# PN_LOCAL_ESC set: characters that may appear backslash-escaped in names
_NAME_ESCAPABLE = set("_~.-!$&'()*+,;=/?#@%")
_HEX = set("0123456789abcdefABCDEF")
_LANGTAG_RE = re.compile(r"[A-Za-z]+(-[A-Za-z0-9]+)*")
_NUMBER_RE = re.compile(
    r"[+-]?(?:"
    r"(?:\d+\.\d*|\.\d+|\d+)[eE][+-]?\d+"  # double: exponent required
    r"|\d*\.\d+"  # decimal: digits after the dot
    r"|\d+"  # integer
    r")"
)


def _is_name_char(c: str) -> bool:
    return c.isalnum() or c in "_-%"


class _Lexer:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message: str, token: str = "") -> TurtleParseError:
        return TurtleParseError(message, self.line, self.col, token)

    def _advance(self, count: int = 1) -> None:
        for _ in range(count):
            if self.pos < len(self.text) and self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _peek(self, offset: int = 0) -> str:
        i = self.pos + offset
        return self.text[i] if i < len(self.text) else ""

    def tokens(self) -> list[_Token]:
        out = []
        while True:
            tok = self._next()
            out.append(tok)
            if tok.kind == "eof":
                return out

    def _next(self) -> _Token:
        while True:
            c = self._peek()
            if c == "":
                return _Token("eof", None, self.line, self.col)
            if c in " \t\r\n":
                self._advance()
                continue
            if c == "#":
                while self._peek() not in ("", "\n"):
                    self._advance()
                continue
            break

        line, col = self.line, self.col
        c = self._peek()

        if c == "<":
            return self._lex_iriref(line, col)
        if c in "\"'":
            return self._lex_string(line, col)
        if c == "@":
            return self._lex_at(line, col)
        if c == "^":
            if self._peek(1) == "^":
                self._advance(2)
                return _Token("^^", None, line, col)
            raise self.error("unexpected '^'", "^")
        if c in ".;,[]()":
            if c == "." and self._peek(1).isdigit():
                return self._lex_number(line, col)
            self._advance()
            return _Token(c, None, line, col)
        if c.isdigit() or (c in "+-" and (self._peek(1).isdigit() or self._peek(1) == ".")):
            return self._lex_number(line, col)
        if c == "_" and self._peek(1) == ":":
            return self._lex_blank(line, col)
        if _is_name_char(c) or c in ":\\":
            return self._lex_name(line, col)
        raise self.error(f"unexpected character {c!r}", c)

    def _lex_iriref(self, line: int, col: int) -> _Token:
        self._advance()  # <
        parts = []
        while True:
            c = self._peek()
            if c == "":
                raise self.error("unterminated IRI")
            if c == ">":
                self._advance()
                return _Token("iriref", "".join(parts), line, col)
            if c == "\n":
                raise self.error("newline inside IRI")
            if c == "\\":
                parts.append(self._read_uchar())
                continue
            parts.append(c)
            self._advance()

    def _read_uchar(self) -> str:
        # numeric escape: \uXXXX or \UXXXXXXXX
        self._advance()  # backslash
        kind = self._peek()
        width = {"u": 4, "U": 8}.get(kind)
        if width is None:
            raise self.error(f"invalid escape '\\{kind}' in IRI")
        self._advance()
        digits = ""
        for _ in range(width):
            if self._peek() not in _HEX:
                raise self.error("truncated numeric escape")
            digits += self._peek()
            self._advance()
        return chr(int(digits, 16))

    def _lex_string(self, line: int, col: int) -> _Token:
        quote = self._peek()
        if self._peek(1) == quote and self._peek(2) == quote:
            return self._lex_long_string(quote, line, col)
        self._advance()
        parts = []
        while True:
            c = self._peek()
            if c in ("", "\n", "\r"):
                raise self.error("unterminated string")
            if c == quote:
                self._advance()
                return _Token("string", "".join(parts), line, col)
            if c == "\\":
                parts.append(self._read_string_escape())
                continue
            parts.append(c)
            self._advance()

    def _lex_long_string(self, quote: str, line: int, col: int) -> _Token:
        self._advance(3)
        parts = []
        while True:
            c = self._peek()
            if c == "":
                raise self.error("unterminated triple-quoted string")
            if c == quote:
                run = 0
                while self._peek(run) == quote:
                    run += 1
                if run >= 3:
                    # quotes beyond the closing three belong to the content
                    parts.append(quote * (run - 3))
                    self._advance(run)
                    return _Token("string", "".join(parts), line, col)
                parts.append(quote * run)
                self._advance(run)
                continue
            if c == "\\":
                parts.append(self._read_string_escape())
                continue
            parts.append(c)
            self._advance()

    def _read_string_escape(self) -> str:
        self._advance()  # backslash
        c = self._peek()
        if c in _ESCAPES:
            self._advance()
            return _ESCAPES[c]
        if c in ("u", "U"):
            self.pos -= 1
            self.col -= 1
            return self._read_uchar()
        raise self.error(f"invalid string escape '\\{c}'")

    def _lex_at(self, line: int, col: int) -> _Token:
        self._advance()  # @
        match = _LANGTAG_RE.match(self.text, self.pos)
        if not match:
            raise self.error("expected language tag or directive after '@'")
        word = match.group()
        self._advance(len(word))
        if word == "prefix":
            return _Token("at_prefix", None, line, col)
        if word == "base":
            return _Token("at_base", None, line, col)
        return _Token("langtag", word, line, col)

    def _lex_number(self, line: int, col: int) -> _Token:
        match = _NUMBER_RE.match(self.text, self.pos)
        if not match:
            raise self.error("malformed number")
        lexical = match.group()
        self._advance(len(lexical))
        if "e" in lexical or "E" in lexical:
            kind = "double"
        elif "." in lexical:
            kind = "decimal"
        else:
            kind = "integer"
        return _Token(kind, lexical, line, col)

    def _lex_blank(self, line: int, col: int) -> _Token:
        self._advance(2)  # _:
        chars: list[str] = []
        while _is_name_char(self._peek()) or self._peek() == ".":
            chars.append(self._peek())
            self._advance()
        while chars and chars[-1] == ".":
            chars.pop()
            self.pos -= 1
            self.col -= 1
        if not chars:
            raise self.error("empty blank node label")
        return _Token("blank", "".join(chars), line, col)

    def _lex_name(self, line: int, col: int) -> _Token:
        # prefixed name, or a bare word (a / true / false / PREFIX / BASE)
        chars: list[str] = []
        escaped: list[bool] = []
        while True:
            c = self._peek()
            if c == "\\":
                nxt = self._peek(1)
                if nxt not in _NAME_ESCAPABLE:
                    raise self.error(f"invalid name escape '\\{nxt}'")
                chars.append(nxt)
                escaped.append(True)
                self._advance(2)
                continue
            if c and (_is_name_char(c) or c in ":."):
                chars.append(c)
                escaped.append(False)
                self._advance()
                continue
            break
        # a trailing unescaped dot is the statement terminator, not name material
        while chars and chars[-1] == "." and not escaped[-1]:
            chars.pop()
            escaped.pop()
            self.pos -= 1
            self.col -= 1
        if not chars:
            raise self.error("expected a term")
        colon = None
        for i, (ch, esc) in enumerate(zip(chars, escaped)):
            if ch == ":" and not esc:
                colon = i
                break
        word = "".join(chars)
        if colon is None:
            if word == "a":
                return _Token("a", "a", line, col)
            if word in ("true", "false"):
                return _Token("boolean", word, line, col)
            if word.lower() == "prefix":
                return _Token("sparql_prefix", word, line, col)
            if word.lower() == "base":
                return _Token("sparql_base", word, line, col)
            raise TurtleParseError("unexpected bare word", line, col, word)
        return _Token("pname", (word[:colon], word[colon + 1 :]), line, col)


class _Parser:
    def __init__(self, tokens: list[_Token], base: Optional[str]) -> None:
        self.tokens = tokens
        self.i = 0
        self.base = base
        self.prefixes: dict[str, str] = {}
        self.triples: list[Triple] = []
        self._blank_by_label: dict[str, BlankNode] = {}
        self._blank_count = 0

    # -- token plumbing ----------------------------------------------------

    def _peek(self) -> _Token:
        return self.tokens[self.i]

    def _take(self) -> _Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def _expect(self, kind: str, what: str) -> _Token:
        tok = self._take()
        if tok.kind != kind:
            raise TurtleParseError(f"expected {what}", tok.line, tok.column, tok.text)
        return tok

    @staticmethod
    def _error(message: str, tok: _Token) -> TurtleParseError:
        return TurtleParseError(message, tok.line, tok.column, tok.text)

    # -- blank node bookkeeping --------------------------------------------

    def _fresh_blank(self) -> BlankNode:
        node = BlankNode(f"b{self._blank_count}")
        self._blank_count += 1
        return node

    def _labeled_blank(self, label: str) -> BlankNode:
        if label not in self._blank_by_label:
            self._blank_by_label[label] = self._fresh_blank()
        return self._blank_by_label[label]

    # -- IRI resolution ----------------------------------------------------

    def _resolve_iri(self, raw: str, tok: _Token) -> IRI:
        if not is_absolute_iri(raw):
            if self.base is None:
                raise RelativeIriError(
                    f"relative IRI {raw!r} without a base", tok.line, tok.column, tok.text
                )
            raw = urljoin(self.base, raw)
        try:
            return IRI(raw)
        except ValueError as exc:
            raise TurtleParseError(str(exc), tok.line, tok.column, tok.text) from None

    def _expand_pname(self, tok: _Token) -> IRI:
        prefix, local = tok.value  # type: ignore[misc]
        if prefix not in self.prefixes:
            raise UndefinedPrefixError(
                f"undefined prefix {prefix + ':'!r}", tok.line, tok.column, tok.text
            )
        try:
            return IRI(self.prefixes[prefix] + local)
        except ValueError as exc:
            raise TurtleParseError(str(exc), tok.line, tok.column, tok.text) from None

    # -- grammar -----------------------------------------------------------

    def parse_document(self) -> None:
        while True:
            tok = self._peek()
            if tok.kind == "eof":
                return
            if tok.kind == "at_prefix":
                self._take()
                self._parse_prefix_decl(dotted=True)
            elif tok.kind == "at_base":
                self._take()
                self._parse_base_decl(dotted=True)
            elif tok.kind == "sparql_prefix":
                self._take()
                self._parse_prefix_decl(dotted=False)
            elif tok.kind == "sparql_base":
                self._take()
                self._parse_base_decl(dotted=False)
            else:
                self._parse_triples()
                self._expect(".", "'.' after triples")

    def _parse_prefix_decl(self, dotted: bool) -> None:
        name = self._expect("pname", "prefix name")
        prefix, local = name.value  # type: ignore[misc]
        if local:
            raise self._error("prefix declaration must end with ':'", name)
        iri_tok = self._expect("iriref", "namespace IRI")
        namespace = self._resolve_iri(str(iri_tok.value), iri_tok)
        self.prefixes[prefix] = namespace.value
        if dotted:
            self._expect(".", "'.' after @prefix")

    def _parse_base_decl(self, dotted: bool) -> None:
        iri_tok = self._expect("iriref", "base IRI")
        self.base = self._resolve_iri(str(iri_tok.value), iri_tok).value
        if dotted:
            self._expect(".", "'.' after @base")

    def _parse_triples(self) -> None:
        tok = self._peek()
        if tok.kind == "[":
            if self.tokens[self.i + 1].kind == "]":
                self._take()
                self._take()
                subject: Term = self._fresh_blank()
                self._parse_predicate_object_list(subject)
                return
            subject = self._parse_blank_node_property_list()
            if self._peek().kind != ".":
                self._parse_predicate_object_list(subject)
            return
        subject = self._parse_subject()
        self._parse_predicate_object_list(subject)

    def _parse_subject(self) -> Term:
        tok = self._take()
        if tok.kind == "iriref":
            return self._resolve_iri(str(tok.value), tok)
        if tok.kind == "pname":
            return self._expand_pname(tok)
        if tok.kind == "blank":
            return self._labeled_blank(str(tok.value))
        if tok.kind == "(":
            return self._parse_collection()
        raise self._error("expected subject", tok)

    def _parse_predicate_object_list(self, subject: Term) -> None:
        while True:
            predicate = self._parse_verb()
            while True:
                obj = self._parse_object()
                self.triples.append(Triple(subject, predicate, obj))
                if self._peek().kind == ",":
                    self._take()
                    continue
                break
            if self._peek().kind == ";":
                while self._peek().kind == ";":
                    self._take()
                if self._peek().kind in (".", "]"):
                    return  # trailing semicolon
                continue
            return

    def _parse_verb(self) -> IRI:
        tok = self._take()
        if tok.kind == "a":
            return RDF_TYPE
        if tok.kind == "iriref":
            return self._resolve_iri(str(tok.value), tok)
        if tok.kind == "pname":
            return self._expand_pname(tok)
        raise self._error("expected predicate", tok)

    def _parse_object(self) -> Term:
        tok = self._peek()
        if tok.kind == "iriref":
            self._take()
            return self._resolve_iri(str(tok.value), tok)
        if tok.kind == "pname":
            self._take()
            return self._expand_pname(tok)
        if tok.kind == "blank":
            self._take()
            return self._labeled_blank(str(tok.value))
        if tok.kind == "[":
            self._take()
            if self._peek().kind == "]":
                self._take()
                return self._fresh_blank()
            node = self._fresh_blank()
            self._parse_predicate_object_list(node)
            self._expect("]", "']' closing blank node property list")
            return node
        if tok.kind == "(":
            self._take()
            return self._parse_collection()
        if tok.kind == "string":
            self._take()
            return self._parse_literal_tail(tok)
        if tok.kind in ("integer", "decimal", "double"):
            self._take()
            datatype = {
                "integer": XSD_INTEGER,
                "decimal": XSD_DECIMAL,
                "double": XSD_DOUBLE,
            }[tok.kind]
            return Literal(str(tok.value), datatype)
        if tok.kind == "boolean":
            self._take()
            return Literal(str(tok.value), XSD_BOOLEAN)
        raise self._error("expected object", self._take())

    def _parse_blank_node_property_list(self) -> BlankNode:
        self._expect("[", "'['")
        node = self._fresh_blank()
        self._parse_predicate_object_list(node)
        self._expect("]", "']' closing blank node property list")
        return node

    def _parse_collection(self) -> Term:
        # caller consumed '('
        if self._peek().kind == ")":
            self._take()
            return RDF_NIL
        head = self._fresh_blank()
        cell = head
        first = True
        while True:
            if not first:
                nxt = self._fresh_blank()
                self.triples.append(Triple(cell, RDF_REST, nxt))
                cell = nxt
            first = False
            element = self._parse_object()
            self.triples.append(Triple(cell, RDF_FIRST, element))
            if self._peek().kind == ")":
                self._take()
                self.triples.append(Triple(cell, RDF_REST, RDF_NIL))
                return head

    def _parse_literal_tail(self, string_tok: _Token) -> Literal:
        lexical = str(string_tok.value)
        nxt = self._peek()
        if nxt.kind == "langtag":
            self._take()
            return Literal(lexical, RDF_LANG_STRING, str(nxt.value))
        if nxt.kind == "^^":
            self._take()
            dt_tok = self._take()
            if dt_tok.kind == "iriref":
                datatype = self._resolve_iri(str(dt_tok.value), dt_tok)
            elif dt_tok.kind == "pname":
                datatype = self._expand_pname(dt_tok)
            else:
                raise self._error("expected datatype IRI after '^^'", dt_tok)
            try:
                return Literal(lexical, datatype.value)
            except ValueError as exc:
                raise TurtleParseError(str(exc), dt_tok.line, dt_tok.column, dt_tok.text) from None
        return Literal(lexical, XSD_STRING)


def parse_turtle(document: str, base: Optional[str] = None) -> Graph:
    """Parse a Turtle document into a Graph.

    Raises TurtleParseError (or a subclass) with 1-based line/column on any
    malformed input; never returns a partial graph.
    """
    lexer = _Lexer(document.lstrip("﻿"))
    parser = _Parser(lexer.tokens(), base)
    parser.parse_document()
    return Graph(parser.triples, parser.prefixes)


# ---------------------------------------------------------------------------
# canonical serialization
# ---------------------------------------------------------------------------

_INTEGER_LEX = re.compile(r"^[+-]?[0-9]+$")
_DECIMAL_LEX = re.compile(r"^[+-]?[0-9]*\.[0-9]+$")
_DOUBLE_LEX = re.compile(r"^[+-]?(?:\d+\.\d*|\.\d+|\d+)[eE][+-]?\d+$")
_PN_LOCAL_OK = re.compile(r"^$|^[A-Za-z0-9_](?:[A-Za-z0-9_.-]*[A-Za-z0-9_-])?$")

_CHAR_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
    "\b": "\\b",
    "\f": "\\f",
}


def _escape_string(text: str) -> str:
    parts = []
    for c in text:
        if c in _CHAR_ESCAPES:
            parts.append(_CHAR_ESCAPES[c])
        elif ord(c) < 0x20 or ord(c) == 0x7F:
            parts.append(f"\\u{ord(c):04X}")
        else:
            parts.append(c)
    return "".join(parts)


def _abbreviation_table(prefixes) -> list[tuple[str, str]]:
    # longest namespace wins; ties go to the lexicographically smallest prefix
    return sorted(prefixes.items(), key=lambda item: (-len(item[1]), item[0]))


def _render_iri(iri: IRI, table: list[tuple[str, str]]) -> str:
    for prefix, namespace in table:
        if iri.value.startswith(namespace):
            local = iri.value[len(namespace) :]
            if _PN_LOCAL_OK.match(local):
                return f"{prefix}:{local}"
    return f"<{iri.value}>"


def _render_literal(literal: Literal, table: list[tuple[str, str]]) -> str:
    if literal.language:
        return f'"{_escape_string(literal.lexical)}"@{literal.language}'
    dt = literal.datatype
    if dt == XSD_STRING:
        return f'"{_escape_string(literal.lexical)}"'
    if dt == XSD_INTEGER and _INTEGER_LEX.match(literal.lexical):
        return literal.lexical
    if dt == XSD_DECIMAL and _DECIMAL_LEX.match(literal.lexical):
        return literal.lexical
    if dt == XSD_DOUBLE and _DOUBLE_LEX.match(literal.lexical):
        return literal.lexical
    if dt == XSD_BOOLEAN and literal.lexical in ("true", "false"):
        return literal.lexical
    return f'"{_escape_string(literal.lexical)}"^^{_render_iri(IRI(dt), table)}'


def _render_term(term: Term, table: list[tuple[str, str]]) -> str:
    if isinstance(term, IRI):
        return _render_iri(term, table)
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    return _render_literal(term, table)


def serialize_turtle(graph: Graph) -> str:
    """Canonical Turtle: sorted prefixes, subjects, predicates and objects.

    Identical graphs serialize to identical bytes; parse_turtle of the output
    yields a graph isomorphic to the input.
    """
    table = _abbreviation_table(graph.prefixes)
    lines = [f"@prefix {p}: <{ns}> ." for p, ns in sorted(graph.prefixes.items())]

    by_subject: dict[Term, dict[IRI, list[Term]]] = {}
    for t in graph.triples:
        by_subject.setdefault(t.subject, {}).setdefault(t.predicate, []).append(t.object)

    blocks = []
    for subject in sorted(by_subject, key=term_sort_key):
        groups = by_subject[subject]
        parts = []
        for predicate in sorted(groups, key=predicate_sort_key):
            rendered_pred = "a" if predicate == RDF_TYPE else _render_iri(predicate, table)
            objects = sorted(groups[predicate], key=term_sort_key)
            rendered_objs = ", ".join(_render_term(o, table) for o in objects)
            parts.append(f"{rendered_pred} {rendered_objs}")
        blocks.append(f"{_render_term(subject, table)} " + " ;\n    ".join(parts) + " .")

    if lines and blocks:
        lines.append("")
    lines.extend(blocks)
    return "\n".join(lines) + "\n" if lines else ""
