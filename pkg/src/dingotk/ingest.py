"""Tabular ingestion: map CSV/JSON records onto conformant triples.

A mapping file declares the expected columns, one block per emitted entity::

    prefix d: <https://w3id.org/dingo#>
    base <http://example.org/grants/>
    columns grant_id, title, start, amount, project_id

    entity Grant d:Grant {
        key grant_id
        map title -> d:title : string
        map start -> d:start_time : date
        map amount -> d:funded_amount : decimal
        map project_id -> d:funds : ref Project
    }

Value kinds: ``string``, ``string@<lang>``, ``date`` (ISO year / year-month /
full date, or ``format <strptime-pattern>`` for anything else), ``decimal``
and ``ref <Entity>`` (mints the referenced entity's IRI from the cell value).
Empty cells emit nothing; conversion failures skip the cell and land in the
report instead of aborting the row.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterable, Optional
from urllib.parse import quote

from .terms import (
    DingoError,
    Graph,
    IRI,
    Literal,
    RDF_LANG_STRING,
    RDF_TYPE,
    Triple,
    XSD_DATE,
    XSD_DECIMAL,
    XSD_GYEAR,
    XSD_GYEARMONTH,
    XSD_STRING,
    is_absolute_iri,
)

# separator for composite keys; never survives percent-encoding, so minting
# stays injective across column tuples
_KEY_SEPARATOR = "\x1f"

_ISO_DATE_RE = re.compile(r"^(\d{4})(-\d{2})?(-\d{2})?$")
_DECIMAL_RE = re.compile(r"^[+-]?(\d+(\.\d+)?|\.\d+)$")


class MappingParseError(DingoError):
    def __init__(self, message: str, line: int) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}")


class EmptyKeyError(DingoError):
    pass


@dataclass(frozen=True)
class PropertyRule:
    column: str
    predicate: IRI
    value_kind: str  # string | lang-string | date | decimal | ref
    language: Optional[str] = None
    ref_entity: Optional[str] = None
    date_format: Optional[str] = None


@dataclass(frozen=True)
class EntityRule:
    name: str
    entity_class: IRI
    key_columns: tuple
    property_rules: tuple


@dataclass(frozen=True)
class MappingSpec:
    base_iri: str
    entities: tuple
    columns: tuple
    prefixes: dict = field(default_factory=dict, hash=False, compare=False)

    def entity(self, name: str) -> EntityRule:
        for rule in self.entities:
            if rule.name == name:
                return rule
        raise KeyError(name)


@dataclass(frozen=True)
class CellFailure:
    row: int  # 1-based data row number
    column: str
    value: str
    reason: str


@dataclass
class IngestReport:
    rows: int = 0
    triples: int = 0
    skipped_cells: int = 0
    failures: list = field(default_factory=list)

    def lines(self) -> list:
        out = [
            f"rows: {self.rows}",
            f"triples: {self.triples}",
            f"skipped cells: {self.skipped_cells}",
            f"conversion failures: {len(self.failures)}",
        ]
        out.extend(
            f"  row {f.row}, column {f.column}: {f.reason} ({f.value!r})" for f in self.failures
        )
        return out


def mint_iri(base: str, entity_class: IRI, key: str) -> IRI:
    """Deterministic instance IRI: base + lowercased class local name + / + key.

    The key is percent-encoded, so distinct keys always yield distinct IRIs.
    """
    if not key:
        raise EmptyKeyError("cannot mint an IRI from an empty key")
    if not base.endswith(("/", "#")):
        base += "/"
    local = re.split(r"[#/]", entity_class.value)[-1].lower()
    return IRI(f"{base}{local}/{quote(key, safe='')}")


# ---------------------------------------------------------------------------
# mapping file parsing
# ---------------------------------------------------------------------------

_IRI_OR_PNAME = r"(?:<[^<>\s]+>|[A-Za-z_][\w.-]*:[\w.%-]*)"
_PREFIX_LINE = re.compile(r"^prefix\s+([A-Za-z_][\w.-]*):\s+<([^<>\s]+)>$")
_BASE_LINE = re.compile(r"^base\s+<([^<>\s]+)>$")
_COLUMNS_LINE = re.compile(r"^columns\s+(.+)$")
_ENTITY_LINE = re.compile(r"^entity\s+([A-Za-z_][\w-]*)\s+(" + _IRI_OR_PNAME + r")\s*\{$")
_KEY_LINE = re.compile(r"^key\s+(.+)$")
_MAP_LINE = re.compile(
    r"^map\s+([\w.-]+)\s*->\s*(" + _IRI_OR_PNAME + r")\s*:\s*"
    r"(ref\s+[A-Za-z_][\w-]*|\S+)(?:\s+format\s+(.+))?$"
)


class _MappingParser:
    def __init__(self, text: str) -> None:
        self.lines = text.splitlines()
        self.prefixes: dict = {}
        self.base: Optional[str] = None
        self.columns: list = []
        self.entities: list = []

    def _resolve(self, token: str, line_no: int) -> IRI:
        if token.startswith("<"):
            raw = token[1:-1]
        else:
            prefix, _, local = token.partition(":")
            if prefix not in self.prefixes:
                raise MappingParseError(f"undefined prefix {prefix + ':'!r}", line_no)
            raw = self.prefixes[prefix] + local
        if not is_absolute_iri(raw):
            raise MappingParseError(f"IRI must be absolute: {raw!r}", line_no)
        try:
            return IRI(raw)
        except ValueError as exc:
            raise MappingParseError(str(exc), line_no) from None

    def _check_column(self, column: str, line_no: int) -> str:
        if column not in self.columns:
            raise MappingParseError(f"undeclared column {column!r}", line_no)
        return column

    def parse(self) -> MappingSpec:
        i = 0
        while i < len(self.lines):
            line_no = i + 1
            line = self.lines[i].strip()
            i += 1
            if not line or line.startswith("#"):
                continue
            if match := _PREFIX_LINE.match(line):
                self.prefixes[match.group(1)] = match.group(2)
            elif match := _BASE_LINE.match(line):
                self.base = match.group(1)
                if not is_absolute_iri(self.base):
                    raise MappingParseError(f"base must be an absolute IRI: {self.base!r}", line_no)
            elif match := _COLUMNS_LINE.match(line):
                self.columns.extend(c.strip() for c in match.group(1).split(",") if c.strip())
            elif match := _ENTITY_LINE.match(line):
                i = self._parse_entity(match, i)
            else:
                raise MappingParseError(f"cannot parse: {line!r}", line_no)
        if self.base is None:
            raise MappingParseError("missing 'base <iri>' declaration", len(self.lines) or 1)
        if not self.entities:
            raise MappingParseError("mapping declares no entities", len(self.lines) or 1)
        names = [e.name for e in self.entities]
        if len(names) != len(set(names)):
            raise MappingParseError("duplicate entity names", len(self.lines))
        for entity in self.entities:
            for rule in entity.property_rules:
                if rule.value_kind == "ref" and rule.ref_entity not in names:
                    raise MappingParseError(
                        f"entity {entity.name}: ref to undeclared entity {rule.ref_entity!r}", 1
                    )
        return MappingSpec(
            base_iri=self.base,
            entities=tuple(self.entities),
            columns=tuple(self.columns),
            prefixes=dict(self.prefixes),
        )

    def _parse_entity(self, header, i: int) -> int:
        name = header.group(1)
        entity_class = self._resolve(header.group(2), i)
        key_columns: list = []
        rules: list = []
        while True:
            if i >= len(self.lines):
                raise MappingParseError(f"entity {name}: unterminated block", len(self.lines))
            line_no = i + 1
            line = self.lines[i].strip()
            i += 1
            if not line or line.startswith("#"):
                continue
            if line == "}":
                break
            if match := _KEY_LINE.match(line):
                key_columns.extend(
                    self._check_column(c.strip(), line_no)
                    for c in match.group(1).split(",")
                    if c.strip()
                )
            elif match := _MAP_LINE.match(line):
                rules.append(self._parse_map(match, line_no))
            else:
                raise MappingParseError(f"cannot parse: {line!r}", line_no)
        if not key_columns:
            raise MappingParseError(f"entity {name}: missing 'key' declaration", line_no)
        self.entities.append(EntityRule(name, entity_class, tuple(key_columns), tuple(rules)))
        return i

    def _parse_map(self, match, line_no: int) -> PropertyRule:
        column = self._check_column(match.group(1), line_no)
        predicate = self._resolve(match.group(2), line_no)
        kind_token = match.group(3)
        fmt = match.group(4).strip() if match.group(4) else None
        if kind_token == "string":
            return PropertyRule(column, predicate, "string")
        if kind_token.startswith("string@"):
            return PropertyRule(column, predicate, "lang-string", language=kind_token[7:])
        if kind_token == "date":
            return PropertyRule(column, predicate, "date", date_format=fmt)
        if kind_token == "decimal":
            return PropertyRule(column, predicate, "decimal")
        if kind_token.startswith("ref"):
            parts = kind_token.split()
            if len(parts) != 2:
                raise MappingParseError("ref needs an entity name: 'ref <Entity>'", line_no)
            return PropertyRule(column, predicate, "ref", ref_entity=parts[1])
        raise MappingParseError(f"unknown value kind {kind_token!r}", line_no)


def parse_mapping(text: str) -> MappingSpec:
    """Parse and validate a mapping file."""
    return _MappingParser(text.lstrip("﻿")).parse()


# ---------------------------------------------------------------------------
# ingestion
# ---------------------------------------------------------------------------


def _convert_date(raw: str, fmt: Optional[str]) -> Literal:
    if fmt:
        parsed = datetime.strptime(raw, fmt)  # ValueError propagates to caller
        return Literal(parsed.date().isoformat(), XSD_DATE)
    match = _ISO_DATE_RE.match(raw)
    if not match:
        raise ValueError(f"not an ISO date: {raw!r}")
    if match.group(3):
        datetime.strptime(raw, "%Y-%m-%d")  # validates month/day ranges
        return Literal(raw, XSD_DATE)
    if match.group(2):
        if not 1 <= int(match.group(2)[1:]) <= 12:
            raise ValueError(f"month out of range: {raw!r}")
        return Literal(raw, XSD_GYEARMONTH)
    return Literal(raw, XSD_GYEAR)


def ingest_table(rows: Iterable[dict], mapping: MappingSpec) -> tuple:
    """(Graph, IngestReport) for the given records under the mapping.

    Deterministic and idempotent: re-ingesting the same rows adds nothing,
    and the output graph carries the mapping's prefixes so its canonical
    Turtle is stable.
    """
    triples: set = set()
    report = IngestReport()
    for row_number, row in enumerate(rows, start=1):
        report.rows += 1
        for entity in mapping.entities:
            key_values = [str(row.get(column) or "") for column in entity.key_columns]
            if any(not v for v in key_values):
                report.failures.append(
                    CellFailure(
                        row_number,
                        ",".join(entity.key_columns),
                        _KEY_SEPARATOR.join(key_values),
                        f"empty key column for entity {entity.name}",
                    )
                )
                continue
            subject = mint_iri(
                mapping.base_iri, entity.entity_class, _KEY_SEPARATOR.join(key_values)
            )
            triples.add(Triple(subject, RDF_TYPE, entity.entity_class))
            for rule in entity.property_rules:
                raw = row.get(rule.column)
                raw = "" if raw is None else str(raw)
                if raw == "":
                    report.skipped_cells += 1
                    continue
                try:
                    obj = _convert_cell(raw, rule, mapping)
                except ValueError as exc:
                    report.failures.append(CellFailure(row_number, rule.column, raw, str(exc)))
                    continue
                triples.add(Triple(subject, rule.predicate, obj))
    graph = Graph(triples, mapping.prefixes)
    report.triples = len(graph)
    return graph, report


def _convert_cell(raw: str, rule: PropertyRule, mapping: MappingSpec):
    if rule.value_kind == "string":
        return Literal(raw, XSD_STRING)
    if rule.value_kind == "lang-string":
        return Literal(raw, RDF_LANG_STRING, rule.language)
    if rule.value_kind == "date":
        return _convert_date(raw, rule.date_format)
    if rule.value_kind == "decimal":
        if not _DECIMAL_RE.match(raw):
            raise ValueError(f"not a decimal: {raw!r}")
        return Literal(raw, XSD_DECIMAL)
    # ref: the cell is the referenced entity's key
    target = mapping.entity(rule.ref_entity)
    return mint_iri(mapping.base_iri, target.entity_class, raw)


# ---------------------------------------------------------------------------
# record readers
# ---------------------------------------------------------------------------


def read_csv_records(text: str, delimiter: str = ",") -> list:
    """RFC-4180 CSV with a header row, as a list of dicts."""
    reader = csv.DictReader(io.StringIO(text.lstrip("﻿")), delimiter=delimiter)
    if reader.fieldnames is None:
        return []
    return [dict(row) for row in reader]


def read_json_records(text: str) -> list:
    """JSON array of flat records; scalars are coerced to strings."""
    data = json.loads(text.lstrip("﻿"))
    if not isinstance(data, list):
        raise DingoError("JSON input must be an array of records")
    records = []
    for i, item in enumerate(data):
        if not isinstance(item, dict):
            raise DingoError(f"record {i} is not an object")
        record = {}
        for key, value in item.items():
            if value is None:
                record[key] = ""
            elif isinstance(value, bool):
                record[key] = "true" if value else "false"
            elif isinstance(value, (str, int, float)):
                record[key] = str(value)
            else:
                raise DingoError(f"record {i}, field {key!r}: nested values are not supported")
        records.append(record)
    return records
