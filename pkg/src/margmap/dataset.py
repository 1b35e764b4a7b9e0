"""Microdata tables, schemas, and the persisted category <-> marginality mapping.

A schema is an INI document with one section per attribute, in column
order::

    [disease]
    kind = nominal
    taxonomy = diseases.csv

    [age]
    kind = numerical

    [education]
    kind = ordinal
    order = primary, secondary, tertiary

Taxonomy paths are resolved relative to the schema file. Ordinal cells are
stored as their rank in the declared order.
"""

from __future__ import annotations

import configparser
import enum
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import (
    ChecksumMismatch,
    EmptyTable,
    HeaderMismatch,
    NotNominal,
    RaggedRow,
    SchemaError,
    UnboundTaxonomy,
    UnknownCategory,
    UnparseableNumber,
)
from .marginality import WeightMode, marginality_vector
from .taxonomy import Taxonomy, load_taxonomy


class Kind(str, enum.Enum):
    NUMERICAL = "numerical"
    ORDINAL = "ordinal"
    NOMINAL = "nominal"


@dataclass(frozen=True)
class Attribute:
    name: str
    kind: Kind
    taxonomy: Taxonomy | None = None
    order: tuple[str, ...] | None = None
    taxonomy_path: str | None = None

    def __post_init__(self):
        if self.kind is Kind.ORDINAL:
            if not self.order:
                raise SchemaError(f"ordinal attribute {self.name!r} needs an order")
            if len(set(self.order)) != len(self.order):
                raise SchemaError(f"ordinal attribute {self.name!r} has duplicate categories")

    @property
    def is_nominal(self) -> bool:
        return self.kind is Kind.NOMINAL

    def parse_cell(self, text: str, row: int):
        if self.kind is Kind.NOMINAL:
            if self.taxonomy is None:
                raise UnboundTaxonomy(f"attribute {self.name!r} has no taxonomy")
            if text not in self.taxonomy:
                raise UnknownCategory(text, row=row, attribute=self.name)
            return text
        if self.kind is Kind.ORDINAL:
            try:
                return self.order.index(text)
            except ValueError:
                raise UnknownCategory(text, row=row, attribute=self.name) from None
        try:
            value = float(text)
        except ValueError:
            raise UnparseableNumber(f"row {row}, attribute {self.name!r}: cannot parse {text!r}") from None
        if not math.isfinite(value):
            raise UnparseableNumber(f"row {row}, attribute {self.name!r}: non-finite value {text!r}")
        return value

    def format_cell(self, value) -> str:
        if self.kind is Kind.NOMINAL:
            return value
        if self.kind is Kind.ORDINAL:
            return self.order[value]
        return repr(float(value))


@dataclass(frozen=True)
class Schema:
    attributes: tuple[Attribute, ...]

    def __post_init__(self):
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise SchemaError("attribute names must be unique")
        if not names:
            raise SchemaError("schema has no attributes")

    @property
    def names(self) -> list[str]:
        return [a.name for a in self.attributes]

    def __len__(self) -> int:
        return len(self.attributes)

    def __getitem__(self, key: int | str) -> Attribute:
        if isinstance(key, int):
            return self.attributes[key]
        for a in self.attributes:
            if a.name == key:
                return a
        raise KeyError(key)

    def index(self, name: str) -> int:
        return self.names.index(name)


def parse_schema(text: str, base_dir: str | os.PathLike = ".") -> Schema:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise SchemaError(f"cannot parse schema: {exc}") from None
    attrs = []
    for name in parser.sections():
        sec = parser[name]
        try:
            kind = Kind(sec.get("kind", "").strip())
        except ValueError:
            raise SchemaError(f"attribute {name!r}: kind must be numerical, ordinal or nominal") from None
        if kind is Kind.NOMINAL:
            rel = sec.get("taxonomy")
            if not rel:
                raise UnboundTaxonomy(f"nominal attribute {name!r} has no taxonomy path")
            path = Path(base_dir) / rel.strip()
            try:
                tax = load_taxonomy(path)
            except OSError as exc:
                raise UnboundTaxonomy(f"attribute {name!r}: cannot read {path}: {exc.strerror}") from None
            attrs.append(Attribute(name, kind, taxonomy=tax, taxonomy_path=rel.strip()))
        elif kind is Kind.ORDINAL:
            order = tuple(s.strip() for s in sec.get("order", "").split(",") if s.strip())
            attrs.append(Attribute(name, kind, order=order))
        else:
            attrs.append(Attribute(name, kind))
    return Schema(tuple(attrs))


def load_schema(path: str | os.PathLike) -> Schema:
    path = Path(path)
    return parse_schema(path.read_text(encoding="utf-8"), path.parent)


@dataclass(frozen=True)
class MicrodataTable:
    schema: Schema
    rows: tuple[tuple, ...]

    def __post_init__(self):
        for i, row in enumerate(self.rows):
            if len(row) != len(self.schema):
                raise RaggedRow(f"row {i} has {len(row)} cells, expected {len(self.schema)}")

    @property
    def n(self) -> int:
        return len(self.rows)

    def column(self, key: int | str) -> list:
        j = key if isinstance(key, int) else self.schema.index(key)
        return [row[j] for row in self.rows]

    def to_csv(self) -> str:
        lines = [",".join(self.schema.names)]
        for row in self.rows:
            lines.append(",".join(a.format_cell(v) for a, v in zip(self.schema.attributes, row)))
        return "\n".join(lines) + "\n"


def load_table(data: str, schema: Schema) -> MicrodataTable:
    """Parse CSV text (header required, no quoting) against ``schema``.

    Row numbers in error messages count data rows from 1.
    """
    lines = data.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise EmptyTable("no header row")
    header = lines[0].lstrip("﻿").split(",")
    if header != schema.names:
        raise HeaderMismatch(f"header {header} does not match schema {schema.names}")
    rows = []
    for i, line in enumerate(lines[1:], start=1):
        cells = line.split(",")
        if len(cells) != len(header) or any(c == "" for c in cells):
            raise RaggedRow(f"row {i}: expected {len(header)} non-empty cells, got {line!r}")
        rows.append(tuple(a.parse_cell(c, i) for a, c in zip(schema.attributes, cells)))
    return MicrodataTable(schema, tuple(rows))


def read_table(csv_path, schema: Schema) -> MicrodataTable:
    with open(csv_path, encoding="utf-8") as fh:
        return load_table(fh.read(), schema)


@dataclass(frozen=True)
class MappingTable:
    """Marginality assigned to each sampled category of one nominal attribute."""

    attribute: str
    entries: tuple[tuple[str, int, int], ...]  # (category, marginality, count)
    weight_mode: WeightMode
    taxonomy_checksum: str

    def to_csv(self) -> str:
        lines = [
            f"# attribute={self.attribute} weight_mode={self.weight_mode.value} "
            f"taxonomy_sha256={self.taxonomy_checksum}",
            "category,marginality,count",
        ]
        lines.extend(f"{c},{m},{k}" for c, m, k in self.entries)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "MappingTable":
        lines = text.splitlines()
        if len(lines) < 2 or not lines[0].startswith("#"):
            raise SchemaError("mapping document must start with a '#' metadata line")
        meta = dict(tok.split("=", 1) for tok in lines[0][1:].split() if "=" in tok)
        try:
            attribute = meta["attribute"]
            mode = WeightMode(meta["weight_mode"])
            checksum = meta["taxonomy_sha256"]
        except (KeyError, ValueError) as exc:
            raise SchemaError(f"bad mapping metadata: {exc}") from None
        if lines[1] != "category,marginality,count":
            raise SchemaError("mapping header must be 'category,marginality,count'")
        entries = []
        for line in lines[2:]:
            if not line:
                continue
            cat, m, k = line.rsplit(",", 2)
            entries.append((cat, int(m), int(k)))
        return cls(attribute, tuple(entries), mode, checksum)


def mapping_from_sample(attribute: str, taxonomy: Taxonomy, sample: Sequence[str],
                        mode: WeightMode | str = WeightMode.FIXED) -> MappingTable:
    mode = WeightMode.parse(mode)
    mm = marginality_vector(taxonomy, sample, mode)
    entries = tuple((c, mm.per_category[c], mm.counts[c]) for c in sorted(mm.per_category))
    return MappingTable(attribute, entries, mode, taxonomy.checksum())


def export_mapping(table: MicrodataTable, attribute: str,
                   mode: WeightMode | str = WeightMode.FIXED) -> MappingTable:
    attr = table.schema[attribute]
    if not attr.is_nominal:
        raise NotNominal(f"attribute {attribute!r} is {attr.kind.value}, not nominal")
    if table.n == 0:
        raise EmptyTable("table has no rows")
    return mapping_from_sample(attribute, attr.taxonomy, table.column(attribute), mode)


def verify_mapping(mapping: MappingTable, taxonomy: Taxonomy) -> None:
    """Raise :class:`ChecksumMismatch` unless ``mapping`` belongs to ``taxonomy``
    and its marginalities re-derive exactly from the stored multiplicities."""
    if mapping.taxonomy_checksum != taxonomy.checksum():
        raise ChecksumMismatch(f"mapping for {mapping.attribute!r} was built on a different taxonomy")
    sample = [c for c, _, k in mapping.entries for _ in range(k)]
    rederived = mapping_from_sample(mapping.attribute, taxonomy, sample, mapping.weight_mode)
    if rederived.entries != mapping.entries:
        raise ChecksumMismatch(f"stored marginalities for {mapping.attribute!r} do not re-derive")


def invert_mapping(mapping: MappingTable, value: int, taxonomy: Taxonomy) -> set[str]:
    """All categories whose stored marginality equals ``value``."""
    verify_mapping(mapping, taxonomy)
    return {c for c, m, _ in mapping.entries if m == value}
