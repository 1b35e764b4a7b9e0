"""Fixed-size microaggregation (MDAV) over the SSE-distance.

Groups of at least ``k`` records are formed around the records farthest from
the running centroid, then every record is replaced by its group centroid:
the least marginal category for nominal attributes, the arithmetic mean for
numerical ones and the rank nearest the mean rank for ordinal ones.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import Kind, MappingTable, MicrodataTable, export_mapping, invert_mapping, verify_mapping
from .distance import DistanceContext, build_context, sse_distance
from .errors import AllAttributesExcluded, ChecksumMismatch, KTooLarge, KTooSmall, ReversibilityError, StaleGrouping
from .marginality import WeightMode
from .stats import mean_nominal, variance_nominal


def _fingerprint(table: MicrodataTable) -> str:
    return hashlib.sha256(table.to_csv().encode("utf-8")).hexdigest()


def centroid(table: MicrodataTable, rows: Sequence[int]) -> tuple:
    out = []
    for j, attr in enumerate(table.schema.attributes):
        col = [table.rows[i][j] for i in rows]
        if attr.kind is Kind.NOMINAL:
            out.append(mean_nominal(attr.taxonomy, col, WeightMode.FIXED).category)
        elif attr.kind is Kind.ORDINAL:
            # nearest rank, lower rank on an exact half
            out.append(math.ceil(sum(col) / len(col) - 0.5))
        else:
            out.append(float(np.mean(col)))
    return tuple(out)


def _within_sse(table: MicrodataTable, rows: Sequence[int]) -> tuple[float, ...]:
    """Per attribute, group size times group variance (average marginality for nominal)."""
    out = []
    for j, attr in enumerate(table.schema.attributes):
        col = [table.rows[i][j] for i in rows]
        if attr.kind is Kind.NOMINAL:
            out.append(len(col) * variance_nominal(attr.taxonomy, col, WeightMode.FIXED))
        else:
            out.append(float(len(col) * np.var(np.asarray(col, dtype=float))))
    return tuple(out)


@dataclass(frozen=True)
class GroupingResult:
    assignment: tuple[int, ...]
    groups: tuple[tuple[int, ...], ...]
    centroids: tuple[tuple, ...]
    within_sse: tuple[tuple[float, ...], ...]
    k: int
    table_fingerprint: str

    @property
    def sizes(self) -> list[int]:
        return [len(g) for g in self.groups]

    def total_sse(self) -> tuple[float, ...]:
        return tuple(float(sum(col)) for col in zip(*self.within_sse))

    def to_csv(self) -> str:
        return "row,group\n" + "".join(f"{i},{g}\n" for i, g in enumerate(self.assignment))


def mdav_group(table: MicrodataTable, k: int, ctx: DistanceContext | None = None) -> GroupingResult:
    if k < 2:
        raise KTooSmall(f"k must be at least 2, got {k}")
    if k > table.n:
        raise KTooLarge(f"k={k} exceeds the {table.n} rows of the table")
    if ctx is None:
        try:
            ctx = build_context(table)
        except AllAttributesExcluded:
            ctx = None  # every record is identical on every attribute
    rows = table.rows

    def dist_to(point, idx):
        if ctx is None:
            return [0.0] * len(idx)
        return [sse_distance(rows[i], point, ctx) for i in idx]

    def farthest(point, idx):
        d = dist_to(point, idx)
        best = max(d)
        return min(i for i, di in zip(idx, d) if di == best)

    def nearest_k(point, idx):
        d = dist_to(point, idx)
        ranked = sorted(zip(d, idx))
        return sorted(i for _, i in ranked[:k])

    remaining = list(range(table.n))
    groups = []

    def take(group):
        groups.append(tuple(group))
        chosen = set(group)
        remaining[:] = [i for i in remaining if i not in chosen]

    while len(remaining) >= 3 * k:
        c = centroid(table, remaining)
        r = farthest(c, remaining)
        s = farthest(rows[r], remaining)
        take(nearest_k(rows[r], remaining))
        take(nearest_k(rows[s], remaining))
    if len(remaining) >= 2 * k:
        c = centroid(table, remaining)
        r = farthest(c, remaining)
        take(nearest_k(rows[r], remaining))
    take(remaining[:])

    assignment = [0] * table.n
    for g, members in enumerate(groups):
        for i in members:
            assignment[i] = g
    return GroupingResult(
        tuple(assignment),
        tuple(groups),
        tuple(centroid(table, g) for g in groups),
        tuple(_within_sse(table, g) for g in groups),
        k,
        _fingerprint(table),
    )


def replace_with_centroids(table: MicrodataTable, grouping: GroupingResult) -> MicrodataTable:
    if len(grouping.assignment) != table.n or grouping.table_fingerprint != _fingerprint(table):
        raise StaleGrouping("grouping was computed on a different table")
    rows = tuple(grouping.centroids[g] for g in grouping.assignment)
    return MicrodataTable(table.schema, rows)


def nominal_mappings(table: MicrodataTable) -> dict[str, MappingTable]:
    return {a.name: export_mapping(table, a.name, WeightMode.FIXED)
            for a in table.schema.attributes if a.is_nominal}


def check_reversibility(original: MicrodataTable, released: MicrodataTable,
                        before: dict[str, MappingTable]) -> None:
    """Fail loudly if treatment disturbed the marginality mapping.

    The mapping documents taken before treatment must still verify against
    their taxonomies, must equal a fresh derivation from the original table
    byte for byte, and every released nominal value must be recoverable from
    its marginality through them.
    """
    after = nominal_mappings(original)
    for name, mapping in before.items():
        attr = original.schema[name]
        try:
            verify_mapping(mapping, attr.taxonomy)
        except ChecksumMismatch as exc:
            raise ReversibilityError(str(exc)) from exc
        if after[name].to_csv() != mapping.to_csv():
            raise ReversibilityError(f"mapping of {name!r} changed during treatment")
        lookup = {c: m for c, m, _ in mapping.entries}
        for value in set(released.column(name)):
            if value not in lookup:
                raise ReversibilityError(f"released value {value!r} of {name!r} has no stored marginality")
            if value not in invert_mapping(mapping, lookup[value], attr.taxonomy):
                raise ReversibilityError(f"value {value!r} of {name!r} does not invert")


@dataclass(frozen=True)
class AnonymizationResult:
    table: MicrodataTable
    grouping: GroupingResult
    mappings: dict[str, MappingTable]


def anonymize(table: MicrodataTable, k: int) -> AnonymizationResult:
    """MDAV grouping, centroid replacement and the mapping guard in one call."""
    before = nominal_mappings(table)
    grouping = mdav_group(table, k)
    released = replace_with_centroids(table, grouping)
    check_reversibility(table, released, before)
    return AnonymizationResult(released, grouping, before)
