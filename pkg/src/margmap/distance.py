"""SSE-distance between records with numerical, ordinal and nominal attributes.

For each attribute the variance of the two-record group is divided by the
variance of that attribute over the whole table; the distance is the square
root of the sum. For a nominal attribute the two-record variance reduces to
the tree distance, for numerical ones to ``(v1 - v2)**2 / 2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import Kind, MicrodataTable, Schema
from .errors import AllAttributesExcluded, NonFiniteNumber, SchemaMismatch
from .marginality import WeightMode, WeightTable, node_distance
from .stats import variance_nominal


@dataclass(frozen=True)
class DistanceContext:
    schema: Schema
    variances: tuple[float, ...]
    included: tuple[bool, ...]
    weights: tuple[WeightTable | None, ...]

    @property
    def active(self) -> list[int]:
        return [j for j, inc in enumerate(self.included) if inc]


def build_context(table: MicrodataTable) -> DistanceContext:
    """Dataset variances per attribute; constant attributes are excluded with a warning."""
    schema = table.schema
    variances, included, weights = [], [], []
    for j, attr in enumerate(schema.attributes):
        col = table.column(j)
        if attr.kind is Kind.NOMINAL:
            var = variance_nominal(attr.taxonomy, col, WeightMode.FIXED)
            weights.append(WeightTable(max(1, attr.taxonomy.height)))
        else:
            var = float(np.var(np.asarray(col, dtype=float)))
            weights.append(None)
        variances.append(var)
        included.append(var > 0)
        if var <= 0:
            warnings.warn(f"attribute {attr.name!r} is constant and is left out of distances",
                          stacklevel=2)
    if not any(included):
        raise AllAttributesExcluded("every attribute is constant; distance undefined")
    return DistanceContext(schema, tuple(variances), tuple(included), tuple(weights))


def two_point_variance(kind: Kind, v1, v2, taxonomy=None, weights: WeightTable | None = None) -> float:
    if kind is Kind.NOMINAL:
        if weights is None:
            weights = WeightTable(max(1, taxonomy.height))
        return node_distance(taxonomy, weights, v1, v2)
    if not (math.isfinite(v1) and math.isfinite(v2)):
        raise NonFiniteNumber(f"non-finite value in ({v1}, {v2})")
    return (v1 - v2) ** 2 / 2


def sse_distance(r1: Sequence, r2: Sequence, ctx: DistanceContext) -> float:
    schema = ctx.schema
    if len(r1) != len(schema) or len(r2) != len(schema):
        raise SchemaMismatch(f"records of arity {len(r1)}, {len(r2)} for a schema of {len(schema)}")
    total = 0.0
    for j in ctx.active:
        attr = schema.attributes[j]
        tpv = two_point_variance(attr.kind, r1[j], r2[j], attr.taxonomy, ctx.weights[j])
        total += tpv / ctx.variances[j]
    return math.sqrt(total)


def distance_matrix(table: MicrodataTable, ctx: DistanceContext | None = None) -> np.ndarray:
    ctx = build_context(table) if ctx is None else ctx
    n = table.n
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = sse_distance(table.rows[i], table.rows[j], ctx)
    return out


def matrix_to_csv(matrix: np.ndarray) -> str:
    n = matrix.shape[0]
    lines = ["," + ",".join(str(i) for i in range(n))]
    for i in range(n):
        lines.append(f"{i}," + ",".join(repr(float(v)) for v in matrix[i]))
    return "\n".join(lines) + "\n"
