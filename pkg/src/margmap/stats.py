"""Marginality-based mean, variance and covariance of nominal columns."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import Kind, MicrodataTable
from .errors import EmptySample, EmptyTable, LengthMismatch, UnboundTaxonomy
from .marginality import WeightMode, marginality_vector
from .taxonomy import Taxonomy


@dataclass(frozen=True)
class NominalMean:
    category: str
    marginality: int
    tied_categories: tuple[str, ...]
    n: int

    @property
    def per_other(self) -> float | None:
        """Minimum marginality divided by ``n - 1``. Not part of the original
        definition; a convenience for comparing samples of different size."""
        return None if self.n < 2 else self.marginality / (self.n - 1)


def mean_nominal(taxonomy: Taxonomy, sample: Sequence[str],
                 mode: WeightMode | str = WeightMode.FIXED) -> NominalMean:
    """Least marginal (most central) category of the sample.

    Ties go to the lexicographically least category; the whole tie set is kept.
    """
    if len(sample) == 0:
        raise EmptySample("sample is empty")
    mm = marginality_vector(taxonomy, sample, mode)
    low = min(mm.per_category.values())
    tied = tuple(sorted(c for c, m in mm.per_category.items() if m == low))
    return NominalMean(tied[0], low, tied, len(sample))


def variance_nominal(taxonomy: Taxonomy, sample: Sequence[str],
                     mode: WeightMode | str = WeightMode.FIXED) -> float:
    """Average marginality of the sample."""
    if len(sample) == 0:
        raise EmptySample("sample is empty")
    mm = marginality_vector(taxonomy, sample, mode)
    return sum(mm.values) / len(sample)


def covariance_nominal(tx: Taxonomy, ty: Taxonomy, xs: Sequence[str], ys: Sequence[str],
                       mode: WeightMode | str = WeightMode.FIXED) -> float:
    """Mean of ``sqrt(m(x_j) * m(y_j))`` with each column's marginalities taken
    against its own sample."""
    if len(xs) != len(ys):
        raise LengthMismatch(f"columns have lengths {len(xs)} and {len(ys)}")
    if not xs:
        raise EmptySample("sample is empty")
    mx = marginality_vector(tx, xs, mode).values
    my = marginality_vector(ty, ys, mode).values
    return sum(math.sqrt(a * b) for a, b in zip(mx, my)) / len(xs)


@dataclass(frozen=True)
class CovarianceMatrix:
    names: tuple[str, ...]
    values: np.ndarray
    extension: np.ndarray  # bool mask: entries with no counterpart in the original definitions

    @property
    def d(self) -> int:
        return len(self.names)

    def to_csv(self) -> str:
        lines = ["," + ",".join(self.names)]
        for i, name in enumerate(self.names):
            cells = [repr(float(v)) + ("*" if self.extension[i, j] else "")
                     for j, v in enumerate(self.values[i])]
            lines.append(name + "," + ",".join(cells))
        return "\n".join(lines) + "\n"


def covariance_matrix(table: MicrodataTable, mode: WeightMode | str = WeightMode.FIXED) -> CovarianceMatrix:
    """Covariance matrix over all attributes.

    Nominal diagonal entries are average marginalities and nominal pairs use
    the geometric-mean covariance. Numerical and ordinal (rank) columns use
    population (co)variances. A nominal/numerical pair is filled with the mean
    of ``sqrt(m(x_j)) * |y_j - mean(y)|`` and flagged as an extension.
    """
    if table.n == 0:
        raise EmptyTable("table has no rows")
    schema = table.schema
    d = len(schema)
    # per column: marginalities for nominal, centred values for the others
    scores = []
    for j, attr in enumerate(schema.attributes):
        col = table.column(j)
        if attr.kind is Kind.NOMINAL:
            if attr.taxonomy is None:
                raise UnboundTaxonomy(f"attribute {attr.name!r} has no taxonomy")
            scores.append(np.array(marginality_vector(attr.taxonomy, col, mode).values, dtype=float))
        else:
            x = np.asarray(col, dtype=float)
            scores.append(x - x.mean())

    values = np.zeros((d, d))
    ext = np.zeros((d, d), dtype=bool)
    nominal = [a.kind is Kind.NOMINAL for a in schema.attributes]
    for i in range(d):
        for j in range(i, d):
            a, b = scores[i], scores[j]
            if nominal[i] and nominal[j]:
                v = np.sqrt(a * b).mean() if i != j else a.mean()
            elif not nominal[i] and not nominal[j]:
                v = (a * b).mean()
            else:
                m, dev = (a, b) if nominal[i] else (b, a)
                v = (np.sqrt(m) * np.abs(dev)).mean()
                ext[i, j] = ext[j, i] = True
            values[i, j] = values[j, i] = v
    return CovarianceMatrix(tuple(schema.names), values, ext)


def summarize(table: MicrodataTable, mode: WeightMode | str = WeightMode.FIXED) -> str:
    """Per-attribute mean and variance as CSV; starred columns are extensions."""
    lines = ["attribute,kind,mean,num_mean,num_mean_per_other*,variance"]
    for j, attr in enumerate(table.schema.attributes):
        col = table.column(j)
        if attr.kind is Kind.NOMINAL:
            mean = mean_nominal(attr.taxonomy, col, mode)
            var = variance_nominal(attr.taxonomy, col, mode)
            per = "" if mean.per_other is None else repr(mean.per_other)
            lines.append(f"{attr.name},{attr.kind.value},{mean.category},{mean.marginality},{per},{var!r}")
        else:
            x = np.asarray(col, dtype=float)
            lines.append(f"{attr.name},{attr.kind.value},{float(x.mean())!r},,,{float(x.var())!r}")
    return "\n".join(lines) + "\n"
