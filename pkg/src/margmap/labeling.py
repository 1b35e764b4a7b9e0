"""Positional b-ary labels for sampled categories and the hierarchical variance.

Each edge of the pruned tree gets a base-``b`` digit picked from a
centre-out succession, the busiest child subtree getting the most central
digit. Node labels concatenate edge digits from the root down and are padded
with the first digit of the succession. The hierarchical variance weighs the
variance of each digit position by ``b**(2k)``.

:func:`variance_order_agreement` checks empirically whether this variance and
the marginality-based one rank equal-size samples the same way.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .marginality import WeightMode, marginality_vector
from .taxonomy import PrunedTree, Taxonomy, prune_to_sample

TIE_RTOL = 1e-12


def label_succession(b: int) -> list[int]:
    """Digits ``l_0 .. l_{b-1}``, alternating outwards from the middle of ``0..b-1``.

    >>> label_succession(5)
    [2, 1, 3, 0, 4]
    >>> label_succession(4)
    [1, 2, 0, 3]
    """
    if b < 1:
        raise ValueError("b must be >= 1")
    if b % 2:
        c = (b - 1) // 2
        return [c] + [c - (i + 1) // 2 if i % 2 else c + i // 2 for i in range(1, b)]
    c = (b - 2) // 2
    return [c] + [c + (i + 1) // 2 if i % 2 else c - i // 2 for i in range(1, b)]


@dataclass(frozen=True)
class EdgeLabeling:
    b: int
    succession: tuple[int, ...]
    label_of_edge: Mapping[tuple[str, str], int]


@dataclass(frozen=True)
class NodeLabelSet:
    """Padded labels of sampled categories, most significant digit first."""

    label_of: Mapping[str, tuple[int, ...]]
    length: int
    occupancy: Mapping[str, int] = field(repr=False)

    def digit_columns(self) -> list[list[int]]:
        """``columns[k]`` holds the ``k``-th least significant digit of every sample element."""
        cols = [[] for _ in range(self.length)]
        for cat, label in self.label_of.items():
            reps = self.occupancy[cat]
            for k in range(self.length):
                cols[k].extend([label[self.length - 1 - k]] * reps)
        return cols


def assign_labels(pruned: PrunedTree) -> tuple[EdgeLabeling, NodeLabelSet]:
    tree = pruned.tree
    b = max(1, pruned.source.max_children)
    succession = label_succession(b)
    order = list(tree)
    parent = tree.parent_map

    # distinct sampled categories per subtree, the node itself included
    distinct = {v: int(pruned.occupancy.get(v, 0) > 0) for v in order}
    for v in reversed(order[1:]):
        distinct[parent[v]] += distinct[v]

    edge_label = {}
    for v in order:
        ranked = sorted(tree.children(v), key=lambda c: (-distinct[c], c))
        for i, c in enumerate(ranked):
            edge_label[(v, c)] = succession[i]

    raw = {tree.root: ()}
    for v in order[1:]:
        raw[v] = raw[parent[v]] + (edge_label[(parent[v], v)],)
    length = tree.height
    pad = succession[0]
    labels = {
        cat: raw[cat] + (pad,) * (length - len(raw[cat]))
        for cat in sorted(pruned.occupancy)
    }
    return (EdgeLabeling(b, tuple(succession), edge_label),
            NodeLabelSet(labels, length, pruned.occupancy))


def _population_variance(values: Sequence[int]) -> Fraction:
    n = len(values)
    s = sum(values)
    ss = sum(v * v for v in values)
    return Fraction(ss * n - s * s, n * n)


def hierarchical_variance_exact(taxonomy: Taxonomy, sample: Sequence[str]) -> Fraction:
    pruned = prune_to_sample(taxonomy, sample)
    edges, labels = assign_labels(pruned)
    b2 = edges.b ** 2
    return sum((b2 ** k * _population_variance(col)
                for k, col in enumerate(labels.digit_columns())), Fraction(0))


def hierarchical_variance(taxonomy: Taxonomy, sample: Sequence[str]) -> float:
    """Sum over digit positions ``k`` of ``b**(2k)`` times the population variance of that position."""
    return float(hierarchical_variance_exact(taxonomy, sample))


def _var_m_pruned(taxonomy: Taxonomy, sample: Sequence[str]) -> Fraction:
    mm = marginality_vector(taxonomy, sample, WeightMode.PRUNED)
    return Fraction(sum(mm.values), len(sample))


@dataclass
class Violation:
    sample_a: tuple[str, ...]
    sample_b: tuple[str, ...]
    var_m_a: Fraction
    var_m_b: Fraction
    var_h_a: Fraction
    var_h_b: Fraction


@dataclass
class AgreementReport:
    n: int
    multisets: int
    pairs_total: int
    pairs_checked: int = 0
    agreements: int = 0
    ties_handled: int = 0
    violations: list[Violation] = field(default_factory=list)
    seed: int | None = None

    @property
    def exhaustive(self) -> bool:
        return self.pairs_checked == self.pairs_total

    def summary_csv(self) -> str:
        return ("pairs,agreements,ties,violations\n"
                f"{self.pairs_checked},{self.agreements},{self.ties_handled},{len(self.violations)}\n")

    def violations_csv(self) -> str:
        lines = ["sample_a,sample_b,var_m_a,var_m_b,var_h_a,var_h_b"]
        for v in self.violations:
            lines.append(",".join([
                "|".join(v.sample_a), "|".join(v.sample_b),
                _fmt(v.var_m_a), _fmt(v.var_m_b), _fmt(v.var_h_a), _fmt(v.var_h_b),
            ]))
        return "\n".join(lines) + "\n"


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else repr(float(x))


def _tied(a: Fraction, b: Fraction) -> bool:
    return abs(a - b) <= TIE_RTOL * max(abs(a), abs(b))


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _unrank_pair(p: int, m: int) -> tuple[int, int]:
    # pairs (i, j), i < j, enumerated row by row
    i = m - 2 - (math.isqrt(4 * m * (m - 1) - 8 * p - 7) - 1) // 2
    j = p + i + 1 - m * (m - 1) // 2 + (m - i) * (m - i - 1) // 2
    return i, j


def variance_order_agreement(taxonomy: Taxonomy, n: int, limit: int = 100_000,
                             seed: int = 42) -> AgreementReport:
    """Compare the orderings induced by both variances over size-``n`` multisets.

    Every unordered pair of distinct multisets of ``n`` nodes is checked when
    there are at most ``limit`` pairs; otherwise ``limit`` pairs are drawn
    with a seeded generator. Marginality uses pruned-tree weights.
    """
    if n < 1:
        raise ValueError("sample size must be >= 1")
    samples = list(itertools.combinations_with_replacement(sorted(taxonomy.nodes), n))
    m = len(samples)
    total = m * (m - 1) // 2
    if total <= limit:
        pair_ids = range(total)
        used_seed = None
    else:
        rng = random.Random(seed)
        pair_ids = sorted(rng.sample(range(total), limit))
        used_seed = seed

    vm: dict[int, Fraction] = {}
    vh: dict[int, Fraction] = {}

    def stats(i):
        if i not in vm:
            vm[i] = _var_m_pruned(taxonomy, samples[i])
            vh[i] = hierarchical_variance_exact(taxonomy, samples[i])
        return vm[i], vh[i]

    report = AgreementReport(n=n, multisets=m, pairs_total=total, seed=used_seed)
    for p in pair_ids:
        i, j = _unrank_pair(p, m)
        ma, ha = stats(i)
        mb, hb = stats(j)
        report.pairs_checked += 1
        outcome = _classify(ma, mb, ha, hb)
        if outcome == "tie":
            report.ties_handled += 1
        elif outcome == "agreement":
            report.agreements += 1
        else:
            report.violations.append(Violation(samples[i], samples[j], ma, mb, ha, hb))
    return report


def _classify(ma, mb, ha, hb) -> str:
    if _tied(ma, mb) or _tied(ha, hb):
        return "tie"
    return "agreement" if _sign(ma - mb) == _sign(ha - hb) else "violation"


def compare_samples(taxonomy: Taxonomy, a: Sequence[str], b: Sequence[str]) -> str:
    """``"agreement"``, ``"tie"`` or ``"violation"`` for one pair of samples."""
    return _classify(_var_m_pruned(taxonomy, a), _var_m_pruned(taxonomy, b),
                     hierarchical_variance_exact(taxonomy, a), hierarchical_variance_exact(taxonomy, b))
