"""Exponentially weighted tree distance and marginality of sample values.

Edges between depth ``i-1`` and depth ``i`` weigh ``2**(L-i)``, so one edge
high in the hierarchy outweighs any path below it. The marginality of a
sample value is the sum of its distances to every other sample element.
Everything here is exact integer arithmetic.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DepthExceedsWeightTable, EmptySample
from .taxonomy import Taxonomy, prune_to_sample


class WeightMode(str, enum.Enum):
    """Which height ``L`` sets the edge weights.

    ``FIXED`` uses the full taxonomy, so the distance is one fixed metric for
    the attribute. ``PRUNED`` uses the height of the tree pruned to the
    sample, which makes distances sample dependent.
    """

    FIXED = "fixed-full-depth"
    PRUNED = "paper-literal-pruned"

    @classmethod
    def parse(cls, value: "str | WeightMode") -> "WeightMode":
        if isinstance(value, WeightMode):
            return value
        aliases = {"fixed": cls.FIXED, "pruned": cls.PRUNED}
        if value in aliases:
            return aliases[value]
        return cls(value)


@dataclass(frozen=True)
class WeightTable:
    L: int

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("weight table height must be >= 1")

    def edge_weight(self, i: int) -> int:
        """Weight of an edge linking depth ``i-1`` to depth ``i``."""
        if not 1 <= i <= self.L:
            raise DepthExceedsWeightTable(f"edge depth {i} outside 1..{self.L}")
        return 1 << (self.L - i)

    def node_weight(self, depth: int) -> int:
        """``2**(L-depth)``; the distance from a node to its farthest possible
        descendant is ``node_weight - 1``."""
        if depth > self.L:
            raise DepthExceedsWeightTable(f"node depth {depth} exceeds weight table height {self.L}")
        return 1 << (self.L - depth)


def weight_table(taxonomy: Taxonomy, sample: Sequence[str] | None = None,
                 mode: WeightMode | str = WeightMode.FIXED) -> WeightTable:
    mode = WeightMode.parse(mode)
    if mode is WeightMode.FIXED:
        return WeightTable(max(1, taxonomy.height))
    if sample is None:
        raise ValueError("pruned weights need a sample")
    # a sample sitting only on the root has no edges; any L gives zero distances
    return WeightTable(max(1, prune_to_sample(taxonomy, sample).height))


def node_distance(taxonomy: Taxonomy, weights: WeightTable, x: str, y: str) -> int:
    """Weighted path length between two nodes, via their lowest common ancestor."""
    dx, dy = taxonomy.depth(x), taxonomy.depth(y)
    da = taxonomy.depth(taxonomy.lca(x, y))
    w = weights.node_weight
    return (w(da) - w(dx)) + (w(da) - w(dy))


def path_distance(taxonomy: Taxonomy, weights: WeightTable, x: str, y: str) -> int:
    """Same as :func:`node_distance` but by summing edge weights one by one."""
    total = 0
    depth, parent = taxonomy.depth_map, taxonomy.parent_map
    taxonomy.check(x)
    taxonomy.check(y)
    while x != y:
        # step up from whichever end is deeper
        if depth[x] >= depth[y]:
            total += weights.edge_weight(depth[x])
            x = parent[x]
        else:
            total += weights.edge_weight(depth[y])
            y = parent[y]
    return total


def pairwise_distances(taxonomy: Taxonomy, weights: WeightTable,
                       nodes: Sequence[str] | None = None) -> np.ndarray:
    """Distance matrix over ``nodes`` (default: all nodes in breadth-first order)."""
    nodes = list(taxonomy) if nodes is None else list(nodes)
    out = np.zeros((len(nodes), len(nodes)), dtype=np.int64)
    for i, x in enumerate(nodes):
        for j in range(i + 1, len(nodes)):
            out[i, j] = out[j, i] = node_distance(taxonomy, weights, x, nodes[j])
    return out


@dataclass(frozen=True)
class MarginalityMap:
    per_element: tuple[tuple[str, int], ...]
    per_category: Mapping[str, int]
    counts: Mapping[str, int]
    weight_mode: WeightMode
    weights: WeightTable = field(repr=False)

    @property
    def values(self) -> list[int]:
        return [m for _, m in self.per_element]

    @property
    def n(self) -> int:
        return len(self.per_element)


def _finish(sample, per_category, counts, mode, weights) -> MarginalityMap:
    per_element = tuple((v, per_category[v]) for v in sample)
    return MarginalityMap(per_element, dict(sorted(per_category.items())),
                          dict(sorted(counts.items())), mode, weights)


def marginality_vector(taxonomy: Taxonomy, sample: Sequence[str],
                       mode: WeightMode | str = WeightMode.FIXED) -> MarginalityMap:
    """Marginality of every sample element, from aggregated subtree counts.

    With ``W(v) = 2**(L - depth(v))`` the distance is
    ``d(x, y) = 2 W(lca) - W(x) - W(y)``, and summing ``W(lca(x, y))`` over the
    sample telescopes to ``n W(root) - sum(W(a) cnt(a))`` along the root path
    of ``x`` (root excluded), where ``cnt(a)`` counts sample elements under
    ``a``. One bottom-up pass fills ``cnt``, one top-down pass the path sums.
    """
    mode = WeightMode.parse(mode)
    pruned = prune_to_sample(taxonomy, sample)
    weights = (WeightTable(max(1, taxonomy.height)) if mode is WeightMode.FIXED
               else WeightTable(max(1, pruned.height)))
    tree = pruned.tree
    order = list(tree)
    depth, parent = tree.depth_map, tree.parent_map
    W = {v: weights.node_weight(depth[v]) for v in order}

    cnt = {v: pruned.occupancy.get(v, 0) for v in order}
    for v in reversed(order[1:]):
        cnt[parent[v]] += cnt[v]

    root = tree.root
    path_sum = {root: 0}
    for v in order[1:]:
        path_sum[v] = path_sum[parent[v]] + W[v] * cnt[v]

    n = cnt[root]
    total_w = sum(W[v] * k for v, k in pruned.occupancy.items())
    per_category = {}
    for v in pruned.occupancy:
        lca_sum = n * W[root] - path_sum[v]
        per_category[v] = 2 * lca_sum - n * W[v] - total_w
    return _finish(sample, per_category, pruned.occupancy, mode, weights)


def marginality_naive_oracle(taxonomy: Taxonomy, sample: Sequence[str],
                             mode: WeightMode | str = WeightMode.FIXED) -> MarginalityMap:
    """Reference implementation: explicit double loop over sample elements."""
    mode = WeightMode.parse(mode)
    if len(sample) == 0:
        raise EmptySample("sample is empty")
    for v in sample:
        taxonomy.check(v)
    if mode is WeightMode.FIXED:
        weights = WeightTable(max(1, taxonomy.height))
    else:
        weights = WeightTable(max(1, max(taxonomy.depth(v) for v in sample)))

    m = [0] * len(sample)
    for j, xj in enumerate(sample):
        for l, xl in enumerate(sample):
            if l != j:
                m[j] += path_distance(taxonomy, weights, xj, xl)

    per_category = {}
    for v, mj in zip(sample, m):
        per_category.setdefault(v, mj)
    return _finish(sample, per_category, Counter(sample), mode, weights)
