"""Category hierarchies: parsing, validation, ancestry queries and pruning.

A taxonomy file is a two-column edge list::

    child,parent
    A,root
    B,root
    a1,A
    a2,A

The root is the single identifier that appears as a parent but never as a
child. Identifiers are case-sensitive and ordered by code point, which is the
same order as UTF-8 byte order.
"""

from __future__ import annotations

import hashlib
from collections import Counter, deque
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import (
    CycleDetected,
    DepthExceedsBound,
    DuplicateChildDefinition,
    EmptyDocument,
    EmptySample,
    MalformedTaxonomy,
    MultipleRoots,
    NoRoot,
    UnknownCategory,
)

HEADER = "child,parent"
#: Largest allowed height; keeps 2**(L-1) edge weights inside 64-bit integers.
MAX_DEPTH = 62


class Taxonomy:
    """Immutable rooted tree of categories.

    Build one with :func:`parse_taxonomy` or :meth:`Taxonomy.from_edges`.
    ``height`` is the depth of the deepest node (the root has depth 0) and
    ``max_children`` the largest fan-out of any node.
    """

    __slots__ = ("_parent", "_children", "_depth", "_root", "_order", "height", "max_children")

    def __init__(self, parent: Mapping[str, str], root: str):
        # `parent` must already be validated as a tree rooted at `root`.
        children: dict[str, list[str]] = {root: []}
        for child, par in parent.items():
            children.setdefault(par, []).append(child)
            children.setdefault(child, [])
        self._root = root
        self._parent = MappingProxyType(dict(parent))
        self._children = MappingProxyType({k: tuple(sorted(v)) for k, v in children.items()})

        depth = {root: 0}
        order = [root]
        queue = deque([root])
        while queue:
            node = queue.popleft()
            for c in self._children[node]:
                depth[c] = depth[node] + 1
                order.append(c)
                queue.append(c)
        self._depth = MappingProxyType(depth)
        self._order = tuple(order)
        self.height = max(depth.values())
        self.max_children = max(len(c) for c in self._children.values())

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[str, str]]) -> "Taxonomy":
        """Validate ``(child, parent)`` pairs and build a taxonomy."""
        parent: dict[str, str] = {}
        for child, par in edges:
            if child in parent:
                raise DuplicateChildDefinition(
                    f"category {child!r} has two parents: {parent[child]!r} and {par!r}"
                )
            parent[child] = par
        if not parent:
            raise EmptyDocument("taxonomy has no edges")

        _check_acyclic(parent)
        roots = sorted({p for p in parent.values() if p not in parent})
        if not roots:
            raise NoRoot("no category appears only as a parent")
        if len(roots) > 1:
            raise MultipleRoots(f"taxonomy has {len(roots)} roots: {', '.join(roots[:5])}")
        tax = cls(parent, roots[0])
        if tax.height > MAX_DEPTH:
            raise DepthExceedsBound(f"taxonomy depth {tax.height} exceeds {MAX_DEPTH}")
        return tax

    @property
    def root(self) -> str:
        return self._root

    @property
    def nodes(self) -> frozenset[str]:
        return frozenset(self._depth)

    def __len__(self) -> int:
        return len(self._depth)

    def __contains__(self, category: object) -> bool:
        return category in self._depth

    def __iter__(self):
        """Nodes in breadth-first order, siblings sorted."""
        return iter(self._order)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Taxonomy):
            return NotImplemented
        return self._root == other._root and dict(self._parent) == dict(other._parent)

    def __hash__(self) -> int:
        return hash((self._root, frozenset(self._parent.items())))

    def __repr__(self) -> str:
        return f"Taxonomy(root={self._root!r}, nodes={len(self)}, height={self.height}, max_children={self.max_children})"

    def check(self, category: str) -> str:
        if category not in self._depth:
            raise UnknownCategory(category)
        return category

    def parent(self, category: str) -> str | None:
        self.check(category)
        return self._parent.get(category)

    def children(self, category: str) -> tuple[str, ...]:
        self.check(category)
        return self._children[category]

    def depth(self, category: str) -> int:
        try:
            return self._depth[category]
        except KeyError:
            raise UnknownCategory(category) from None

    @property
    def parent_map(self) -> Mapping[str, str]:
        return self._parent

    @property
    def depth_map(self) -> Mapping[str, int]:
        return self._depth

    def path_from_root(self, category: str) -> list[str]:
        """Nodes from the root down to ``category`` inclusive."""
        self.check(category)
        path = [category]
        while path[-1] != self._root:
            path.append(self._parent[path[-1]])
        path.reverse()
        return path

    def is_ancestor(self, ancestor: str, node: str) -> bool:
        """True when ``ancestor`` lies on the root path of ``node`` (a node is its own ancestor)."""
        da, dn = self.depth(ancestor), self.depth(node)
        while dn > da:
            node = self._parent[node]
            dn -= 1
        return node == ancestor

    def descendants(self, category: str) -> list[str]:
        """All nodes strictly below ``category``."""
        out = []
        stack = list(self.children(category))
        while stack:
            node = stack.pop()
            out.append(node)
            stack.extend(self._children[node])
        return out

    def lca(self, x: str, y: str) -> str:
        """Deepest common ancestor of ``x`` and ``y``."""
        dx, dy = self.depth(x), self.depth(y)
        parent = self._parent
        while dx > dy:
            x = parent[x]
            dx -= 1
        while dy > dx:
            y = parent[y]
            dy -= 1
        while x != y:
            x = parent[x]
            y = parent[y]
        return x

    def edges(self) -> list[tuple[str, str]]:
        """``(child, parent)`` pairs grouped by parent in breadth-first order."""
        return [(c, node) for node in self._order for c in self._children[node]]

    def serialize(self) -> str:
        lines = [HEADER]
        lines.extend(f"{c},{p}" for c, p in self.edges())
        return "\n".join(lines) + "\n"

    def checksum(self) -> str:
        """SHA-256 of the canonical serialization."""
        return hashlib.sha256(self.serialize().encode("utf-8")).hexdigest()


def _check_acyclic(parent: Mapping[str, str]) -> None:
    # 0 = unvisited, 1 = on current chain, 2 = known to reach a root
    state: dict[str, int] = {}
    for start in parent:
        chain = []
        node = start
        while node in parent and state.get(node, 0) == 0:
            state[node] = 1
            chain.append(node)
            node = parent[node]
        if state.get(node) == 1:
            cycle = chain[chain.index(node):] + [node]
            raise CycleDetected("cycle: " + " -> ".join(cycle))
        for n in chain:
            state[n] = 2


def parse_taxonomy(document: str) -> Taxonomy:
    """Parse an edge-list document into a validated :class:`Taxonomy`."""
    lines = document.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines or not lines[0].strip():
        raise EmptyDocument("taxonomy document is empty")
    if lines[0].strip().lstrip("﻿") != HEADER:
        raise MalformedTaxonomy(f"expected header {HEADER!r}, got {lines[0]!r}")
    edges = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise MalformedTaxonomy(f"line {lineno}: expected 'child,parent', got {line!r}")
        edges.append((parts[0], parts[1]))
    return Taxonomy.from_edges(edges)


def load_taxonomy(path) -> Taxonomy:
    with open(path, encoding="utf-8") as fh:
        return parse_taxonomy(fh.read())


@dataclass(frozen=True)
class PrunedTree:
    """A taxonomy restricted to the root paths of a sample.

    ``tree`` is the restricted hierarchy, ``source`` the full one it came from
    and ``occupancy`` the multiplicity of every sampled category.
    """

    source: Taxonomy
    tree: Taxonomy
    occupancy: Mapping[str, int]

    @property
    def height(self) -> int:
        return self.tree.height

    @property
    def n(self) -> int:
        return sum(self.occupancy.values())


def prune_to_sample(taxonomy: Taxonomy, sample: Sequence[str]) -> PrunedTree:
    if len(sample) == 0:
        raise EmptySample("sample is empty")
    occupancy = Counter()
    for value in sample:
        taxonomy.check(value)
        occupancy[value] += 1

    parent_map = taxonomy.parent_map
    kept: dict[str, str] = {}
    for value in occupancy:
        node = value
        while node != taxonomy.root and node not in kept:
            kept[node] = parent_map[node]
            node = parent_map[node]
    tree = Taxonomy(kept, taxonomy.root)
    return PrunedTree(taxonomy, tree, MappingProxyType(dict(occupancy)))
