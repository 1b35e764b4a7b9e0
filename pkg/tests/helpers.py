"""Random taxonomies and tables shared by the test modules."""

import random
import string
from pathlib import Path

from margmap.dataset import Attribute, Kind, MicrodataTable, Schema
from margmap.taxonomy import Taxonomy, parse_taxonomy

DATA = Path(__file__).parent / "data"
EX1_TEXT = "child,parent\nA,root\nB,root\na1,A\na2,A\n"


def ex1() -> Taxonomy:
    return parse_taxonomy(EX1_TEXT)


def random_taxonomy(rng: random.Random, max_nodes: int = 100, max_depth: int = 8,
                    min_nodes: int = 2) -> Taxonomy:
    """Random rooted tree; every new node hangs under a uniformly chosen node of allowed depth."""
    size = rng.randint(min_nodes, max_nodes)
    names = rng.sample(range(10 * size), size)
    label = lambda i: rng.choice(string.ascii_letters) + str(names[i])
    ids = [label(i) for i in range(size)]
    depth = {ids[0]: 0}
    edges = []
    for node in ids[1:]:
        parent = rng.choice([v for v, d in depth.items() if d < max_depth])
        depth[node] = depth[parent] + 1
        edges.append((node, parent))
    return Taxonomy.from_edges(edges)


def full_tree(branching: int, height: int) -> Taxonomy:
    edges = []
    level = ["r"]
    for _ in range(height):
        nxt = []
        for p in level:
            for i in range(branching):
                c = f"{p}{i}"
                edges.append((c, p))
                nxt.append(c)
        level = nxt
    return Taxonomy.from_edges(edges)


def random_sample(rng: random.Random, taxonomy: Taxonomy, max_n: int = 50) -> list:
    nodes = sorted(taxonomy.nodes)
    return [rng.choice(nodes) for _ in range(rng.randint(1, max_n))]


def random_table(rng: random.Random, n_rows: int = 30, max_attrs: int = 5) -> MicrodataTable:
    """Mixed-type table with no constant column."""
    attrs = []
    for j in range(rng.randint(1, max_attrs)):
        kind = rng.choice(list(Kind))
        if kind is Kind.NOMINAL:
            attrs.append(Attribute(f"c{j}", kind, taxonomy=random_taxonomy(rng, 30, 5)))
        elif kind is Kind.ORDINAL:
            attrs.append(Attribute(f"c{j}", kind, order=tuple(f"o{i}" for i in range(rng.randint(2, 6)))))
        else:
            attrs.append(Attribute(f"c{j}", kind))
    schema = Schema(tuple(attrs))
    while True:
        rows = tuple(random_record(rng, schema) for _ in range(n_rows))
        table = MicrodataTable(schema, rows)
        if all(len(set(table.column(j))) > 1 for j in range(len(schema))):
            return table


def random_record(rng: random.Random, schema: Schema) -> tuple:
    out = []
    for a in schema.attributes:
        if a.kind is Kind.NOMINAL:
            out.append(rng.choice(sorted(a.taxonomy.nodes)))
        elif a.kind is Kind.ORDINAL:
            out.append(rng.randrange(len(a.order)))
        else:
            out.append(round(rng.uniform(-100, 100), rng.choice([0, 2, 6])))
    return tuple(out)
