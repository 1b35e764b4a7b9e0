"""Numerical mapping of hierarchical nominal attributes by marginality."""

from .anonymize import anonymize, mdav_group, replace_with_centroids
from .dataset import (
    Attribute,
    Kind,
    MappingTable,
    MicrodataTable,
    Schema,
    export_mapping,
    invert_mapping,
    load_schema,
    load_table,
    parse_schema,
)
from .distance import build_context, distance_matrix, sse_distance, two_point_variance
from .labeling import assign_labels, hierarchical_variance, variance_order_agreement
from .marginality import (
    WeightMode,
    WeightTable,
    marginality_naive_oracle,
    marginality_vector,
    node_distance,
)
from .stats import covariance_matrix, covariance_nominal, mean_nominal, variance_nominal
from .taxonomy import PrunedTree, Taxonomy, load_taxonomy, parse_taxonomy, prune_to_sample

__version__ = "0.1.0"
