"""Grid-defined hereditary graph classes and their width machinery."""

from .deltaspec import (BondSource, DeltaSpec, KFactor, WordSource, alpha_plus,
                        classify, extract_k_factor, factors_equal,
                        find_next_occurrence, letter_at, load_spec, parse_spec,
                        serialize_spec)
from .grid import (BondGraph, GridGraph, GridVertex, TwoRowGraph, adjacent,
                   build_bond_graph, build_induced, build_rectangle,
                   build_two_row, contains_induced)
from .params import (ParamCurve, SimilarityPartition, check_m_le_n_plus_1,
                     check_refinement, m_beta, mu, n_delta, n_delta_star,
                     similarity_partition)

__all__ = [
    "BondGraph", "BondSource", "DeltaSpec", "GridGraph", "GridVertex",
    "KFactor", "ParamCurve", "SimilarityPartition", "TwoRowGraph",
    "WordSource", "adjacent", "alpha_plus", "build_bond_graph",
    "build_induced", "build_rectangle", "build_two_row", "check_m_le_n_plus_1",
    "check_refinement", "classify", "contains_induced", "extract_k_factor",
    "factors_equal", "find_next_occurrence", "letter_at", "load_spec", "m_beta",
    "mu", "n_delta", "n_delta_star", "parse_spec", "serialize_spec",
    "similarity_partition",
]
