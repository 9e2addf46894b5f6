"""Exact separation of subtour elimination constraints for cycle problems,
with graph shrinking, dynamic Hong and Gomory-Hu based separators."""

from .cutgen import CutGenPolicy, generate_cuts
from .errors import ConfigError, CycsecError, DomainError, InputError, ParseError
from .gomoryhu import GHTree, build_gh_tree, verify_gh_tree
from .graph import SEC, FractionalPoint, SupportGraph, cut_value, sec_slack, validate_point
from .instance import SyntheticParams, generate_synthetic, load_instance, parse_instance, save_instance, write_instance
from .maxflow import CutResult, st_min_cut
from .oracle import OracleResult, best_endpoint_slack, oracle_enumerate, oracle_pairwise
from .repository import QRepository
from .separation import Algorithm, SeparationStats, epg_pair_scan, separate
from .shrink import ShrinkRule, Strategy, run_strategy

__version__ = "0.1.0"

__all__ = [
    "Algorithm",
    "ConfigError",
    "CutGenPolicy",
    "CutResult",
    "CycsecError",
    "DomainError",
    "FractionalPoint",
    "GHTree",
    "InputError",
    "OracleResult",
    "ParseError",
    "QRepository",
    "SEC",
    "SeparationStats",
    "ShrinkRule",
    "Strategy",
    "SupportGraph",
    "SyntheticParams",
    "best_endpoint_slack",
    "build_gh_tree",
    "cut_value",
    "epg_pair_scan",
    "generate_cuts",
    "generate_synthetic",
    "load_instance",
    "oracle_enumerate",
    "oracle_pairwise",
    "parse_instance",
    "run_strategy",
    "save_instance",
    "sec_slack",
    "separate",
    "st_min_cut",
    "validate_point",
    "verify_gh_tree",
    "write_instance",
]
