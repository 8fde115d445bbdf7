"""Minimum-size regret sets under all linear ranking functions.

Exact solver in two dimensions (shortest cycle over candidate arcs), a
dominance-graph heuristic for any dimension, sampled and exact regret
evaluators, and a brute-force oracle for small inputs.
"""

from .errors import ConditionOneError, ConfigError, GrmrError, TimeoutExceeded
from .geometry import Dataset, check_interior_origin, normalize_dataset, read_csv, write_csv
from .extremes import ExtremeSet, extreme_points, extreme_points_2d, extreme_points_hd, load_extremes
from .regret import RegretReport, estimate_max_regret, exact_max_regret, regret_ratio
from .egrmr import egrmr, dual_min_regret_2d
from .ipdg import IpdgGraph, empty_ipdg, ipdg_approx, ipdg_exact_2d
from .hgrmr import DomGraph, build_dom_graph, dominance_weight, dual_min_regret, greedy_dominating_set, hgrmr, hgrmr_reuse
from .oracle import OracleResult, brute_force_grmr
from .datasets import generate

__version__ = "0.1.0"
