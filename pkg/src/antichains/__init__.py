"""Exact antichain counting on graded posets and [t]^n, with directed-rounding upper bounds."""
from .bounds import (BoundReport, FEvaluator, Section4Params, closed_form_bounds, f_P,
                     f_P_interval, lemma35_check, minimal_empirical_C, section4_diagnostics,
                     thm31_rhs)
from .chains import (BracketConfig, ChainDecomposition, bracket_config, chain_class, decompose,
                     verify_decomposition)
from .counting import (BipartiteGraph, CountCache, WeightAssignment, count_antichains_dp,
                       count_antichains_oracle, grid_alpha, independence_poly,
                       weighted_antichain_sum)
from .poset import (INFINITY, LeveledPoset, Point, PosetFormatError, PosetSizeError,
                    SubposetSpec, build_grid, count_low_points, dump_poset, is_low, load_poset,
                    middle_layer_size, min_neighbor_updegree, neighbors_in_level, subposet)
from .rounding import Interval, UpperReal

__version__ = "0.1.0"
