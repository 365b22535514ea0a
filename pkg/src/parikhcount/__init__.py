"""Exact counting of words with a given Parikh image, and cost-chain probabilities."""

from .automata import Cfg, Dfa, Nfa, ParikhVector, accepts, augment_well_formed, determinize, parikh
from .costchain import (
    And, Atom, CostChain, Not, Or, bitcost, contract_zero_cost, cost_decide, cost_prob,
    expected_cost, quantile, validate,
)
from .counting import bitp, count, count_dfa, count_nfa, count_cfg, enumerate_flows, pic
from .errors import ConsistencyError, InputError, ParikhError, SizeGuardError, StructuralError, UnboundedError
from .multigraph import WeightedMultigraph, brute_euler_count, count_paths, euler_count, spanning_tree_count

__version__ = "0.1.0"
