"""Zero-error coding for deterministic two-user interference channels with erasures."""

__version__ = "0.1.0"

from .channel import (ERASURE, PHI, Channel, builtin, butterfly, minmax, read_channel,
                      sample_erasure_identity, write_channel)
from .coding import (Code, CodebookPair, RatePoint, exact_zero_error_sum_rate, is_zero_error,
                     success_probability, time_share)
from .bpis import (Bpis, ConflictGraph, bpis_bound_trial, build_conflict_graph, max_bpis,
                   max_bpis_blocklength, max_bpis_direct)
from .uniform import (binary_uniform_pair, is_diverse_pair, is_gamma_uniform_pair,
                      is_gamma_uniform_sets, staircase_uniform_pair, uniform_pair)
from .codegen import build_zero_error_code, greedy_pack, verify_zero_error_against
from .errors import BudgetExceeded, ConstructionError, DomainError
