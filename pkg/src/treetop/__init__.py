"""Topological entropy of hom Markov tree-shifts.

Compares the tree entropy h(T_A) of the hom tree-shift defined by a 0/1
matrix A with the line entropy h(X_A) = log rho(A): exact and log-domain
block counts, brute-force oracles, higher-block recoding, and certified
lower bounds in the strict case M > m.
"""

from ._accel import backend_name
from .analysis import (
    certified_lower_bound,
    component_comparison,
    entropy_gap_classify,
    epsilon_range,
    equality_verdict,
    gamma_chain_check,
    gap_set,
    holder_C,
    pigeonhole_ratio_index,
    window_constant,
)
from .core import (
    TransitionMatrix,
    TreeParams,
    essential_reduce,
    format_matrix,
    is_irreducible,
    parse_matrix,
    row_sum_stats,
    spectral_data,
    strongly_connected_components,
)
from .counting import (
    block_count_exact,
    block_count_log,
    delta_size,
    entropy_report,
    line_entropy,
    tree_entropy_sequence,
)
from .errors import (
    BudgetExceeded,
    CertificationUnavailable,
    ConvergenceError,
    DomainError,
    NotApplicable,
    ParseError,
    TreetopError,
)
from .oracle import enumerate_line_words, enumerate_tree_blocks, verify_recursion
from .recode import (
    SSEWitness,
    forbidden_words_to_markov,
    higher_block_inequalities_check,
    higher_block_markov,
    sse_witness_check,
)

__version__ = "0.1.0"
