"""Exact desk-scale workbench for unambiguous automata, conical-junta LPs,
and communication-matrix measures."""

from .boolfn import (
    CnfFormula,
    Conjunction,
    DnfFormula,
    RealTable,
    TruthTable,
    WidthBound,
    c0_width,
    c1_width,
    eval_dnf,
    is_unambiguous_dnf,
    or_compose_fn,
    uc1_width,
)
from .junta import (
    ConicalJunta,
    DualCertificate,
    LpResult,
    approx_nonneg_degree_lp,
    eval_junta,
    junta_from_unambiguous_dnf,
    or_shift_junta,
    power_junta,
    tensor_certificate,
    verify_dual_certificate,
)
from .automata import (
    FiniteLanguageView,
    Nfa,
    NfaBuilder,
    accepts,
    build_padded_pair,
    disjoint_union,
    dnf_to_ufa,
    enumerate_language,
    fixed_length_complement,
    is_unambiguous_nfa,
    nfa_to_cover,
    product_intersect,
    ufa_to_partition,
)
from .commx import (
    CommMatrix,
    CoverResult,
    NonnegFactorization,
    NonnegRankWindow,
    Rectangle,
    approx_nonneg_rank_upper,
    approx_or_matrix,
    cover_number,
    matrix_of_language,
    nonneg_rank_bounds,
    or_matrix,
    partition_number,
    rational_rank,
)
from .lifting import (
    ComposedFunction,
    Gadget,
    compose_dnf,
    compose_function,
    inner_product_gadget,
    tree_to_unambiguous_dnfs,
)
from .disj import (
    SeparatingFamily,
    SetPair,
    build_complement_nfa,
    build_disj_nfa,
    disj_matrix,
    encode_pair,
    sample_separating_sets,
    ufa_size_lower_bound,
)
from .errors import ParseError, PreconditionError, ResourceLimitError, WorkbenchError

__version__ = "0.1.0"
