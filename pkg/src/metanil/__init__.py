"""Exact computation in free metabelian nilpotent groups of finite rank.

Words, collected canonical forms, a truncated matrix oracle for equality,
the generalized-inner automorphism calculus, and the decision procedure for
normality of automorphisms, plus a CLI front end (``metanil``).
"""

from .words import (
    DomainError,
    GroupParams,
    ParseError,
    Word,
    parse_word,
    retract,
)
from .core import (
    Element,
    all_basics,
    collect,
    collect_text,
    commutator,
    element_from_json,
    element_to_json,
    enumerate_basics,
    equals,
    gamma_layer,
    gen_element,
    identity,
    inverse,
    is_identity,
    left_normed,
    left_normed_rep,
    mul,
    normalize_left_normed,
    power,
    reduce_class,
)
from .magnus import (
    MagnusMatrix,
    TruncPoly,
    kernel_selfcheck,
    magnus_of_word,
    oracle_equal,
)
from .autos import (
    AutoSpec,
    GenInnerData,
    NestedGenInnerData,
    PolyAutoData,
    apply_endo,
    apply_gen_inner,
    apply_nested,
    apply_poly_auto,
    aut_commutator,
    class2_conjugator,
    compose_endo,
    compose_gen_inner,
    epsilon_sum,
    flatten,
    gen_inner_from_json,
    gen_inner_to_json,
    gen_inner_to_spec,
    identity_spec,
    invert_gen_inner,
    invert_ia,
    is_ia,
    is_inner,
    spec_from_json,
    spec_to_json,
)
from .intsolve import (
    InfeasibilityCertificate,
    integer_solve,
    integer_solve_explain,
    smith_normal_form,
)
from .normality import (
    NotGeneralizedInner,
    closure_membership,
    delta_basis_rewrite,
    delta_min,
    delta_rewrite_injective,
    delta_shift,
    enumerate_deltas,
    eval_delta_comm,
    normal_closure_top_generators,
    poly_to_gen_inner,
    synthesize_gen_inner,
)

__version__ = "0.1.0"
