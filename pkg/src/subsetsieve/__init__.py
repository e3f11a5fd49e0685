"""subsetsieve: exact counting and verification of polynomial subset sums
over Z_n, F_q, and finite abelian groups."""

from .algebra import (
    Character,
    DomainSpec,
    Fq,
    GroupSpec,
    PolySpec,
    Zn,
    build_field,
    char_eval,
    char_order,
    eval_poly,
    partial_char_sum,
    ramanujan_sum_exact_order,
    trace,
)
from .bounds import (
    BoundReport,
    ConstantChoice,
    applicability_fq,
    applicability_zn,
    bound_abelian,
    bound_fq,
    bound_zn,
    check_hua,
    check_weil,
    verify_theorem,
)
from .counting import (
    BudgetError,
    CountQuery,
    CountResult,
    CrossCheckError,
    ResidualError,
    count,
    count_bruteforce,
    count_charsum,
    count_closed_form,
    count_dp,
)
from .numtheory import (
    CycleType,
    RealBound,
    binomial_real,
    class_size,
    cycle_index_eval,
    cycle_types,
    delta,
    falling_factorial,
    moebius,
    series_coeff,
    sign_of_type,
)

__version__ = "0.1.0"
