"""countqe: counting-quantifier elimination for linear integer arithmetic.

The library turns formulas of the form "the number of values of x satisfying
a semilinear membership condition equals y" into ordinary quantifier logic
over the remaining variables, and ships a bounded brute-force counting
oracle to verify every elimination.
"""

from .elim import (
    BoundClassification,
    ComponentReport,
    EliminationReport,
    EliminationResult,
    PermutationBranch,
    ResidueCase,
    build_permutation_branches,
    build_residue_cases,
    classify_bounds,
    count_in_progression,
    eliminate,
    eliminate_simple,
    estimate_result_nodes,
    is_subtraction_free,
    normalize_for_nat,
    progression_count_formula,
    progression_count_formula_nat,
    residue_case_feasible,
)
from .errors import (
    ContractError,
    ConventionError,
    CountQEError,
    DegenerateInputError,
    DimensionError,
    ParameterError,
    SingularMatrixError,
    UnboundVariableError,
    UnsupportedPresentationError,
)
from .formula import (
    And,
    Cong,
    CountEq,
    CountResult,
    Eq,
    Exists,
    Forall,
    Formula,
    FreshNames,
    Le,
    Lt,
    Not,
    Or,
    Term,
    TRUE,
    FALSE,
    conj,
    constant,
    count_witnesses,
    disj,
    evaluate,
    free_vars,
    implies,
    node_count,
    simplify,
    substitute,
    variable,
)
from .linalg import (
    CramerSolution,
    IntMatrix,
    RowSelection,
    cramer_solve,
    determinant,
    find_full_rank_submatrix,
    positive_lcm,
    rank_over_rationals,
)
from .sets import (
    DomainTag,
    IntBox,
    LinearSetPresentation,
    SemilinearPresentation,
    check_disjoint_in_box,
    check_simple,
    enumerate_in_box,
    membership,
    membership_formula,
)
from .textio import (
    ParseError,
    SourceSpan,
    parse_formula,
    parse_presentation,
    print_formula,
    print_presentation,
)
from .verify import (
    CheckOutcome,
    PinnedEvaluationError,
    TrialRecord,
    WitnessCount,
    count_set_witnesses,
    evaluate_pinned,
    formula_count_values,
    run_check,
)

__version__ = "0.1.0"
