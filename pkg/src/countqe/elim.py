"""Elimination of the counting quantifier over semilinear presentations.

Given a disjoint union of simple linear sets and a designated counted
coordinate (always the last), this module constructs an ordinary
quantifier-logic formula over the remaining coordinates plus one count
variable that holds exactly when the count variable equals the number of
values the counted coordinate can take inside the set.

The construction works per component.  When some full-rank row subsystem of
the period matrix avoids the counted row, the counted coordinate is a
function of the others and the witness count is 0 or 1.  Otherwise the
component reduces to a square core: Cramer data expresses the period
coefficients as integer linear forms over the coordinates divided by the
determinant's absolute value, integrality becomes a finite split over
residue classes, nonnegativity becomes interval bounds on the counted
coordinate, and the number of lattice points of a residue class inside an
interval is definable once the interval endpoints are case-split by their
own residues.  Components combine by summing per-component count variables.

Over the naturals the same construction runs with every emitted atom kept
subtraction-free (nonnegative coefficients and constants on both sides).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import lcm
from typing import Callable, Optional, Sequence

from . import formula as fm
from .errors import (
    ContractError,
    ConventionError,
    ParameterError,
    UnsupportedPresentationError,
)
from .formula import (
    Cong,
    Eq,
    Exists,
    Formula,
    FreshNames,
    Le,
    Lt,
    Term,
    conj,
    constant,
    disj,
    negate,
    variable,
)
from .linalg import (
    CramerSolution,
    IntMatrix,
    cramer_solve,
    find_full_rank_submatrix,
    greedy_row_basis,
    positive_lcm,
    solve_unique,
)
from .sets import (
    DomainTag,
    LinearSetPresentation,
    SemilinearPresentation,
    check_simple,
    coordinate_names,
    membership_formula,
)


# --- counting points of a residue class in an interval ----------------------


def count_in_progression(lo: int, hi: int, residue: int, modulus: int) -> int:
    """Number of integers t in [lo, hi] with t = residue (mod modulus)."""
    if modulus < 1:
        raise ParameterError("modulus must be positive")
    if hi < lo:
        return 0
    r = residue % modulus
    return (hi - r) // modulus - (lo - 1 - r) // modulus


def _progression_case_constants(step: int, target: int):
    """Endpoint-residue corrections for the closed-form progression count.

    For lo = i (mod step) and hi = j (mod step) the count of
    t = target (mod step) in a nonempty [lo, hi] satisfies
    ``step * count = hi - lo + c(i, j)``; this yields c for each (i, j).
    """
    for i in range(step):
        start_floor = 0 if i > target else -1  # floor((i - 1 - target) / step)
        for j in range(step):
            end_floor = 0 if j >= target else -1  # floor((j - target) / step)
            yield i, j, i - j + step * (end_floor - start_floor)


def progression_count_formula(
    coeff: int,
    residue: int,
    modulus: int,
    lo: Term,
    hi: Term,
    count_var: str,
) -> Formula:
    """Formula binding ``count_var`` to a scaled progression count.

    True at an assignment exactly when the count variable equals the number
    of integers x with ``lo <= coeff*x <= hi`` and ``x = residue (mod
    modulus)``.  Scaling by ``coeff`` turns the condition into counting
    ``t = coeff*residue (mod coeff*modulus)`` inside [lo, hi], and the
    floor-division closed form becomes one linear equation per residue case
    of the endpoints.
    """
    if coeff < 1 or modulus < 1:
        raise ParameterError("coefficient and modulus must be positive")
    if not 0 <= residue < modulus:
        raise ParameterError("residue out of range")
    step = coeff * modulus
    target = (coeff * residue) % step
    u = variable(count_var)
    empty = conj([Lt(hi, lo), Eq(u, constant(0))])
    if step == 1:
        full = conj([Le(lo, hi), Eq(u, hi - lo + 1)])
        return disj([empty, full])
    by_lo_residue = []
    cases: dict[int, list[Formula]] = {}
    for i, j, c in _progression_case_constants(step, target):
        cases.setdefault(i, []).append(
            conj([Cong(hi, j, step), Eq(step * u, hi - lo + c)])
        )
    for i in sorted(cases):
        by_lo_residue.append(conj([Cong(lo, i, step), disj(cases[i])]))
    return disj([empty, conj([Le(lo, hi), disj(by_lo_residue)])])


def _shifted_congruence(pos: Term, neg: Term, residue: int, step: int) -> Formula:
    """Subtraction-free form of ``pos - neg = residue (mod step)``."""
    return Cong(pos + (step - 1) * neg, residue, step)


def progression_count_formula_nat(
    coeff: int,
    residue: int,
    modulus: int,
    low_bound: Term,
    low_shift: Term,
    high_shift: Term,
    high_bound: Term,
    count_var: str,
) -> Formula:
    """Subtraction-free counterpart over the naturals.

    Binds ``count_var`` to the number of x in N with
    ``low_bound <= coeff*x + low_shift``, ``high_shift + coeff*x <=
    high_bound`` and ``x = residue (mod modulus)``.  The four endpoint terms
    must be subtraction-free; every emitted atom is too.  The effective
    interval for ``coeff*x`` is [max(0, low_bound-low_shift),
    high_bound-high_shift], handled by a case split on which differences are
    nonnegative.
    """
    if coeff < 1 or modulus < 1:
        raise ParameterError("coefficient and modulus must be positive")
    if not 0 <= residue < modulus:
        raise ParameterError("residue out of range")
    step = coeff * modulus
    target = (coeff * residue) % step
    u = variable(count_var)
    y1, y2, z1, z2 = low_bound, low_shift, high_shift, high_bound
    upper_empty = conj([Lt(z2, z1), Eq(u, constant(0))])
    has_upper = Le(z1, z2)
    trivial_lower = Le(y1, y2)
    real_lower = Lt(y2, y1)
    interval_empty = Lt(y2 + z2, y1 + z1)
    interval_ok = Le(y1 + z1, y2 + z2)

    if step == 1:
        from_zero = conj([has_upper, trivial_lower, Eq(u + z1, z2 + 1)])
        shifted = conj(
            [has_upper, real_lower, interval_ok, Eq(u + z1 + y1, z2 + y2 + 1)]
        )
        empty_mid = conj([has_upper, real_lower, interval_empty, Eq(u, constant(0))])
        return disj([upper_empty, from_zero, shifted, empty_mid])

    # Counting from zero: only the upper endpoint's residue matters.
    zero_cases = []
    for j in range(step):
        bump = step if j >= target else 0
        zero_cases.append(
            conj(
                [
                    _shifted_congruence(z2, z1, j, step),
                    Eq(step * u + z1 + constant(j), z2 + bump),
                ]
            )
        )
    from_zero = conj([has_upper, trivial_lower, disj(zero_cases)])

    shifted_by_lo: dict[int, list[Formula]] = {}
    for i, j, c in _progression_case_constants(step, target):
        # The endpoint residues already appear explicitly in the equation, so
        # only the step-multiple part of the case constant remains.
        step_part = c - (i - j)
        rise = max(step_part, 0)
        drop = max(-step_part, 0)
        shifted_by_lo.setdefault(i, []).append(
            conj(
                [
                    _shifted_congruence(z2, z1, j, step),
                    Eq(step * u + z1 + y1 + constant(j + drop), z2 + y2 + i + rise),
                ]
            )
        )
    shifted_cases = [
        conj([_shifted_congruence(y1, y2, i, step), disj(shifted_by_lo[i])])
        for i in sorted(shifted_by_lo)
    ]
    shifted = conj([has_upper, real_lower, interval_ok, disj(shifted_cases)])
    empty_mid = conj([has_upper, real_lower, interval_empty, Eq(u, constant(0))])
    return disj([upper_empty, from_zero, shifted, empty_mid])


# --- classification of the Cramer rows ---------------------------------------


@dataclass(frozen=True)
class BoundClassification:
    """Partition of the Cramer rows by the sign of the counted coefficient.

    Rows whose counted-coordinate coefficient is negative yield upper bounds
    on ``multiplier * counted``, positive coefficients yield lower bounds,
    and zero coefficients contribute plain sign conditions.  ``scale`` maps
    a bounding row to the factor stretching its row form onto the common
    multiplier.  Row indices are 0-based.
    """

    multiplier: int
    row_terms: tuple[Term, ...]
    scale: dict
    upper_rows: tuple[int, ...]
    lower_rows: tuple[int, ...]
    sign_rows: tuple[int, ...]

    def bound_term(self, row: int) -> Term:
        return self.scale[row] * self.row_terms[row]


def classify_bounds(
    solution: CramerSolution, free_names: Sequence[str]
) -> BoundClassification:
    """Classify each solved coefficient row as an upper/lower/sign condition.

    ``free_names`` are the variable names of all but the last (counted)
    coordinate of the core system, in row order.
    """
    p = solution.size
    if len(free_names) != p - 1:
        raise ParameterError("free name list must cover all but the counted column")
    counted_col = [solution.matrix[i][p - 1] for i in range(p)]
    assert any(counted_col), "counted column of an invertible core cannot vanish"
    multiplier = positive_lcm(counted_col)
    row_terms = []
    scale = {}
    upper, lower, sign = [], [], []
    for i in range(p):
        coeffs = {
            free_names[j]: solution.matrix[i][j]
            for j in range(p - 1)
            if solution.matrix[i][j]
        }
        row_terms.append(Term(solution.offset[i], coeffs))
        lam = counted_col[i]
        if lam == 0:
            sign.append(i)
            continue
        eta = -(multiplier // lam)  # exact: multiplier is an lcm of the column
        scale[i] = eta
        if eta > 0:
            upper.append(i)
        else:
            lower.append(i)
    return BoundClassification(
        multiplier=multiplier,
        row_terms=tuple(row_terms),
        scale=scale,
        upper_rows=tuple(upper),
        lower_rows=tuple(lower),
        sign_rows=tuple(sign),
    )


# --- residue cases ------------------------------------------------------------


@dataclass(frozen=True)
class ResidueCase:
    """A residue assignment: one class per free coordinate plus one for the
    counted coordinate, all modulo the core determinant."""

    free_residues: tuple[int, ...]
    counted_residue: int


def build_residue_cases(denom: int, size: int) -> list[ResidueCase]:
    """All residue cases for a core of ``size`` coordinates, lexicographically."""
    if denom < 1 or size < 1:
        raise ParameterError("denominator and size must be positive")
    return [
        ResidueCase(free_residues=f, counted_residue=a)
        for f in itertools.product(range(denom), repeat=size - 1)
        for a in range(denom)
    ]


def residue_case_feasible(solution: CramerSolution, case: ResidueCase) -> bool:
    """True when every solved coefficient is integral on this residue class."""
    p = solution.size
    if len(case.free_residues) != p - 1:
        raise ParameterError("residue case does not match system size")
    d = solution.denom
    point = list(case.free_residues) + [case.counted_residue]
    return all(num % d == 0 for num in solution.numerators(point))


# --- permutation branches -----------------------------------------------------


@dataclass(frozen=True)
class PermutationBranch:
    """One ordering of the upper and lower bound families.

    The guard pins the order of the bound values (ties broken by row index,
    so the guards of all branches partition every valuation); under it the
    first entries carry the tightest bounds.
    """

    upper_order: tuple[int, ...]
    lower_order: tuple[int, ...]
    guard: Formula
    tightest_upper: Term
    tightest_lower: Term
    count_var: str


def _chain_atom(earlier: Term, later: Term, tie_ok: bool) -> Formula:
    # "earlier < later, ties broken by index" collapses to <= when the index
    # order already agrees.
    return Le(earlier, later) if tie_ok else Lt(earlier, later)


def build_permutation_branches(
    classification: BoundClassification,
    namer: Optional[Callable[[], str]] = None,
) -> list[PermutationBranch]:
    """All orderings of the bound families with tie-broken strict chains.

    Upper bounds are chained increasingly from the tightest, lower bounds
    decreasingly from the tightest.  Requires both families nonempty; the
    empty cases are handled by convention in the eliminator.
    """
    bc = classification
    if not bc.upper_rows or not bc.lower_rows:
        raise ConventionError("bound classification with an empty family")
    if namer is None:
        counter = itertools.count(1)
        namer = lambda: f"u{next(counter)}"
    branches = []
    for sigma in itertools.permutations(sorted(bc.upper_rows)):
        upper_chain = [
            _chain_atom(bc.bound_term(a), bc.bound_term(b), tie_ok=a < b)
            for a, b in zip(sigma, sigma[1:])
        ]
        for tau in itertools.permutations(sorted(bc.lower_rows)):
            lower_chain = [
                _chain_atom(bc.bound_term(b), bc.bound_term(a), tie_ok=b < a)
                for a, b in zip(tau, tau[1:])
            ]
            branches.append(
                PermutationBranch(
                    upper_order=sigma,
                    lower_order=tau,
                    guard=conj(upper_chain + lower_chain),
                    tightest_upper=bc.bound_term(sigma[0]),
                    tightest_lower=bc.bound_term(tau[0]),
                    count_var=namer(),
                )
            )
    return branches


# --- subtraction-free normalisation -------------------------------------------


def normalize_for_nat(f: Formula) -> Formula:
    """Rewrite a quantifier-free formula so every atom is subtraction-free.

    Each comparison moves its negative contributions to the other side, and
    congruence terms take their coefficients modulo the modulus; the result
    is equivalent over the naturals (and over the integers).
    """
    tf = type(f)
    if tf in (fm.TrueF, fm.FalseF):
        return f
    if tf in (Le, Lt, Eq):
        diff = f.lhs - f.rhs
        return tf(diff.positive_part(), diff.negative_part())
    if tf is Cong:
        m = f.modulus
        fixed = Term(
            f.term.constant % m, {n: c % m for n, c in f.term.coeffs.items()}
        )
        return Cong(fixed, f.residue, m)
    if tf is fm.Not:
        return fm.Not(normalize_for_nat(f.body))
    if tf in (fm.And, fm.Or):
        return tf(tuple(normalize_for_nat(p) for p in f.parts))
    raise ParameterError("normalisation applies to quantifier-free formulas only")


def is_subtraction_free(f: Formula) -> bool:
    """Structural check: every atom has nonnegative coefficients/constants."""

    def term_ok(t: Term) -> bool:
        return t.constant >= 0 and all(c >= 0 for c in t.coeffs.values())

    tf = type(f)
    if tf in (fm.TrueF, fm.FalseF):
        return True
    if tf in (Le, Lt, Eq):
        return term_ok(f.lhs) and term_ok(f.rhs)
    if tf is Cong:
        return term_ok(f.term)
    if tf is fm.Not:
        return is_subtraction_free(f.body)
    if tf in (fm.And, fm.Or):
        return all(is_subtraction_free(p) for p in f.parts)
    if tf in (Exists, fm.Forall):
        return is_subtraction_free(f.body)
    if tf is fm.CountEq:
        return is_subtraction_free(f.body)
    raise TypeError(f"not a formula: {f!r}")


# --- reports -------------------------------------------------------------------


@dataclass(frozen=True)
class ComponentReport:
    """Trace of one component's elimination.  Row and coefficient indices
    are reported 1-based."""

    index: int
    case: str  # "single-witness" or "interval-count"
    count_var: str
    denom: Optional[int]
    multiplier: Optional[int]
    selected_rows: tuple[int, ...]
    dropped_rows: tuple[int, ...]
    upper_rows: tuple[int, ...]
    lower_rows: tuple[int, ...]
    sign_rows: tuple[int, ...]
    residue_cases: int
    feasible_cases: int
    branches: int
    nodes: int


@dataclass(frozen=True)
class EliminationReport:
    count_var: str
    components: tuple[ComponentReport, ...]
    nodes: int


@dataclass(frozen=True)
class EliminationResult:
    formula: Formula
    count_var: str
    report: EliminationReport


# --- the eliminator -------------------------------------------------------------


def _close(prefix: Sequence[str], body: Formula) -> Formula:
    for var in reversed(prefix):
        body = Exists(var, body)
    return body


def _case_single(
    presentation: LinearSetPresentation,
    count_var: str,
    names: Sequence[str],
) -> tuple[list, Formula]:
    """Counted coordinate determined by the others: witness count is 0 or 1."""
    member = membership_formula(presentation, names)
    witness = Exists(names[-1], member)
    y = variable(count_var)
    body = disj(
        [
            conj([witness, Eq(y, constant(1))]),
            conj([negate(witness), Eq(y, constant(0))]),
        ]
    )
    return [], body


def _dropped_row_relation(
    matrix: IntMatrix,
    base: Sequence[int],
    names: Sequence[str],
    selected: Sequence[int],
    dropped: int,
) -> Formula:
    """Exact linear relation forcing a dropped coordinate.

    The dropped row of the period matrix is a rational combination of the
    selected rows, so the dropped coordinate satisfies the same combination
    of the selected coordinates (after shifting by the base); clearing
    denominators gives an integer equation.
    """
    system = [[matrix.row(s)[t] for s in selected] for t in range(matrix.cols)]
    rhs = list(matrix.row(dropped))
    combo = solve_unique(system, rhs)
    assert combo is not None, "dropped row must lie in the selected row span"
    den = lcm(1, *(c.denominator for c in combo))
    weights = [int(c * den) for c in combo]
    lhs = den * variable(names[dropped])
    rhs_const = den * base[dropped] - sum(
        w * base[s] for w, s in zip(weights, selected)
    )
    rhs_term = Term(rhs_const)
    for w, s in zip(weights, selected):
        rhs_term = rhs_term + w * variable(names[s])
    return Eq(lhs, rhs_term)


def _case_interval(
    presentation: LinearSetPresentation,
    count_var: str,
    names: Sequence[str],
    fresh: FreshNames,
) -> tuple[list, Formula, dict]:
    """The square-core construction for a component whose every full-rank
    row subsystem uses the counted row."""
    matrix = presentation.period_matrix()
    assert matrix is not None
    n, p = matrix.rows, matrix.cols
    nat = presentation.domain is DomainTag.N
    norm = normalize_for_nat if nat else (lambda f: f)

    selected_first = greedy_row_basis(matrix, n - 1)
    assert len(selected_first) == p - 1, "core reduction expects row rank p-1"
    core_rows = selected_first + [n - 1]
    dropped = [j for j in range(n - 1) if j not in set(selected_first)]
    relations = conj(
        [
            norm(_dropped_row_relation(matrix, presentation.base, names, selected_first, j))
            for j in dropped
        ]
    )

    core_matrix = matrix.select_rows(core_rows)
    core_offset = [presentation.base[i] for i in core_rows]
    solution = cramer_solve(core_matrix, core_offset)
    denom = solution.denom
    free_names = [names[i] for i in selected_first]
    bc = classify_bounds(solution, free_names)
    if nat:
        # Nonnegative periods make an all-nonpositive counted column of the
        # inverse impossible, so lower bounds always exist over the naturals.
        assert bc.lower_rows, "natural-domain core without lower bounds"

    cases = build_residue_cases(denom, p)
    feasible = [case for case in cases if residue_case_feasible(solution, case)]
    convention = not bc.upper_rows or not bc.lower_rows
    sign_atoms = [norm(Le(constant(0), bc.row_terms[i])) for i in bc.sign_rows]

    prefix: list[str] = []
    case_vars: list[str] = []
    case_formulas: list[Formula] = []
    branch_count = 0
    for case in feasible:
        congruences: list[Formula] = []
        if denom > 1:
            congruences = [
                Cong(variable(name), r, denom)
                for name, r in zip(free_names, case.free_residues)
            ]
        case_count = fresh.fresh("c")
        case_vars.append(case_count)
        if convention:
            # One bound family is empty: wherever this case's guard holds the
            # witness set is infinite, so no count value may satisfy it; where
            # the guard fails the case is empty and contributes zero.
            guard = conj(congruences + sign_atoms)
            case_formulas.append(conj([negate(guard), Eq(variable(case_count), constant(0))]))
            prefix.append(case_count)
            continue
        branches = build_permutation_branches(bc, namer=lambda: fresh.fresh("u"))
        branch_count = len(branches)
        branch_parts = []
        branch_sum = Term(0)
        for branch in branches:
            guard = conj(congruences + sign_atoms + [norm(branch.guard)])
            if nat:
                lower = branch.tightest_lower
                upper = branch.tightest_upper
                delta = progression_count_formula_nat(
                    bc.multiplier,
                    case.counted_residue,
                    denom,
                    lower.positive_part(),
                    lower.negative_part(),
                    upper.negative_part(),
                    upper.positive_part(),
                    branch.count_var,
                )
            else:
                delta = progression_count_formula(
                    bc.multiplier,
                    case.counted_residue,
                    denom,
                    branch.tightest_lower,
                    branch.tightest_upper,
                    branch.count_var,
                )
            branch_parts.append(
                disj(
                    [
                        conj([guard, delta]),
                        conj([negate(guard), Eq(variable(branch.count_var), constant(0))]),
                    ]
                )
            )
            prefix.append(branch.count_var)
            branch_sum = branch_sum + variable(branch.count_var)
        case_formulas.append(
            conj(branch_parts + [Eq(branch_sum, variable(case_count))])
        )
        prefix.append(case_count)

    total = Term(0)
    for cv in case_vars:
        total = total + variable(cv)
    nonneg = [Le(constant(0), variable(v)) for v in prefix]
    body = conj(nonneg + case_formulas + [Eq(total, variable(count_var))])
    if not isinstance(relations, fm.TrueF):
        body = disj(
            [
                conj([relations, body]),
                conj([negate(relations), Eq(variable(count_var), constant(0))]),
            ]
        )
    trace = {
        "denom": denom,
        "multiplier": bc.multiplier,
        "selected_rows": tuple(i + 1 for i in core_rows),
        "dropped_rows": tuple(i + 1 for i in dropped),
        "upper_rows": tuple(i + 1 for i in bc.upper_rows),
        "lower_rows": tuple(i + 1 for i in bc.lower_rows),
        "sign_rows": tuple(i + 1 for i in bc.sign_rows),
        "residue_cases": len(cases),
        "feasible_cases": len(feasible),
        "branches": branch_count,
    }
    return prefix, body, trace


def _component_parts(
    presentation: LinearSetPresentation,
    count_var: str,
    names: Sequence[str],
    fresh: FreshNames,
    index: int,
) -> tuple[list, Formula, ComponentReport]:
    if not check_simple(presentation):
        raise UnsupportedPresentationError(
            "elimination requires simple components (independent periods)"
        )
    matrix = presentation.period_matrix()
    single = matrix is None or find_full_rank_submatrix(
        matrix, forbidden_row=presentation.dimension - 1
    ) is not None
    if single:
        prefix, body = _case_single(presentation, count_var, names)
        trace = {
            "denom": None,
            "multiplier": None,
            "selected_rows": (),
            "dropped_rows": (),
            "upper_rows": (),
            "lower_rows": (),
            "sign_rows": (),
            "residue_cases": 0,
            "feasible_cases": 0,
            "branches": 0,
        }
        case_name = "single-witness"
    else:
        prefix, body, trace = _case_interval(presentation, count_var, names, fresh)
        case_name = "interval-count"
    report = ComponentReport(
        index=index,
        case=case_name,
        count_var=count_var,
        nodes=fm.node_count(body) + len(prefix),
        **trace,
    )
    return prefix, body, report


def eliminate_simple(
    presentation: LinearSetPresentation,
    count_var: str,
    domain: Optional[DomainTag] = None,
    var_names: Optional[Sequence[str]] = None,
    fresh: Optional[FreshNames] = None,
) -> EliminationResult:
    """Eliminate the counting quantifier over one simple component.

    The counted coordinate is the last one; the result formula's free
    variables are the remaining coordinate names plus ``count_var``, and it
    holds exactly when the count variable equals the number of values of the
    counted coordinate placing the point in the set (with the convention
    that an infinite witness set satisfies no count value).
    """
    if domain is not None and domain is not presentation.domain:
        raise ContractError(
            f"domain {domain.value} does not match presentation domain "
            f"{presentation.domain.value}"
        )
    names = (
        list(var_names) if var_names is not None else coordinate_names(presentation.dimension)
    )
    if len(names) != presentation.dimension:
        raise ContractError("variable name list does not match dimension")
    if count_var in names:
        raise ContractError("count variable clashes with a coordinate name")
    if fresh is None:
        fresh = FreshNames(set(names) | {count_var})
    prefix, body, report = _component_parts(presentation, count_var, names, fresh, index=1)
    formula = _close(prefix, body)
    return EliminationResult(
        formula=formula,
        count_var=count_var,
        report=EliminationReport(
            count_var=count_var,
            components=(report,),
            nodes=fm.node_count(formula),
        ),
    )


def eliminate(
    presentation: SemilinearPresentation,
    count_var: str,
    domain: Optional[DomainTag] = None,
    var_names: Optional[Sequence[str]] = None,
) -> EliminationResult:
    """Eliminate the counting quantifier over a disjoint simple union.

    Every component gets its own fresh count variable holding its exact
    witness count; the result asserts the component counts sum to
    ``count_var``.  Disjointness is the caller's asserted precondition: on
    overlapping inputs the sum over-counts shared witnesses.
    """
    presentation.require_asserted()
    if domain is not None and domain is not presentation.domain:
        raise ContractError(
            f"domain {domain.value} does not match presentation domain "
            f"{presentation.domain.value}"
        )
    names = (
        list(var_names)
        if var_names is not None
        else coordinate_names(presentation.dimension)
    )
    if len(names) != presentation.dimension:
        raise ContractError("variable name list does not match dimension")
    if count_var in names:
        raise ContractError("count variable clashes with a coordinate name")
    if len(presentation.components) == 1:
        result = eliminate_simple(
            presentation.components[0], count_var, var_names=names
        )
        return result
    fresh = FreshNames(set(names) | {count_var})
    prefix: list[str] = []
    bodies: list[Formula] = []
    reports = []
    component_sum = Term(0)
    for idx, component in enumerate(presentation.components, start=1):
        part_count = fresh.fresh("y")
        comp_prefix, comp_body, comp_report = _component_parts(
            component, part_count, names, fresh, index=idx
        )
        prefix.extend(comp_prefix)
        prefix.append(part_count)
        bodies.append(conj([Le(constant(0), variable(part_count)), comp_body]))
        component_sum = component_sum + variable(part_count)
        reports.append(comp_report)
    body = conj(bodies + [Eq(component_sum, variable(count_var))])
    formula = _close(prefix, body)
    return EliminationResult(
        formula=formula,
        count_var=count_var,
        report=EliminationReport(
            count_var=count_var,
            components=tuple(reports),
            nodes=fm.node_count(formula),
        ),
    )


def estimate_result_nodes(presentation: SemilinearPresentation) -> int:
    """Cheap upper bound on the size of the eliminated formula.

    Used by the command-line driver to warn before a blow-up; counts residue
    cases without checking feasibility, so it errs on the large side.
    """
    total = 0
    for component in presentation.components:
        if not check_simple(component):
            raise UnsupportedPresentationError(
                "elimination requires simple components (independent periods)"
            )
        matrix = component.period_matrix()
        n = component.dimension
        p = component.num_periods
        if matrix is None or find_full_rank_submatrix(matrix, forbidden_row=n - 1):
            total += 6 + 2 * n * (p + 2)
            continue
        selected = greedy_row_basis(matrix, n - 1)
        core_rows = selected + [n - 1]
        solution = cramer_solve(
            matrix.select_rows(core_rows), [component.base[i] for i in core_rows]
        )
        bc = classify_bounds(solution, [f"v{i}" for i in range(p - 1)])
        step = bc.multiplier * solution.denom
        branches = 1
        for k in range(2, len(bc.upper_rows) + 1):
            branches *= k
        for k in range(2, len(bc.lower_rows) + 1):
            branches *= k
        delta_nodes = 8 * step * step + 6 * step + 16
        guard_nodes = 4 * p + 8
        total += solution.denom**p * (branches * (delta_nodes + guard_nodes) + 12)
    return total
