import random

import pytest

from countqe.elim import (
    BoundClassification,
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
from countqe.errors import ContractError, ConventionError, ParameterError, UnsupportedPresentationError
from countqe.formula import (
    Cong,
    Eq,
    Le,
    Lt,
    Term,
    conj,
    constant,
    contains_counting,
    evaluate,
    free_vars,
    variable,
)
from countqe.linalg import IntMatrix, cramer_solve
from countqe.sets import DomainTag, LinearSetPresentation, SemilinearPresentation

THREE_PERIOD_SET = LinearSetPresentation(
    base=(0, 0, 0, 0),
    periods=((1, 2, 2, 1), (2, 4, 1, 1), (-1, -2, 0, -1)),
)

CORE_SOLUTION = cramer_solve(
    IntMatrix.from_rows([(1, 2, -1), (2, 1, 0), (1, 1, -1)]), (0, 0, 0)
)


def singleton(*point, domain=DomainTag.Z):
    return LinearSetPresentation(base=point, periods=(), domain=domain)


class TestCountInProgression:
    def test_examples(self):
        assert count_in_progression(0, 24, 0, 12) == 3
        assert count_in_progression(5, 4, 0, 3) == 0
        assert count_in_progression(0, 0, 0, 5) == 1

    def test_exhaustive_small(self):
        for modulus in range(1, 7):
            for r in range(modulus):
                for lo in range(-15, 16):
                    for hi in range(-15, 16):
                        expected = sum(
                            1 for t in range(lo, hi + 1) if t % modulus == r
                        )
                        assert count_in_progression(lo, hi, r, modulus) == expected

    def test_bad_modulus(self):
        with pytest.raises(ParameterError):
            count_in_progression(0, 1, 0, 0)


def _enum_count_int(m, a, d, lo, hi):
    return sum(1 for x in range(-45, 46) if lo <= m * x <= hi and x % d == a)


def _enum_count_nat(m, a, d, y1, y2, z1, z2):
    return sum(
        1
        for x in range(0, 46)
        if y1 <= m * x + y2 and z1 + m * x <= z2 and x % d == a
    )


class TestProgressionCountFormula:
    def _check(self, m, a, d, lo_v, hi_v):
        f = progression_count_formula(m, a, d, variable("lo"), variable("hi"), "u")
        expected = _enum_count_int(m, a, d, lo_v, hi_v)
        asg = {"lo": lo_v, "hi": hi_v}
        assert evaluate(f, asg | {"u": expected}) is True
        for wrong in (expected - 1, expected + 1, expected + 5):
            if wrong != expected:
                assert evaluate(f, asg | {"u": wrong}) is False

    def test_even_example(self):
        # numbers x with 0 <= 2x <= 24 and x = 0 (mod 6): {0, 6, 12}
        self._check(2, 0, 6, 0, 24)

    def test_empty_interval(self):
        self._check(3, 1, 4, 10, 3)

    def test_unit_parameters(self):
        # all integers with 0 <= x <= 9
        self._check(1, 0, 1, 0, 9)

    def test_randomised_against_enumeration(self):
        rng = random.Random(37)
        for _ in range(400):
            m = rng.randint(1, 3)
            d = rng.randint(1, 4)
            a = rng.randrange(d)
            self._check(m, a, d, rng.randint(-25, 25), rng.randint(-25, 25))

    def test_no_quantifiers_and_parameter_errors(self):
        f = progression_count_formula(2, 1, 3, variable("lo"), variable("hi"), "u")
        assert contains_counting(f) is False
        assert free_vars(f) == {"lo", "hi", "u"}
        with pytest.raises(ParameterError):
            progression_count_formula(2, 3, 3, variable("lo"), variable("hi"), "u")
        with pytest.raises(ParameterError):
            progression_count_formula(0, 0, 1, variable("lo"), variable("hi"), "u")


class TestProgressionCountFormulaNat:
    def _check(self, m, a, d, y1, y2, z1, z2):
        f = progression_count_formula_nat(
            m,
            a,
            d,
            variable("y1"),
            variable("y2"),
            variable("z1"),
            variable("z2"),
            "u",
        )
        expected = _enum_count_nat(m, a, d, y1, y2, z1, z2)
        asg = {"y1": y1, "y2": y2, "z1": z1, "z2": z2}
        assert evaluate(f, asg | {"u": expected}, domain="N") is True
        for wrong in (expected + 1, expected + 3):
            assert evaluate(f, asg | {"u": wrong}, domain="N") is False

    def test_even_example(self):
        self._check(2, 0, 6, 0, 0, 0, 24)

    def test_upper_empty(self):
        self._check(1, 0, 2, 0, 0, 9, 3)

    def test_interval_empty_after_shift(self):
        self._check(1, 0, 1, 10, 0, 0, 4)

    def test_subtraction_free(self):
        f = progression_count_formula_nat(
            2, 1, 3, variable("y1"), variable("y2"), variable("z1"), variable("z2"), "u"
        )
        assert is_subtraction_free(f) is True

    def test_randomised_against_enumeration(self):
        rng = random.Random(41)
        for _ in range(400):
            m = rng.randint(1, 3)
            d = rng.randint(1, 4)
            a = rng.randrange(d)
            self._check(
                m,
                a,
                d,
                rng.randint(0, 25),
                rng.randint(0, 25),
                rng.randint(0, 25),
                rng.randint(0, 25),
            )


class TestClassifyBounds:
    def test_worked_example(self):
        bc = classify_bounds(CORE_SOLUTION, ["x1", "x3"])
        assert bc.multiplier == 6
        assert bc.upper_rows == (1, 2)
        assert bc.lower_rows == (0,)
        assert bc.sign_rows == ()
        assert bc.scale == {0: -6, 1: 3, 2: 2}
        # 6*x4 >= 6*x1 - 6*x3 ; 6*x4 <= 6*x1 ; 6*x4 <= 2*x1 + 2*x3
        assert bc.bound_term(0) == Term(0, {"x1": 6, "x3": -6})
        assert bc.bound_term(1) == Term(0, {"x1": 6})
        assert bc.bound_term(2) == Term(0, {"x1": 2, "x3": 2})

    def test_single_lower(self):
        sol = cramer_solve(IntMatrix.from_rows([(-1,)]), (0,))
        bc = classify_bounds(sol, [])
        assert bc.multiplier == 1
        assert bc.upper_rows == (0,)
        assert bc.lower_rows == ()

    def test_sign_rows(self):
        sol = cramer_solve(IntMatrix.from_rows([(1, 0), (0, 1)]), (0, 0))
        bc = classify_bounds(sol, ["x1"])
        assert bc.sign_rows == (0,)
        assert bc.lower_rows == (1,)
        assert bc.upper_rows == ()


class TestResidueCases:
    def test_counts(self):
        assert len(build_residue_cases(1, 3)) == 1
        assert len(build_residue_cases(2, 2)) == 4
        assert len(build_residue_cases(2, 1)) == 2

    def test_lexicographic(self):
        cases = build_residue_cases(2, 2)
        assert cases == [
            ResidueCase((0,), 0),
            ResidueCase((0,), 1),
            ResidueCase((1,), 0),
            ResidueCase((1,), 1),
        ]

    def test_worked_example_feasibility(self):
        assert residue_case_feasible(CORE_SOLUTION, ResidueCase((0, 0), 0)) is True
        assert residue_case_feasible(CORE_SOLUTION, ResidueCase((1, 0), 0)) is False
        feasible = [
            case
            for case in build_residue_cases(2, 3)
            if residue_case_feasible(CORE_SOLUTION, case)
        ]
        # Exactly the residue classes with x1 + x3 + x4 even.
        assert all(
            (sum(case.free_residues) + case.counted_residue) % 2 == 0
            for case in feasible
        )
        assert len(feasible) == 4

    def test_unit_denominator_always_feasible(self):
        sol = cramer_solve(IntMatrix.from_rows([(1,)]), (0,))
        assert residue_case_feasible(sol, ResidueCase((), 0)) is True


class TestPermutationBranches:
    def _classification(self, uppers, lowers):
        terms = []
        scale = {}
        for idx in range(uppers + lowers):
            terms.append(variable(f"s{idx}"))
            scale[idx] = 1 if idx < uppers else -1
        return BoundClassification(
            multiplier=1,
            row_terms=tuple(terms),
            scale=scale,
            upper_rows=tuple(range(uppers)),
            lower_rows=tuple(range(uppers, uppers + lowers)),
            sign_rows=(),
        )

    def test_counts(self):
        assert len(build_permutation_branches(self._classification(2, 1))) == 2
        assert len(build_permutation_branches(self._classification(1, 1))) == 1
        assert len(build_permutation_branches(self._classification(2, 2))) == 4

    def test_single_branch_has_empty_guard(self):
        (branch,) = build_permutation_branches(self._classification(1, 1))
        assert free_vars(branch.guard) == set()

    def test_empty_family_rejected(self):
        with pytest.raises(ConventionError):
            build_permutation_branches(self._classification(0, 2))

    def test_guards_partition(self):
        rng = random.Random(43)
        for uppers in (1, 2, 3):
            for lowers in (1, 2, 3):
                bc = self._classification(uppers, lowers)
                branches = build_permutation_branches(bc)
                for _ in range(300):
                    asg = {
                        f"s{idx}": rng.randint(-2, 2)
                        for idx in range(uppers + lowers)
                    }
                    hits = [
                        b for b in branches if evaluate(b.guard, asg, quant_bound=4)
                    ]
                    assert len(hits) == 1


class TestNormalizeForNat:
    def test_equation_example(self):
        x, y, z = variable("x"), variable("y"), variable("z")
        atom = Eq(x - 3 * y, y - z)
        assert normalize_for_nat(atom) == Eq(x + z, 4 * y)

    def test_already_nonnegative(self):
        atom = Le(constant(0), variable("x"))
        assert normalize_for_nat(atom) == atom

    def test_move_both_sides(self):
        atom = Le(-1 * variable("x"), constant(-2))
        assert normalize_for_nat(atom) == Le(constant(2), variable("x"))

    def test_congruence_coefficients(self):
        atom = Cong(variable("x") - variable("y"), 1, 3)
        fixed = normalize_for_nat(atom)
        assert fixed == Cong(variable("x") + 2 * variable("y"), 1, 3)

    def test_preserves_truth_over_naturals(self):
        rng = random.Random(47)
        names = ["x", "y", "z"]
        for _ in range(400):
            t1 = Term(rng.randint(-4, 4), {n: rng.randint(-3, 3) for n in names})
            t2 = Term(rng.randint(-4, 4), {n: rng.randint(-3, 3) for n in names})
            kind = rng.randrange(4)
            atom = (
                Le(t1, t2)
                if kind == 0
                else Lt(t1, t2)
                if kind == 1
                else Eq(t1, t2)
                if kind == 2
                else Cong(t1, rng.randrange(3), rng.randint(1, 4))
            )
            fixed = normalize_for_nat(atom)
            assert is_subtraction_free(fixed)
            asg = {n: rng.randint(0, 10) for n in names}
            assert evaluate(fixed, asg, domain="N") == evaluate(atom, asg, domain="N")


class TestEliminateSimpleStructure:
    def test_worked_example_report(self):
        result = eliminate_simple(THREE_PERIOD_SET, "y")
        rep = result.report.components[0]
        assert rep.case == "interval-count"
        assert rep.denom == 2
        assert rep.multiplier == 6
        assert rep.selected_rows == (1, 3, 4)
        assert rep.dropped_rows == (2,)
        assert rep.upper_rows == (2, 3)
        assert rep.lower_rows == (1,)
        assert rep.sign_rows == ()
        assert rep.residue_cases == 8
        assert rep.feasible_cases == 4
        assert rep.branches == 2
        assert contains_counting(result.formula) is False
        assert free_vars(result.formula) <= {"x1", "x2", "x3", "y"}

    def test_singleton_uses_single_witness_case(self):
        result = eliminate_simple(singleton(5, 7), "y")
        assert result.report.components[0].case == "single-witness"
        # Count 1 exactly at the point's projection, 0 elsewhere.
        assert evaluate(result.formula, {"x1": 5, "y": 1}, quant_bound=10) is True
        assert evaluate(result.formula, {"x1": 5, "y": 0}, quant_bound=10) is False
        assert evaluate(result.formula, {"x1": 4, "y": 0}, quant_bound=10) is True
        assert evaluate(result.formula, {"x1": 4, "y": 1}, quant_bound=10) is False

    def test_half_line_is_false_for_every_count(self):
        half_line = LinearSetPresentation(base=(0,), periods=((1,),))
        result = eliminate_simple(half_line, "y")
        for k in range(-2, 6):
            assert evaluate(result.formula, {"y": k}, quant_bound=8) is False

    def test_non_simple_rejected(self):
        bad = LinearSetPresentation(base=(0, 0), periods=((1, 0), (2, 0)))
        with pytest.raises(UnsupportedPresentationError):
            eliminate_simple(bad, "y")

    def test_count_variable_clash(self):
        with pytest.raises(ContractError):
            eliminate_simple(singleton(1, 2), "x1")

    def test_domain_mismatch(self):
        with pytest.raises(ContractError):
            eliminate_simple(singleton(1), "y", domain=DomainTag.N)


class TestEliminateSimpleSemantics:
    def _witness_count(self, presentation, asg, lo=-60, hi=60):
        from countqe.sets import MembershipTester

        tester = MembershipTester(presentation)
        names = [f"x{i+1}" for i in range(presentation.dimension)]
        total = 0
        for v in range(lo, hi + 1):
            point = [asg[n] for n in names[:-1]] + [v]
            if tester.contains(point):
                total += 1
        return total

    def test_even_interval_component(self):
        # points (x1, x2) with x2 even and 0 <= x2 <= 2*x1
        comp = LinearSetPresentation(base=(0, 0), periods=((1, 0), (1, 2)))
        result = eliminate_simple(comp, "y")
        for x1 in range(-2, 5):
            expected = self._witness_count(comp, {"x1": x1})
            for k in range(0, 7):
                value = evaluate(
                    result.formula, {"x1": x1, "y": k}, quant_bound=6
                )
                assert value == (k == expected), (x1, k, expected)

    def test_scaled_line_over_naturals(self):
        comp = LinearSetPresentation(base=(1,), periods=(), domain=DomainTag.N)
        result = eliminate_simple(comp, "y")
        assert evaluate(result.formula, {"y": 1}, domain="N", quant_bound=8) is True
        assert evaluate(result.formula, {"y": 0}, domain="N", quant_bound=8) is False

    def test_forced_coordinate_relation(self):
        # periods force x2 = 2*x1 and count x3: base 0, period (1, 2, 0), (0, 0, 3)
        comp = LinearSetPresentation(base=(0, 0, 0), periods=((1, 2, 0), (0, 0, 3)))
        result = eliminate_simple(comp, "y")
        # x2 != 2*x1: no witnesses at all
        assert evaluate(result.formula, {"x1": 1, "x2": 3, "y": 0}, quant_bound=12) is True
        assert evaluate(result.formula, {"x1": 1, "x2": 3, "y": 1}, quant_bound=12) is False
        # x2 = 2*x1 with x1 >= 0: infinitely many x3 (multiples of 3 from 0)
        for k in range(0, 5):
            assert (
                evaluate(result.formula, {"x1": 1, "x2": 2, "y": k}, quant_bound=12)
                is False
            )
        # x2 = 2*x1 with x1 < 0: coefficient of the first period is negative
        assert evaluate(result.formula, {"x1": -1, "x2": -2, "y": 0}, quant_bound=12) is True


class TestEliminateUnion:
    def test_two_singletons(self):
        s = SemilinearPresentation(
            components=(singleton(3), singleton(7)),
            asserted_disjoint=True,
            asserted_simple=True,
        )
        result = eliminate(s, "y")
        for k in range(0, 5):
            assert evaluate(result.formula, {"y": k}, quant_bound=12) is (k == 2)

    def test_requires_assertions(self):
        s = SemilinearPresentation(components=(singleton(3),))
        with pytest.raises(ContractError):
            eliminate(s, "y")

    def test_two_infinite_components(self):
        evens = LinearSetPresentation(base=(0,), periods=((2,),))
        odds = LinearSetPresentation(base=(1,), periods=((2,),))
        s = SemilinearPresentation(
            components=(evens, odds), asserted_disjoint=True, asserted_simple=True
        )
        result = eliminate(s, "y")
        for k in range(0, 6):
            assert evaluate(result.formula, {"y": k}, quant_bound=10) is False

    def test_single_component_matches_eliminate_simple(self):
        s = SemilinearPresentation(
            components=(singleton(2, 9),), asserted_disjoint=True, asserted_simple=True
        )
        combined = eliminate(s, "y")
        alone = eliminate_simple(singleton(2, 9), "y")
        assert combined.formula == alone.formula

    def test_estimate_is_positive(self):
        s = SemilinearPresentation(
            components=(THREE_PERIOD_SET,), asserted_disjoint=True, asserted_simple=True
        )
        assert estimate_result_nodes(s) > 0
