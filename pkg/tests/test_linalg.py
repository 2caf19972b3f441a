import itertools
import random

import pytest

from countqe.errors import DegenerateInputError, DimensionError, SingularMatrixError
from countqe.linalg import (
    IntMatrix,
    cramer_solve,
    determinant,
    find_full_rank_submatrix,
    greedy_row_basis,
    positive_lcm,
    rank_over_rationals,
    solve_unique,
)

# The 4x3 period matrix of the worked three-period example: columns are
# (1,2,2,1), (2,4,1,1) and (-1,-2,0,-1).
THREE_PERIOD_MATRIX = IntMatrix.from_columns([(1, 2, 2, 1), (2, 4, 1, 1), (-1, -2, 0, -1)])


def _cofactor_determinant(rows):
    if len(rows) == 1:
        return rows[0][0]
    total = 0
    for j, head in enumerate(rows[0]):
        if head == 0:
            continue
        minor = [[row[c] for c in range(len(rows)) if c != j] for row in rows[1:]]
        total += (-1) ** j * head * _cofactor_determinant(minor)
    return total


class TestRank:
    def test_identity(self):
        assert rank_over_rationals(IntMatrix.identity(3)) == 3

    def test_three_period_matrix(self):
        assert rank_over_rationals(THREE_PERIOD_MATRIX) == 3

    def test_zero_column(self):
        assert rank_over_rationals(IntMatrix.from_rows([[0], [0], [0]])) == 0

    def test_rank_equals_transpose_rank(self):
        rng = random.Random(7)
        for _ in range(200):
            rows = rng.randint(1, 4)
            cols = rng.randint(1, 4)
            m = IntMatrix.from_rows(
                [[rng.randint(-4, 4) for _ in range(cols)] for _ in range(rows)]
            )
            assert rank_over_rationals(m) == rank_over_rationals(m.transpose())


class TestDeterminant:
    def test_worked_subsystem(self):
        m = IntMatrix.from_rows([(1, 2, -1), (2, 1, 0), (1, 1, -1)])
        assert determinant(m) == 2

    def test_identity(self):
        for n in range(1, 5):
            assert determinant(IntMatrix.identity(n)) == 1

    def test_diagonal(self):
        assert determinant(IntMatrix.from_rows([(2, 0), (0, 3)])) == 6

    def test_non_square(self):
        with pytest.raises(DimensionError):
            determinant(IntMatrix.from_rows([(1, 2, 3), (4, 5, 6)]))

    def test_against_cofactor_expansion(self):
        rng = random.Random(11)
        for _ in range(1000):
            n = rng.randint(1, 4)
            rows = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)]
            assert determinant(IntMatrix.from_rows(rows)) == _cofactor_determinant(rows)


class TestRowSelection:
    def test_worked_example_selection(self):
        # Forbidding the second row (index 1) picks rows 1, 3, 4 (0-based 0, 2, 3).
        sel = find_full_rank_submatrix(THREE_PERIOD_MATRIX, forbidden_row=1)
        assert sel is not None and sel.indices == (0, 2, 3)

    def test_identity_all_rows(self):
        sel = find_full_rank_submatrix(IntMatrix.identity(4))
        assert sel is not None and sel.indices == (0, 1, 2, 3)

    def test_absent_when_only_usable_row_forbidden(self):
        m = IntMatrix.from_rows([(0,), (1,)])
        assert find_full_rank_submatrix(m, forbidden_row=1) is None

    def test_matches_exhaustive_search(self):
        rng = random.Random(3)
        for _ in range(300):
            n = rng.randint(1, 5)
            p = rng.randint(1, min(n, 3))
            m = IntMatrix.from_rows(
                [[rng.randint(-2, 2) for _ in range(p)] for _ in range(n)]
            )
            forbidden = rng.choice([None] + list(range(n)))
            best = None
            for combo in itertools.combinations(
                [i for i in range(n) if i != forbidden], p
            ):
                if rank_over_rationals(m.select_rows(combo)) == p:
                    best = combo
                    break
            got = find_full_rank_submatrix(m, forbidden_row=forbidden)
            assert (got.indices if got else None) == best

    def test_greedy_row_basis_spans_prefix(self):
        basis = greedy_row_basis(THREE_PERIOD_MATRIX, 3)
        # The first three rows have rank 2: row 2 is twice row 1.
        assert basis == [0, 2]


class TestCramerSolve:
    def test_worked_subsystem(self):
        m = IntMatrix.from_rows([(1, 2, -1), (2, 1, 0), (1, 1, -1)])
        sol = cramer_solve(m, (0, 0, 0))
        assert sol.denom == 2
        assert sol.matrix == ((-1, 1, 1), (2, 0, -2), (1, 1, -3))
        assert sol.offset == (0, 0, 0)

    def test_identity(self):
        sol = cramer_solve(IntMatrix.identity(3), (0, 0, 0))
        assert sol.denom == 1
        assert sol.matrix == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
        assert sol.offset == (0, 0, 0)

    def test_single_equation_with_offset(self):
        sol = cramer_solve(IntMatrix.from_rows([(2,)]), (4,))
        assert sol.denom == 2
        assert sol.matrix == ((1,),)
        assert sol.offset == (-4,)

    def test_singular(self):
        with pytest.raises(SingularMatrixError):
            cramer_solve(IntMatrix.from_rows([(1, 2), (2, 4)]), (0, 0))

    def test_identity_on_random_systems(self):
        rng = random.Random(23)
        done = 0
        while done < 400:
            n = rng.randint(1, 4)
            m = IntMatrix.from_rows(
                [[rng.randint(-5, 5) for _ in range(n)] for _ in range(n)]
            )
            if determinant(m) == 0:
                continue
            a = [rng.randint(-5, 5) for _ in range(n)]
            z = [rng.randint(-6, 6) for _ in range(n)]
            x = [v + b for v, b in zip(m.mul_vector(z), a)]
            sol = cramer_solve(m, a)
            assert sol.numerators(x) == tuple(sol.denom * zi for zi in z)
            done += 1


class TestPositiveLcm:
    def test_worked_coefficients(self):
        assert positive_lcm((1, -2, -3)) == 6

    def test_single(self):
        assert positive_lcm((5,)) == 5

    def test_zeros_ignored(self):
        assert positive_lcm((4, 0, 6)) == 12

    def test_all_zero(self):
        with pytest.raises(DegenerateInputError):
            positive_lcm((0, 0))


class TestSolveUnique:
    def test_unique(self):
        sol = solve_unique([(1, 1), (1, -1)], (3, 1))
        assert sol == (2, 1)

    def test_inconsistent(self):
        assert solve_unique([(1, 1), (2, 2)], (1, 3)) is None

    def test_underdetermined(self):
        with pytest.raises(DegenerateInputError):
            solve_unique([(1, 1)], (2,))

    def test_overdetermined_consistent(self):
        sol = solve_unique([(1, 0), (0, 1), (1, 1)], (2, 3, 5))
        assert sol == (2, 3)
