import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from gaq import linalg

k = sp.Symbol("k", real=True)
m = sp.Symbol("m", positive=True)


def test_generic_rank_records_condition():
    conds = []
    assert linalg.rank([[k, 1], [0, k]], conds) == 2
    assert conds == [k]


def test_provably_nonzero_pivot_adds_nothing():
    conds = []
    assert linalg.rank([[m, 1], [0, 1 + m**2]], conds) == 2
    assert conds == []


def test_condition_uses_numerator():
    assert linalg.nonzero_condition(1 / k) is None
    assert linalg.nonzero_condition((k - 1) / m) == k - 1


def test_solve_in_span():
    assert linalg.solve_in_span([[1, 0, 0], [0, 1, 0]], [2, 3, 0]) == [2, 3]
    assert linalg.solve_in_span([[1, 0, 0]], [0, 1, 0]) is None


@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=4))
def test_rank_and_nullspace_match_sympy(rows):
    M = sp.Matrix(rows)
    assert linalg.rank(rows) == M.rank()
    ns = linalg.nullspace(rows, 4)
    assert len(ns) == 4 - M.rank()
    for v in ns:
        assert (M * sp.Matrix(v)).is_zero_matrix
