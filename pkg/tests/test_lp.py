from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from boxworld import lp
from boxworld.errors import MalformedSystem


def test_empty_system_with_normalisation():
    res = lp.feasible([], [], n_vars=1)
    assert res.feasible and res.point == (1,)


def test_simple_feasible_point_verified():
    A = [[1, 1, 0], [0, 1, 1]]
    b = [1, 1]
    res = lp.feasible(A, b, normalize=False)
    assert res.feasible
    assert lp.verify_point(A, b, res.point)


def test_infeasible_gives_farkas_vector():
    # x1 + x2 = 1 and x1 + x2 = 2 cannot both hold
    A = [[1, 1], [1, 1]]
    b = [1, 2]
    res = lp.feasible(A, b, normalize=False)
    assert not res.feasible
    assert lp.verify_farkas(A, b, res.certificate, 2)


def test_negative_rhs_handled():
    A = [[-1, 0], [0, 1]]
    b = [-F(1, 3), F(2, 3)]
    res = lp.feasible(A, b)
    assert res.feasible and res.point == (F(1, 3), F(2, 3))


def test_solve_lp_known_optimum():
    # max x + 2y  s.t.  x + y + s = 4, x + 3y + t = 6
    c = [1, 2, 0, 0]
    A = [[1, 1, 1, 0], [1, 3, 0, 1]]
    res = lp.solve_lp(c, A, [4, 6], maximize=True)
    assert res.status == "optimal"
    assert res.value == 5
    assert res.x[:2] == (3, 1)


def test_unbounded_detected():
    res = lp.solve_lp([-1, 0], [[1, -1]], [0])
    assert res.status == "unbounded"


def test_degenerate_problem_terminates():
    # classic cycling example for the textbook rule; Bland's rule must finish
    A = [[F(1, 4), -8, -1, 9, 1, 0, 0],
         [F(1, 2), -12, -F(1, 2), 3, 0, 1, 0],
         [0, 0, 1, 0, 0, 0, 1]]
    c = [-F(3, 4), 20, -F(1, 2), 6, 0, 0, 0]
    res = lp.solve_lp(c, A, [0, 0, 1])
    assert res.status == "optimal"
    assert res.value == -F(5, 4)


def test_malformed_system_rejected():
    with pytest.raises(MalformedSystem):
        lp.feasible([[1, 2], [1]], [1, 1])
    with pytest.raises(MalformedSystem):
        lp.feasible([[1, 2]], [1, 2])


def test_rank():
    assert lp.rank([[1, 2], [2, 4]]) == 1
    assert lp.rank([[1, 0, 0], [0, 1, 0], [1, 1, 0]]) == 2
    assert lp.rank([]) == 0


small = st.integers(-3, 3)


@given(st.integers(1, 4), st.integers(2, 5), st.data())
@settings(max_examples=80, deadline=None)
def test_every_answer_is_certified(m, n, data):
    A = [[data.draw(small) for _ in range(n)] for _ in range(m)]
    b = [data.draw(small) for _ in range(m)]
    res = lp.feasible(A, b, n_vars=n)
    full_A = A + [[1] * n]
    full_b = b + [1]
    if res.feasible:
        assert all(v >= 0 for v in res.point)
        assert lp.verify_point(full_A, full_b, res.point)
    else:
        assert lp.verify_farkas(full_A, full_b, res.certificate, n)


@given(st.lists(st.integers(0, 5), min_size=3, max_size=3).filter(any))
def test_feasible_when_built_from_a_point(ws):
    total = sum(ws)
    x = [F(w, total) for w in ws]
    A = [[1, 2, 3], [0, 1, -1]]
    b = [sum(a * xi for a, xi in zip(row, x)) for row in A]
    assert lp.feasible(A, b).feasible
