import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boxworld import nogo as N
from boxworld.errors import DimensionMismatch

TOL = 1e-10


def test_basis_states():
    assert abs(N.inner(N.ZERO, N.PLUS) - 1 / math.sqrt(2)) < TOL
    assert abs(N.inner(N.PLUS, N.MINUS)) < TOL
    with pytest.raises(ValueError):
        N.state([1, 1])


def test_inner_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        N.inner(N.ZERO, N.tensor(N.ZERO, N.ZERO))


@pytest.mark.parametrize("n", range(1, 15))
def test_overlap_decay(n):
    overlap = abs(N.inner(N.tensor_power(N.ZERO, n), N.tensor_power(N.PLUS, n)))
    assert abs(overlap - 2 ** (-n / 2)) < TOL


def test_tensor_power_cap():
    with pytest.raises(ValueError):
        N.tensor_power(N.ZERO, 15)


unit = st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)).filter(
    lambda t: sum(v * v for v in t) > 1e-3)


def qubit(t):
    return N.normalized([complex(t[0], t[1]), complex(t[2], t[3])])


@given(unit, unit, unit, unit)
@settings(max_examples=50)
def test_overlap_multiplicative(u1, u2, v1, v2):
    u1, u2, v1, v2 = map(qubit, (u1, u2, v1, v2))
    lhs = N.inner(N.tensor(u1, u2), N.tensor(v1, v2))
    assert abs(lhs - N.inner(u1, v1) * N.inner(u2, v2)) < TOL


# --- PBR ---------------------------------------------------------------------

def test_pbr_outcomes_form_orthonormal_basis():
    M = np.array([v for _, v in N.PBR_OUTCOMES])
    assert np.allclose(M @ M.conj().T, np.eye(4), atol=TOL)


def test_pbr_table_rows_and_zeros():
    table = N.pbr_table()
    assert np.allclose(table.sum(axis=1), 1, atol=TOL)
    for i in range(4):
        assert table[i, i] < TOL
    off = table[~np.eye(4, dtype=bool)]
    assert off.min() > 0.1
    # exactly one zero per column
    assert ((table < TOL).sum(axis=0) == 1).all()


def test_pbr_by_hand_entry():
    # |0>|0> against (|0>|->+|1>|+>)/sqrt2: amplitude <00|0-> / sqrt2 = 1/2
    prob = N.born(N.PBR_PREPARATIONS[0][1], N.PBR_OUTCOMES[1][1])
    assert abs(prob - 0.25) < TOL


# --- preferred observable ----------------------------------------------------

ALIVE, DEAD = N.ZERO, N.ONE
U, V = N.PLUS, N.normalized([1, 2j])
CAT_R = np.kron(np.diag([1, -1]), np.eye(2))


def test_cat_two_branches():
    e = N.normalized(N.tensor(ALIVE, U) + N.tensor(DEAD, V))
    branches = N.preferred_projections(e, CAT_R)
    assert len(branches) == 2
    by_value = {round(b.eigenvalue): b for b in branches}
    assert abs(by_value[1].weight - 0.5) < TOL and abs(by_value[-1].weight - 0.5) < TOL
    assert abs(abs(N.inner(by_value[1].state, N.tensor(ALIVE, U))) - 1) < TOL
    assert abs(abs(N.inner(by_value[-1].state, N.tensor(DEAD, V))) - 1) < TOL
    assert abs(N.inner(by_value[1].state, by_value[-1].state)) < TOL


def test_identity_observable_keeps_state():
    e = N.normalized(N.tensor(ALIVE, U) + N.tensor(DEAD, V))
    branches = N.preferred_projections(e, np.eye(4))
    assert len(branches) == 1
    assert abs(branches[0].weight - 1) < TOL
    assert np.allclose(branches[0].state, e, atol=TOL)


def test_product_eigenstate_single_branch():
    r_prime = np.array([[0, 1], [1, 0]])
    e = N.tensor(N.normalized([1, 1j]), N.PLUS)
    branches = N.preferred_projections(e, np.kron(np.eye(2), r_prime))
    assert len(branches) == 1
    assert np.allclose(branches[0].state, e, atol=TOL)


def test_non_hermitian_rejected():
    with pytest.raises(ValueError):
        N.preferred_projections(N.ZERO, [[0, 1], [0, 0]])
    with pytest.raises(DimensionMismatch):
        N.preferred_projections(N.ZERO, np.eye(4))


@given(st.integers(0, 2**31))
@settings(max_examples=40)
def test_branch_weights_are_born_weights(seed):
    rng = np.random.default_rng(seed)
    dim = 4
    e = N.normalized(rng.normal(size=dim) + 1j * rng.normal(size=dim))
    # degenerate spectrum on purpose
    Q, _ = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    R = Q @ np.diag([1.0, 1.0, -2.0, 3.0]) @ Q.conj().T
    branches = N.preferred_projections(e, R)
    assert abs(sum(b.weight for b in branches) - 1) < TOL
    for b in branches:
        assert abs(N.born(e, b.state) - b.weight) < TOL
    for i, b1 in enumerate(branches):
        for b2 in branches[i + 1:]:
            assert abs(N.inner(b1.state, b2.state)) < TOL
