"""Dense state-vector checks: the two-qubit PBR table, overlap decay under
tensor powers, and projection of a state onto the eigenspaces of a
preferred observable.

Tensor products use numpy's Kronecker ordering, left factor outermost.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch

NORM_TOL = 1e-12
CLUSTER_TOL = 1e-9
MIN_WEIGHT = 1e-12
MAX_DIM = 2**14


def state(amplitudes) -> np.ndarray:
    """Complex vector checked for unit norm."""
    v = np.asarray(amplitudes, dtype=complex).ravel()
    if v.size == 0:
        raise ValueError("empty state")
    norm = np.linalg.norm(v)
    if abs(norm - 1) > NORM_TOL:
        raise ValueError(f"state has norm {norm}, expected 1")
    return v


def normalized(amplitudes) -> np.ndarray:
    v = np.asarray(amplitudes, dtype=complex).ravel()
    return v / np.linalg.norm(v)


ZERO = state([1, 0])
ONE = state([0, 1])
PLUS = normalized([1, 1])
MINUS = normalized([1, -1])


def _same_dim(u, v):
    if u.shape != v.shape:
        raise DimensionMismatch(f"dimensions {u.shape[0]} and {v.shape[0]} differ")


def inner(u, v) -> complex:
    """``<u|v>``, conjugate-linear in ``u``."""
    u, v = np.asarray(u, dtype=complex), np.asarray(v, dtype=complex)
    _same_dim(u, v)
    return complex(np.vdot(u, v))


def tensor(*factors) -> np.ndarray:
    out = np.ones(1, dtype=complex)
    for f in factors:
        out = np.kron(out, np.asarray(f, dtype=complex))
    if out.size > MAX_DIM:
        raise ValueError(f"dimension {out.size} exceeds cap {MAX_DIM}")
    return out


def tensor_power(u, n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be at least 1")
    u = np.asarray(u, dtype=complex)
    if u.size ** n > MAX_DIM:
        raise ValueError(f"dimension {u.size}**{n} exceeds cap {MAX_DIM}")
    return tensor(*([u] * n))


def born(psi, outcome) -> float:
    """Probability ``|<outcome|psi>|**2``."""
    return abs(inner(outcome, psi)) ** 2


# --- PBR ---------------------------------------------------------------------

PBR_PREPARATIONS = (
    ("|0>|0>", tensor(ZERO, ZERO)),
    ("|0>|+>", tensor(ZERO, PLUS)),
    ("|+>|0>", tensor(PLUS, ZERO)),
    ("|+>|+>", tensor(PLUS, PLUS)),
)

# each outcome is orthogonal to the preparation with the same index
PBR_OUTCOMES = (
    ("|0>|1>+|1>|0>", normalized(tensor(ZERO, ONE) + tensor(ONE, ZERO))),
    ("|0>|->+|1>|+>", normalized(tensor(ZERO, MINUS) + tensor(ONE, PLUS))),
    ("|+>|1>+|->|0>", normalized(tensor(PLUS, ONE) + tensor(MINUS, ZERO))),
    ("|+>|->+|->|+>", normalized(tensor(PLUS, MINUS) + tensor(MINUS, PLUS))),
)


def pbr_table() -> np.ndarray:
    """Born probabilities, rows = preparations, columns = entangled outcomes."""
    return np.array([[born(prep, out) for _, out in PBR_OUTCOMES]
                     for _, prep in PBR_PREPARATIONS])


# --- preferred observable ----------------------------------------------------

@dataclass(frozen=True)
class Branch:
    eigenvalue: float
    state: np.ndarray
    weight: float


def hermitian(matrix) -> np.ndarray:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"observable must be square, got shape {m.shape}")
    if not np.allclose(m, m.conj().T, atol=NORM_TOL, rtol=0):
        raise ValueError("observable is not Hermitian")
    return m


def eigenspaces(R) -> list:
    """``[(eigenvalue, projector), ...]`` with eigenvalues within
    :data:`CLUSTER_TOL` merged into one eigenspace."""
    R = hermitian(R)
    vals, vecs = np.linalg.eigh(R)
    clusters = []
    for i, lam in enumerate(vals):
        if clusters and abs(lam - clusters[-1][0][-1]) <= CLUSTER_TOL:
            clusters[-1][0].append(lam)
            clusters[-1][1].append(i)
        else:
            clusters.append(([lam], [i]))
    out = []
    for lams, idx in clusters:
        basis = vecs[:, idx]
        out.append((float(np.mean(lams)), basis @ basis.conj().T))
    return out


def preferred_projections(e, R) -> list:
    """Project ``e`` onto each eigenspace of ``R``; keep branches with
    Born weight at least :data:`MIN_WEIGHT`."""
    e = state(e)
    R = hermitian(R)
    if R.shape[0] != e.size:
        raise DimensionMismatch(f"state has dimension {e.size}, observable {R.shape[0]}")
    branches = []
    for lam, proj in eigenspaces(R):
        v = proj @ e
        w = float(np.vdot(v, v).real)
        if w >= MIN_WEIGHT:
            branches.append(Branch(lam, v / np.sqrt(w), w))
    return branches
