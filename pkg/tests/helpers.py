"""Shared fixtures-in-spirit: reference models and independent oracles.

The oracles here deliberately avoid the library's own code paths: the
determinant oracle is textbook cofactor expansion, and the random SPD
builders enforce positive definiteness by diagonal dominance rather
than by factorization.
"""

import pathlib

import numpy as np

EXAMPLES_DIR = pathlib.Path(__file__).parent.parent / "examples"

# Three-block ladder on 8 variables; det(Sigma) = 125/128 by hand.
LADDER1_BLOCK = np.array(
    [
        [2.0, 1.0, 1.0, 0.0],
        [1.0, 2.0, 0.0, 0.0],
        [1.0, 0.0, 2.0, 1.0],
        [0.0, 0.0, 1.0, 2.0],
    ]
)
LADDER1_DET = 125.0 / 128.0
LADDER1_DUAL_DENSE = np.array(
    [
        [4.0, 2.0, -1.0, 0.0],
        [2.0, 4.0, 0.0, 0.0],
        [-1.0, 0.0, 4.0, 2.0],
        [0.0, 0.0, 2.0, 4.0],
    ]
)
LADDER1_DUAL_DET = 128.0

# Two-block ladder on 9 variables; block determinants 44 and 33, dual
# determinant 124, hence det(Sigma) = 44 * 33 / 124.
LADDER2_S1 = np.array(
    [
        [3.0, 1.0, 0.0, 2.0, 0.0, 0.0],
        [1.0, 2.0, 1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 3.0, 0.0, 0.0, 0.0],
        [2.0, 0.0, 0.0, 3.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0, 2.0, 1.0],
        [0.0, 0.0, 0.0, 0.0, 1.0, 3.0],
    ]
)
LADDER2_S2 = np.array(
    [
        [4.0, 1.0, 0.0, -2.0, 0.0, 0.0],
        [1.0, 3.0, -1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 1.0, 0.0, 0.0, 0.0],
        [-2.0, 0.0, 0.0, 4.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0, 3.0, -1.0],
        [0.0, 0.0, 0.0, 0.0, -1.0, 1.0],
    ]
)
LADDER2_DUAL_DENSE = np.array(
    [
        [7.0, 2.0, 0.0],
        [2.0, 5.0, 0.0],
        [0.0, 0.0, 4.0],
    ]
)
LADDER2_DET = 44.0 * 33.0 / 124.0


def ladder1_model():
    from gaussdual import LadderModel

    return LadderModel(2, 3, [LADDER1_BLOCK] * 3)


def ladder2_model():
    from gaussdual import LadderModel

    return LadderModel(3, 2, [LADDER2_S1, LADDER2_S2])


def det_cofactor(m):
    """Determinant by first-row cofactor expansion. O(n!), n <= 8 or so."""
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    if n == 0:
        return 1.0
    if n == 1:
        return m[0, 0]
    total = 0.0
    for j in range(n):
        minor = np.delete(np.delete(m, 0, axis=0), j, axis=1)
        total += (-1.0) ** j * m[0, j] * det_cofactor(minor)
    return total


def random_forest_edges(n, rng, extra_isolated=True):
    """Random forest on n vertices: random parent links, some roots."""
    edges = []
    for v in range(1, n):
        if extra_isolated and rng.random() < 0.1:
            continue  # v starts its own component
        u = int(rng.integers(0, v))
        edges.append((u, v))
    return edges


def random_forest_spd(n, rng):
    """SPD matrix with forest sparsity, via diagonal dominance."""
    from gaussdual import SparseSymMatrix

    edges = random_forest_edges(n, rng)
    rows = np.array([e[0] for e in edges], dtype=np.int64)
    cols = np.array([e[1] for e in edges], dtype=np.int64)
    vals = rng.uniform(0.2, 1.5, size=len(edges)) * rng.choice(
        [-1.0, 1.0], size=len(edges)
    )
    diag = np.full(n, 0.0)
    for (i, j), w in zip(edges, vals):
        diag[i] += abs(w)
        diag[j] += abs(w)
    diag += rng.uniform(0.5, 1.5, size=n)
    return SparseSymMatrix(n, diag, rows, cols, vals)


def random_spd_dense(n, rng):
    """Dense SPD matrix: A @ A.T plus a ridge."""
    a = rng.normal(size=(n, n))
    return a @ a.T + n * np.eye(n)
