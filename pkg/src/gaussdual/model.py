"""Ladder-structured Gaussian models.

A ladder model couples N = (L+1)k zero-mean variables through L local
covariance blocks of size 2k; consecutive blocks overlap in k variables.
This module holds the model container, structural validation (positive
definiteness, acyclicity of the block sparsity graphs), and assembly of
the global precision matrix implied by the product of local factors.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NotPositiveDefinite
from .linalg import PIVOT_RTOL, SYMMETRY_RTOL, symmetrize


class LadderModel:
    """Chain of L overlapping Gaussian factors, each on 2k variables.

    Parameters
    ----------
    k : int
        Half-block width; consecutive blocks share k variables.
    L : int
        Number of blocks, ≥ 1.
    sigma_blocks : sequence of (2k, 2k) arrays
        Local covariance matrices. They are symmetrized on ingestion;
        positive definiteness is checked by `validate`, not here, so
        deliberately broken models can be constructed for inspection.

    Attributes
    ----------
    sigma_blocks : ndarray, shape (L, 2k, 2k)
        The blocks, stacked.
    N : int
        Total variable count, (L+1)·k.
    """

    def __init__(self, k, L, sigma_blocks):
        k = int(k)
        L = int(L)
        if k < 1:
            raise DimensionMismatch(f"k must be >= 1, got {k}")
        if L < 1:
            raise DimensionMismatch(f"L must be >= 1, got {L}")
        blocks = np.asarray(sigma_blocks, dtype=float)
        if blocks.shape != (L, 2 * k, 2 * k):
            raise DimensionMismatch(
                f"expected {L} covariance blocks of shape "
                f"({2 * k}, {2 * k}), got array of shape {blocks.shape}"
            )
        swapped = np.swapaxes(blocks, 1, 2)
        if blocks.size:
            scale = np.maximum(1.0, np.abs(blocks).max(axis=(1, 2)))
            asym = np.abs(blocks - swapped).max(axis=(1, 2))
            bad = np.nonzero(asym > SYMMETRY_RTOL * scale)[0]
            if bad.size:
                raise ValueError(
                    f"covariance block {bad[0]} is not symmetric "
                    f"(max |b - b.T| = {asym[bad[0]]:.3e})"
                )
        self.k = k
        self.L = L
        self.sigma_blocks = 0.5 * (blocks + swapped)
        self.sigma_blocks.setflags(write=False)

    @property
    def N(self):
        return (self.L + 1) * self.k

    def block_span(self, ell):
        """Global indices covered by block ``ell`` (0-based): a range of 2k."""
        if not 0 <= ell < self.L:
            raise IndexError(f"block index {ell} out of range [0, {self.L})")
        return range(ell * self.k, (ell + 2) * self.k)

    def __repr__(self):
        return f"LadderModel(k={self.k}, L={self.L}, N={self.N})"


class SparseSymMatrix:
    """Symmetric matrix stored as a diagonal plus strictly-upper entries.

    Off-diagonal structure is kept in parallel arrays ``rows``, ``cols``,
    ``vals`` with rows < cols, no duplicates and no explicit zeros, so the
    entry list doubles as the edge set of the matrix's graph.
    """

    def __init__(self, n, diag, rows=None, cols=None, vals=None):
        n = int(n)
        diag = np.asarray(diag, dtype=float)
        if diag.shape != (n,):
            raise DimensionMismatch(
                f"diagonal has shape {diag.shape}, expected ({n},)"
            )
        rows = np.asarray([] if rows is None else rows, dtype=np.int64)
        cols = np.asarray([] if cols is None else cols, dtype=np.int64)
        vals = np.asarray([] if vals is None else vals, dtype=float)
        if not rows.shape == cols.shape == vals.shape or rows.ndim != 1:
            raise DimensionMismatch("rows, cols and vals must be equal-length 1-d")
        if rows.size:
            if rows.min() < 0 or cols.max() >= n:
                raise ValueError("entry index out of range")
            if np.any(rows >= cols):
                raise ValueError("entries must satisfy row < col (upper triangle)")
            if np.any(vals == 0.0):
                raise ValueError("explicit zero entries are not allowed")
            keys = rows * n + cols
            if np.unique(keys).size != keys.size:
                raise ValueError("duplicate (row, col) entries")
        self.n = n
        self.diag = diag
        self.rows = rows
        self.cols = cols
        self.vals = vals

    @property
    def nnz(self):
        return int(self.rows.size)

    @property
    def edges(self):
        """Off-diagonal entries as (i, j, weight) tuples, i < j."""
        return [
            (int(i), int(j), float(v))
            for i, j, v in zip(self.rows, self.cols, self.vals)
        ]

    @classmethod
    def from_dense(cls, m, zero_tol=0.0):
        m = symmetrize(m)
        i, j = np.triu_indices(m.shape[0], 1)
        keep = np.abs(m[i, j]) > zero_tol
        return cls(m.shape[0], np.diagonal(m).copy(), i[keep], j[keep], m[i, j][keep])

    def to_dense(self):
        m = np.zeros((self.n, self.n))
        np.fill_diagonal(m, self.diag)
        m[self.rows, self.cols] = self.vals
        m[self.cols, self.rows] = self.vals
        return m

    def __repr__(self):
        return f"SparseSymMatrix(n={self.n}, nnz={self.nnz})"


@dataclass
class ValidationReport:
    """Outcome of the structural checks a ladder model is expected to meet.

    ``assumption2_cycles_present`` is informational: it records whether
    every block's precision graph is cyclic (the regime where dualization
    pays off), and nothing downstream depends on it.
    """

    assumption1_ok: bool
    assumption2_cycles_present: bool
    assumption3_blocks_acyclic: bool
    assumption3_union_acyclic: bool
    messages: list = field(default_factory=list)

    @property
    def ok(self):
        return (
            self.assumption1_ok
            and self.assumption3_blocks_acyclic
            and self.assumption3_union_acyclic
        )


class UnionFind:
    """Disjoint sets over 0..n-1 with path halving."""

    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b):
        """Merge the sets of a and b; False if already joined."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def sparsity_graph(m, zero_tol=0.0):
    """Graph of a symmetric matrix: entries above ``zero_tol`` are edges.

    Diagonal values are copied verbatim; an off-diagonal pair (i, j) with
    |m[i, j]| > zero_tol contributes one undirected edge.
    """
    return SparseSymMatrix.from_dense(m, zero_tol=zero_tol)


def is_forest(g):
    """True iff the edge set of ``g`` contains no cycle."""
    uf = UnionFind(g.n)
    for i, j in zip(g.rows.tolist(), g.cols.tolist()):
        if not uf.union(i, j):
            return False
    return True


def _stacked_cholesky(blocks, context):
    """Cholesky-factorize a (L, m, m) stack, attributing failures to a block.

    Returns the stacked lower factors. Raises NotPositiveDefinite naming
    the first offending block and pivot, applying the same scale-relative
    pivot floor as `linalg.spd_factorize`.
    """
    try:
        lowers = np.linalg.cholesky(blocks)
    except np.linalg.LinAlgError:
        lowers = None
    if lowers is None:
        for ell, b in enumerate(blocks):
            try:
                np.linalg.cholesky(b)
            except np.linalg.LinAlgError:
                raise NotPositiveDefinite(
                    f"{context} {ell} is not positive definite"
                ) from None
        raise NotPositiveDefinite(f"some {context} is not positive definite")

    pivots = np.diagonal(lowers, axis1=1, axis2=2) ** 2
    diags = np.diagonal(blocks, axis1=1, axis2=2)
    floors = PIVOT_RTOL * np.maximum(1.0, diags.max(axis=1))
    bad = np.nonzero((pivots <= floors[:, None]).any(axis=1))[0]
    if bad.size:
        ell = int(bad[0])
        p = int(np.nonzero(pivots[ell] <= floors[ell])[0][0])
        raise NotPositiveDefinite(
            f"{context} {ell} has a near-zero pivot at index {p}",
            pivot_index=p,
        )
    return lowers


def _stacked_inverse(blocks, context):
    lowers = _stacked_cholesky(blocks, context)
    inv = np.linalg.inv(lowers)
    out = np.einsum("lki,lkj->lij", inv, inv)
    return 0.5 * (out + np.swapaxes(out, 1, 2))


def _coalesce(n, rows, cols, vals):
    """Sum duplicate (row, col) entries and drop exact zeros."""
    if rows.size == 0:
        return rows, cols, vals
    keys = rows * n + cols
    uniq, inverse = np.unique(keys, return_inverse=True)
    summed = np.zeros(uniq.size)
    np.add.at(summed, inverse, vals)
    keep = summed != 0.0
    uniq = uniq[keep]
    return uniq // n, uniq % n, summed[keep]


def _overlap_add(payload, k, n_total):
    """Sum a (L, 2k, 2k) stack of blocks into an n_total-sized symmetric
    matrix, block ``ell`` landing at global offset ``ell * k``.

    Returns (diag, rows, cols, vals) with duplicates coalesced.
    """
    L, m, _ = payload.shape
    offsets = np.arange(L, dtype=np.int64) * k

    diag = np.zeros(n_total)
    didx = (offsets[:, None] + np.arange(m, dtype=np.int64)).ravel()
    np.add.at(diag, didx, np.diagonal(payload, axis1=1, axis2=2).ravel())

    a, b = np.triu_indices(m, 1)
    rows = (offsets[:, None] + a).ravel()
    cols = (offsets[:, None] + b).ravel()
    vals = payload[:, a, b].ravel()
    rows, cols, vals = _coalesce(n_total, rows, cols, vals)
    return diag, rows, cols, vals


def assemble_global_precision(model):
    """Build the N×N precision matrix of the full ladder.

    Each block contributes its inverse covariance on the 2k variables it
    covers; contributions from overlapping blocks add. The result is SPD
    whenever every block is, and block-tridiagonal with k×k blocks.

    Raises
    ------
    NotPositiveDefinite
        If any covariance block fails to factorize.
    """
    inverses = _stacked_inverse(model.sigma_blocks, "covariance block")
    diag, rows, cols, vals = _overlap_add(inverses, model.k, model.N)
    return SparseSymMatrix(model.N, diag, rows, cols, vals)


def local_logdets(model):
    """Log-determinant of each covariance block, as a length-L array."""
    lowers = _stacked_cholesky(model.sigma_blocks, "covariance block")
    return 2.0 * np.sum(np.log(np.diagonal(lowers, axis1=1, axis2=2)), axis=1)


def validate(model, zero_tol=0.0):
    """Check the structural assumptions the duality pipeline relies on.

    Parameters
    ----------
    model : LadderModel
    zero_tol : float
        Threshold below which off-diagonal entries are treated as absent
        when building sparsity graphs.

    Returns
    -------
    ValidationReport
        Flags for: every block SPD; every block's precision graph cyclic
        (informational); every block's covariance graph acyclic; and the
        union of all block graphs, mapped to global variables, acyclic.
    """
    messages = []

    a1 = True
    try:
        inverses = _stacked_inverse(model.sigma_blocks, "covariance block")
    except NotPositiveDefinite as exc:
        a1 = False
        inverses = None
        messages.append(str(exc))

    a2 = False
    if inverses is not None:
        a2 = all(
            not is_forest(sparsity_graph(inv, zero_tol)) for inv in inverses
        )
        if not a2:
            messages.append(
                "some block precision graph is already cycle-free; "
                "dualization is unnecessary for it"
            )

    block_graphs = [
        sparsity_graph(b, zero_tol) for b in model.sigma_blocks
    ]
    a3_blocks = True
    for ell, g in enumerate(block_graphs):
        if not is_forest(g):
            a3_blocks = False
            messages.append(f"covariance block {ell} has a cycle")

    a3_union = False
    if a3_blocks:
        k, n = model.k, model.N
        rows = np.concatenate(
            [g.rows + ell * k for ell, g in enumerate(block_graphs)]
        )
        cols = np.concatenate(
            [g.cols + ell * k for ell, g in enumerate(block_graphs)]
        )
        # Structural union: an edge present in two overlapping blocks is
        # one edge, whatever its weights.
        keys = np.unique(rows * n + cols)
        union = SparseSymMatrix(
            n, np.zeros(n), keys // n, keys % n, np.ones(keys.size)
        )
        a3_union = is_forest(union)
        if not a3_union:
            messages.append("union of block graphs has a cycle")

    return ValidationReport(
        assumption1_ok=a1,
        assumption2_cycles_present=a2,
        assumption3_blocks_acyclic=a3_blocks,
        assumption3_union_acyclic=a3_union,
        messages=messages,
    )
